"""json_files.py

Deterministic JSON Reading and Writing

"""
import json

import numpy as np

from ..exceptions import StorageError


def _default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(data, compact=False):
    """Serializes With Sorted Keys, So Equal Data Gives Equal Bytes"""
    if compact:
        return json.dumps(data, sort_keys=True, separators=(",", ":"), default=_default)
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, default=_default) + "\n"


def write_json(data, path):
    """Writes a Dictionary as UTF-8 JSON With LF Line Endings

    Parameters
    ----------
    data : dict
        JSON-ready content (numpy scalars and arrays are converted)
    path : Path
        Output File Path

    Returns
    -------
    None
    """
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as outfile:
            outfile.write(dumps(data))
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e


def read_json(path):
    try:
        with open(path, encoding="utf-8") as infile:
            return json.load(infile)
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e
