"""csv_files.py

CSV Output of Curves, Heatmaps and Statistics Vectors

Files use '.' decimals, a header row and LF line endings; floats are written
in shortest round-trip form.

"""
import numpy as np
import pandas as pd

from ..exceptions import StorageError, ValidationError
from ..phase_space.statistics import StatVector

STATISTICS_COLUMNS = ["context", "outcome", "probability"]


def write_frame(frame, path):
    """Writes a DataFrame Without its Index

    Parameters
    ----------
    frame : pandas.DataFrame
        Table to write
    path : Path
        Output File Path

    Returns
    -------
    None
    """
    try:
        frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e


def read_frame(path):
    try:
        return pd.read_csv(path)
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e


def statistics_frame(statistics):
    contexts, outcomes = np.divmod(np.arange(statistics.dimension), statistics.n_outcomes)
    return pd.DataFrame(
        {"context": contexts, "outcome": outcomes, "probability": statistics.values}
    )


def save_statistics_csv(statistics, path):
    write_frame(statistics_frame(statistics), path)


def load_statistics_csv(path, metadata=None):
    """Reads a context,outcome,probability Table Back Into a StatVector"""
    frame = read_frame(path)
    if list(frame.columns) != STATISTICS_COLUMNS:
        raise ValidationError(f"{path} does not have columns {STATISTICS_COLUMNS}")
    n_contexts = int(frame["context"].max()) + 1
    n_outcomes = int(frame["outcome"].max()) + 1
    values = np.zeros(n_contexts * n_outcomes)
    values[frame["context"].to_numpy() * n_outcomes + frame["outcome"].to_numpy()] = frame[
        "probability"
    ].to_numpy(dtype=float)
    return StatVector(values, n_contexts, n_outcomes, dict(metadata or {}))
