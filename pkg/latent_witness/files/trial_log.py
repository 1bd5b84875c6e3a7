"""trial_log.py

Line-Delimited Trial Logs With a JSON Sidecar

A log ``trials.csv`` holds one trial per line,
``trial_id,context_j,outcome_k[,region_i]``, and ``trials.json`` next to it
holds J, K, N and the provenance of the trials.

"""
from pathlib import Path

import numpy as np
import pandas as pd

from ..empirical.trials import NO_REGION, TrialLog
from ..exceptions import ValidationError
from .csv_files import read_frame, write_frame
from .json_files import read_json, write_json

BASE_COLUMNS = ["trial_id", "context_j", "outcome_k"]
REGION_COLUMN = "region_i"


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def write_trial_log(log, path, seed=None, model=None):
    """Writes the Log and its Sidecar

    Parameters
    ----------
    log : TrialLog
        Records to write
    path : Path
        CSV File Path
    seed : int, optional
        Seed the trials were drawn with
    model : str, optional
        Tag of the ground truth

    Returns
    -------
    list(Path)
        The CSV and JSON paths
    """
    columns = {
        "trial_id": log.trial_id,
        "context_j": log.context,
        "outcome_k": log.outcome,
    }
    if np.any(log.labelled):
        columns[REGION_COLUMN] = log.region
    write_frame(pd.DataFrame(columns), path)
    sidecar = {
        "n_contexts": int(log.n_contexts),
        "n_outcomes": int(log.n_outcomes),
        "n_regions": int(log.n_regions),
        "seed": seed,
        "model": model,
        "metadata": log.metadata,
    }
    write_json(sidecar, sidecar_path(path))
    return [Path(path), sidecar_path(path)]


def read_trial_log(path):
    """Reads a Log Written by write_trial_log"""
    sidecar = read_json(sidecar_path(path))
    frame = read_frame(path)
    if list(frame.columns[:3]) != BASE_COLUMNS:
        raise ValidationError(f"{path} does not start with columns {BASE_COLUMNS}")
    if REGION_COLUMN in frame.columns:
        region = frame[REGION_COLUMN].to_numpy()
    else:
        region = np.full(len(frame), NO_REGION)
    return TrialLog(
        frame["trial_id"].to_numpy(),
        frame["context_j"].to_numpy(),
        frame["outcome_k"].to_numpy(),
        region,
        sidecar["n_contexts"],
        sidecar["n_outcomes"],
        sidecar.get("n_regions", 0),
        dict(sidecar.get("metadata") or {}),
    )
