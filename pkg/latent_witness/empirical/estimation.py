"""estimation.py

Empirical Statistics and Held-Out Forward Matrix Estimates From Trial Logs

"""
import numpy as np
from scipy import sparse

from ..exceptions import EmptyCell, EmptyContext, ValidationError
from ..phase_space.forward import ForwardMatrix
from ..phase_space.statistics import StatVector
from .trials import TrialLog


def estimate_statistics(data, metadata=None):
    """Per-Context Relative Outcome Frequencies

    Parameters
    ----------
    data : TrialLog or array_like
        Trial records, or a (J, K) array of outcome counts
    metadata : dict, optional
        Provenance stored on the result

    Returns
    -------
    StatVector
        p_hat

    Raises
    ------
    EmptyContext
        If a context has no trials
    """
    counts = data.counts() if isinstance(data, TrialLog) else np.asarray(data)
    if counts.ndim != 2:
        raise ValidationError("Outcome counts must be a (contexts, outcomes) array")
    if np.any(counts < 0):
        raise ValidationError("Outcome counts must be non-negative")
    totals = counts.sum(axis=1)
    empty = np.flatnonzero(totals == 0)
    if empty.size:
        raise EmptyContext(int(empty[0]))
    values = (counts / totals[:, None]).ravel()
    metadata = dict(metadata or {})
    metadata["trials_per_context"] = [int(total) for total in totals]
    return StatVector(values, counts.shape[0], counts.shape[1], metadata)


def cell_counts(log, n_regions=None):
    """(N, J) Number of Labelled Trials per (Region, Context) Cell"""
    n_regions = log.n_regions if n_regions is None else n_regions
    labelled = log.subset(log.labelled)
    flat = np.bincount(
        labelled.region * log.n_contexts + labelled.context,
        minlength=n_regions * log.n_contexts,
    )
    return flat.reshape(n_regions, log.n_contexts)


def estimate_forward_matrix(log, n_contexts=None, n_outcomes=None, n_regions=None):
    """Empirical Response Matrix A_hat From Region-Labelled Trials

    A_hat[(j, k), i] = count(i, j, k) / count(i, j). Unlabelled records are
    ignored.

    Parameters
    ----------
    log : TrialLog
        Held-out records with latent regions
    n_contexts : int, optional
        J (defaults to the log's)
    n_outcomes : int, optional
        K (defaults to the log's)
    n_regions : int, optional
        N (defaults to the log's)

    Returns
    -------
    ForwardMatrix

    Raises
    ------
    EmptyCell
        For the first (region, context) cell without trials
    """
    n_contexts = log.n_contexts if n_contexts is None else n_contexts
    n_outcomes = log.n_outcomes if n_outcomes is None else n_outcomes
    n_regions = log.n_regions if n_regions is None else n_regions
    if (n_contexts, n_outcomes) != (log.n_contexts, log.n_outcomes):
        raise ValidationError("Trial log does not match the requested contexts/outcomes")
    if n_regions < 1:
        raise ValidationError("Forward matrix estimation needs at least one latent region")

    totals = cell_counts(log, n_regions)
    missing = np.argwhere(totals == 0)
    if missing.size:
        region, context = missing[0]
        raise EmptyCell(int(region), int(context))

    labelled = log.subset(log.labelled)
    keys = (labelled.region * n_contexts + labelled.context) * n_outcomes + labelled.outcome
    unique, counts = np.unique(keys, return_counts=True)
    region = unique // (n_contexts * n_outcomes)
    row = unique % (n_contexts * n_outcomes)
    context = row // n_outcomes
    data = counts / totals[region, context]
    matrix = sparse.csc_matrix(
        (data, (row, region)), shape=(n_contexts * n_outcomes, n_regions)
    )
    metadata = {"estimated": True, "labelled_trials": int(labelled.trial_id.size)}
    return ForwardMatrix(matrix, n_contexts, n_outcomes, metadata)
