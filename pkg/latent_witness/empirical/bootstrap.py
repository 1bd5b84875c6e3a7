"""bootstrap.py

Bootstrap and Analytic Standard Deviations of the Witness Statistic

"""
import numpy as np

from ..exceptions import EmptyContext, ValidationError
from ..tasks import WorkerPool
from ..utilities.functions import seed_sequence
from .trials import TrialLog


def _resample_context(counts, c_block, resamples, seed):
    trials = int(counts.sum())
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(trials, counts / trials, size=resamples)
    return draws @ c_block / trials


def bootstrap_distribution(data, c, resamples, seed, workers=1):
    """Bootstrap Replicates S^(b) = c . p_hat^(b)

    Trials are resampled with replacement within each context, which for
    a context with counts n_k is a multinomial draw with probabilities n_k / M.
    Context j uses the j-th child of the seed.

    Parameters
    ----------
    data : TrialLog or array_like
        Trial records or (J, K) counts
    c : array_like
        Witness vector (length J*K)
    resamples : int
        Number of replicates B
    seed : int or np.random.SeedSequence
        Master seed
    workers : int
        Worker processes, one context per task

    Returns
    -------
    array_like
        B replicates of the witness statistic
    """
    counts = data.counts() if isinstance(data, TrialLog) else np.asarray(data)
    n_contexts, n_outcomes = counts.shape
    c = np.asarray(c, dtype=float)
    if c.shape != (n_contexts * n_outcomes,):
        raise ValidationError("Witness length does not match the trial counts")
    if int(resamples) != resamples or resamples < 1:
        raise ValidationError(f"Bootstrap resamples must be at least 1, got {resamples}")
    empty = np.flatnonzero(counts.sum(axis=1) == 0)
    if empty.size:
        raise EmptyContext(int(empty[0]))
    children = seed_sequence(seed).spawn(n_contexts)
    tasks = [
        (counts[j].astype(float), c.reshape(n_contexts, n_outcomes)[j], int(resamples), children[j])
        for j in range(n_contexts)
    ]
    with WorkerPool(workers) as pool:
        per_context = pool.starmap(_resample_context, tasks)
    # fixed context order keeps the reduction deterministic
    return np.sum(np.vstack(per_context), axis=0)


def bootstrap_sigma(data, c, resamples, seed, workers=1):
    """Bootstrap Standard Deviation of the Witness Statistic

    Parameters
    ----------
    data : TrialLog or array_like
        Trial records or (J, K) counts
    c : array_like
        Witness vector
    resamples : int
        Number of replicates B (at least 2)
    seed : int or np.random.SeedSequence
        Master seed
    workers : int
        Worker processes

    Returns
    -------
    float
        Sample standard deviation (ddof = 1) of the replicates
    """
    if resamples < 2:
        raise ValidationError(f"Bootstrap needs at least 2 resamples, got {resamples}")
    return float(np.std(bootstrap_distribution(data, c, resamples, seed, workers), ddof=1))


def analytic_sigma(p, c, trials):
    """Multinomial Standard Deviation of c . p_hat for Known p

    Var = sum_j [sum_k c_jk^2 p_jk - (sum_k c_jk p_jk)^2] / M_j

    Parameters
    ----------
    p : StatVector
        Statistics the trials are drawn from
    c : array_like
        Witness vector
    trials : int or array_like
        Trials per context, scalar or one per context

    Returns
    -------
    float
    """
    blocks = p.blocks()
    c_blocks = np.asarray(c, dtype=float).reshape(blocks.shape)
    trials = np.broadcast_to(np.asarray(trials, dtype=float), (blocks.shape[0],))
    if np.any(trials < 1):
        raise ValidationError("Every context needs at least one trial")
    second = np.sum(c_blocks ** 2 * blocks, axis=1)
    first = np.sum(c_blocks * blocks, axis=1)
    variance = np.maximum(second - first ** 2, 0.0) / trials
    return float(np.sqrt(variance.sum()))


def trial_budget_sigma(n_outcomes, trials):
    """Order-of-Magnitude Noise Scale 1 / sqrt(K M) of a Trial Budget"""
    if n_outcomes < 1 or trials < 1:
        raise ValidationError("Outcome and trial counts must be positive")
    return 1.0 / np.sqrt(n_outcomes * trials)
