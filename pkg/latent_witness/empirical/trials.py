"""trials.py

Finite-Trial Records, Trial Budgets and Seeded Trial Simulation

"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ..exceptions import ValidationError
from ..phase_space.statistics import BLOCK_SUM_TOLERANCE
from ..utilities.functions import as_generator, seed_sequence

NO_REGION = -1


class TrialRecord(NamedTuple):
    """
    One Trial: Readout Context j, Outcome k and Optional Latent Region i
    """

    context: int
    outcome: int
    region: Optional[int] = None
    trial_id: int = 0


@dataclass
class TrialBudget:
    """
    Trial Counts of One Protocol Run

    Attributes
    ----------
    trials : int
        Trials M per context
    bootstrap : int
        Bootstrap resamples B
    split : float
        Fraction of the labelled calibration trials used to estimate the
        forward matrix; the rest is held back to validate it
    cell_trials : int
        Labelled calibration trials per (region, context) cell, 0 to reuse
        the exact matrix
    """

    trials: int
    bootstrap: int = 1000
    split: float = 0.5
    cell_trials: int = 0

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"Trials per context must be at least 1, got {self.trials}")
        if int(self.bootstrap) != self.bootstrap or self.bootstrap < 2:
            raise ValidationError(f"Bootstrap resamples must be at least 2, got {self.bootstrap}")
        if not (0.0 < self.split < 1.0):
            raise ValidationError(f"Split fraction must lie in (0, 1), got {self.split}")
        if int(self.cell_trials) != self.cell_trials or self.cell_trials < 0:
            raise ValidationError(f"Calibration trials per cell must be >= 0, got {self.cell_trials}")


@dataclass
class TrialLog:
    """
    Columnar Collection of Trial Records

    Records without a latent region carry region -1.

    Attributes
    ----------
    trial_id : array_like
        Unique trial identifiers
    context : array_like
        Context index j per trial
    outcome : array_like
        Outcome index k per trial
    region : array_like
        Latent region index i per trial, or -1
    n_contexts : int
        Number of contexts J
    n_outcomes : int
        Number of outcomes K
    n_regions : int
        Number of latent regions N (0 when no record is labelled)
    metadata : dict
        Provenance (seed, model, ...)
    """

    trial_id: np.ndarray
    context: np.ndarray
    outcome: np.ndarray
    region: np.ndarray
    n_contexts: int
    n_outcomes: int
    n_regions: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.trial_id = np.asarray(self.trial_id, dtype=np.int64)
        self.context = np.asarray(self.context, dtype=np.int64)
        self.outcome = np.asarray(self.outcome, dtype=np.int64)
        self.region = np.asarray(self.region, dtype=np.int64)
        size = self.trial_id.size
        if not (self.context.size == self.outcome.size == self.region.size == size):
            raise ValidationError("Trial log columns differ in length")
        if np.unique(self.trial_id).size != size:
            raise ValidationError("Trial identifiers must be unique")
        _check_range(self.context, self.n_contexts, "context")
        _check_range(self.outcome, self.n_outcomes, "outcome")
        labelled = self.region[self.region != NO_REGION]
        if labelled.size:
            _check_range(labelled, self.n_regions, "region")
        if np.any(self.region < NO_REGION):
            raise ValidationError("Region indices must be >= 0 or -1 for unlabelled trials")

    def __len__(self):
        return int(self.trial_id.size)

    @classmethod
    def empty(cls, n_contexts, n_outcomes, n_regions=0):
        nothing = np.zeros(0, dtype=np.int64)
        return cls(nothing, nothing, nothing, nothing, n_contexts, n_outcomes, n_regions)

    @classmethod
    def from_records(cls, records, n_contexts, n_outcomes, n_regions=0, metadata=None):
        records = list(records)
        return cls(
            [record.trial_id for record in records],
            [record.context for record in records],
            [record.outcome for record in records],
            [NO_REGION if record.region is None else record.region for record in records],
            n_contexts,
            n_outcomes,
            n_regions,
            dict(metadata or {}),
        )

    def records(self):
        for trial_id, context, outcome, region in zip(
            self.trial_id, self.context, self.outcome, self.region
        ):
            yield TrialRecord(
                int(context),
                int(outcome),
                None if region == NO_REGION else int(region),
                int(trial_id),
            )

    @property
    def labelled(self):
        return self.region != NO_REGION

    def subset(self, mask):
        mask = np.asarray(mask)
        return TrialLog(
            self.trial_id[mask],
            self.context[mask],
            self.outcome[mask],
            self.region[mask],
            self.n_contexts,
            self.n_outcomes,
            self.n_regions,
            dict(self.metadata),
        )

    def concatenate(self, other):
        if (self.n_contexts, self.n_outcomes) != (other.n_contexts, other.n_outcomes):
            raise ValidationError("Cannot merge trial logs with different context/outcome counts")
        return TrialLog(
            np.concatenate([self.trial_id, other.trial_id]),
            np.concatenate([self.context, other.context]),
            np.concatenate([self.outcome, other.outcome]),
            np.concatenate([self.region, other.region]),
            self.n_contexts,
            self.n_outcomes,
            max(self.n_regions, other.n_regions),
            dict(self.metadata),
        )

    def counts(self):
        """(J, K) Outcome Counts per Context"""
        flat = np.bincount(
            self.context * self.n_outcomes + self.outcome,
            minlength=self.n_contexts * self.n_outcomes,
        )
        return flat.reshape(self.n_contexts, self.n_outcomes)

    def context_sizes(self):
        return np.bincount(self.context, minlength=self.n_contexts)


def _check_range(values, bound, name):
    if values.size and (values.min() < 0 or values.max() >= bound):
        raise ValidationError(f"A {name} index lies outside [0, {bound - 1}]")


def check_block(p_block):
    p_block = np.asarray(p_block, dtype=float)
    if p_block.ndim != 1 or np.any(p_block < 0) or not np.all(np.isfinite(p_block)):
        raise ValidationError("Outcome probabilities must be a finite non-negative vector")
    if abs(p_block.sum() - 1.0) > BLOCK_SUM_TOLERANCE:
        raise ValidationError(f"Outcome probabilities sum to {p_block.sum()!r}, not 1")
    return p_block


def sample_context(p_block, trials, rng):
    """Multinomial Outcome Counts of M Trials Under One Context

    Parameters
    ----------
    p_block : array_like
        Outcome probabilities of the context
    trials : int
        Number of trials M
    rng : np.random.Generator or int
        Random source

    Returns
    -------
    array_like
        K integer counts summing to M
    """
    p_block = check_block(p_block)
    if int(trials) != trials or trials < 0:
        raise ValidationError(f"Trial count must be a non-negative integer, got {trials}")
    # multinomial rejects sums a few ulps above one
    return as_generator(rng).multinomial(int(trials), p_block / p_block.sum())


def _expand(counts, rng):
    """Turns (rows, K) Counts Into Shuffled Per-Row Outcome Sequences"""
    rows, n_outcomes = counts.shape
    row_index = np.repeat(np.arange(rows), counts.sum(axis=1))
    outcome = np.repeat(np.tile(np.arange(n_outcomes), rows), counts.ravel())
    order = np.lexsort((rng.random(outcome.size), row_index))
    return row_index[order], outcome[order]


def simulate_trials(p, trials, seed, first_id=0):
    """Draws M Unlabelled Trials per Context From Statistics p

    Context j uses the j-th child of the seed, so the draw of a context does
    not depend on the other contexts.

    Parameters
    ----------
    p : StatVector
        Ground-truth statistics
    trials : int
        Trials M per context
    seed : int or np.random.SeedSequence
        Master seed
    first_id : int
        Identifier of the first generated trial

    Returns
    -------
    TrialLog
    """
    children = seed_sequence(seed).spawn(p.n_contexts + 1)
    counts = np.vstack(
        [
            sample_context(block, trials, np.random.default_rng(child))
            for block, child in zip(p.blocks(), children[:-1])
        ]
    )
    context, outcome = _expand(counts, np.random.default_rng(children[-1]))
    size = context.size
    return TrialLog(
        np.arange(first_id, first_id + size),
        context,
        outcome,
        np.full(size, NO_REGION),
        p.n_contexts,
        p.n_outcomes,
        0,
        {"trials_per_context": int(trials), "source": p.metadata.get("tag", "statistics")},
    )


def simulate_calibration_trials(forward, cell_trials, seed, first_id=0):
    """Draws Labelled Trials for Every (Region, Context) Cell of a Forward Matrix

    Parameters
    ----------
    forward : ForwardMatrix
        Ground-truth response matrix
    cell_trials : int
        Trials per (region, context) cell
    seed : int or np.random.SeedSequence
        Master seed
    first_id : int
        Identifier of the first generated trial

    Returns
    -------
    TrialLog
        Records with region labels, grouped by region then context
    """
    if int(cell_trials) != cell_trials or cell_trials < 1:
        raise ValidationError(f"Calibration trials per cell must be at least 1, got {cell_trials}")
    n_contexts, n_outcomes = forward.n_contexts, forward.n_outcomes
    n_regions = forward.num_columns
    # (N * J, K) rows ordered region-major
    responses = forward.matrix.T.toarray().reshape(n_regions * n_contexts, n_outcomes)
    responses = responses / responses.sum(axis=1, keepdims=True)
    sampling, shuffling = (np.random.default_rng(child) for child in seed_sequence(seed).spawn(2))
    counts = sampling.multinomial(int(cell_trials), responses)
    cell, outcome = _expand(counts, shuffling)
    size = cell.size
    return TrialLog(
        np.arange(first_id, first_id + size),
        cell % n_contexts,
        outcome,
        cell // n_contexts,
        n_contexts,
        n_outcomes,
        n_regions,
        {"cell_trials": int(cell_trials)},
    )


def split_records(log, fraction, seed):
    """Random Disjoint Partition of a Trial Log by Trial Identifier

    Parameters
    ----------
    log : TrialLog
        Records to split
    fraction : float
        Share of the records in the first part, in (0, 1)
    seed : int or np.random.Generator
        Random source

    Returns
    -------
    (TrialLog, TrialLog)
        Held-out part and remainder
    """
    if not (0.0 < fraction < 1.0):
        raise ValidationError(f"Split fraction must lie in (0, 1), got {fraction}")
    order = as_generator(seed).permutation(len(log))
    held = np.zeros(len(log), dtype=bool)
    held[order[: int(round(fraction * len(log)))]] = True
    return log.subset(held), log.subset(~held)
