"""protocol.py

End-to-End Simulation of the Trial-Based Detection Protocol

"""
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from ..detection.probability import DEFAULT_KAPPA, detect
from ..exceptions import EmptyCell, ValidationError
from ..phase_space.forward import build_forward_matrix, ideal_statistics
from ..phase_space.statistics import StatVector
from ..phase_space.wigner import QuantumLatentModel
from ..utilities.functions import seed_sequence
from ..witness.witness import s_cl, witness_value
from .bootstrap import analytic_sigma, bootstrap_distribution
from .estimation import cell_counts, estimate_forward_matrix, estimate_statistics
from .trials import TrialLog, simulate_calibration_trials, simulate_trials, split_records

logger = logging.getLogger(__name__)

SIGMA_SOURCES = ("bootstrap", "analytic")


@dataclass
class CalibrationSummary:
    """
    Held-Out Forward Matrix Estimate Used for the Classical Bound
    """

    s_cl_estimated: float
    fit_trials: int
    validation_trials: int
    min_cell_trials: int
    max_cell_trials: int
    validation_error: Optional[float]


@dataclass
class ProtocolReport:
    """
    Outcome of One Simulated Protocol Run

    Attributes
    ----------
    s_obs : float
        Witness value of the empirical statistics
    s_cl : float
        Classical bound used by the decision
    sigma_s : float
        Standard deviation of the witness statistic used by the decision
    kappa : float
        Confidence multiplier
    detected : bool
        Decision S_obs > S_cl + kappa sigma_S
    bootstrap : dict
        Summary of the bootstrap replicates
    sigma_analytic : float
        Multinomial standard deviation for the ground-truth statistics
    sigma_source : str
        "bootstrap" or "analytic"
    trials : int
        Trials per context
    seed : int or None
        Master seed
    ground_truth : str
        Tag of the simulated statistics
    calibration : CalibrationSummary, optional
        Present when the bound came from an estimated matrix
    """

    s_obs: float
    s_cl: float
    sigma_s: float
    kappa: float
    detected: bool
    bootstrap: dict
    sigma_analytic: float
    sigma_source: str
    trials: int
    seed: Optional[int]
    ground_truth: str
    calibration: Optional[CalibrationSummary] = None
    metadata: dict = field(default_factory=dict)
    trial_log: Optional[TrialLog] = field(default=None, repr=False, compare=False)

    def to_dict(self):
        """JSON-Ready Report Without the Trial Log"""
        report = asdict(replace(self, trial_log=None))
        del report["trial_log"]
        return report


def summarize_replicates(replicates):
    if replicates.size < 2:
        spread = 0.0
    else:
        spread = float(np.std(replicates, ddof=1))
    low, median, high = np.quantile(replicates, [0.025, 0.5, 0.975])
    return {
        "resamples": int(replicates.size),
        "mean": float(np.mean(replicates)),
        "std": spread,
        "q025": float(low),
        "median": float(median),
        "q975": float(high),
    }


def _calibrate(forward, c, budget, seed):
    labelled_seed, split_seed = seed.spawn(2)
    calibration = simulate_calibration_trials(forward, budget.cell_trials, labelled_seed)
    fit, held = split_records(calibration, budget.split, np.random.default_rng(split_seed))
    estimated = estimate_forward_matrix(fit, n_regions=forward.num_columns)
    counts = cell_counts(fit, forward.num_columns)
    try:
        check = estimate_forward_matrix(held, n_regions=forward.num_columns)
        validation_error = float(abs(estimated.matrix - check.matrix).max())
    except EmptyCell:
        validation_error = None
    return CalibrationSummary(
        s_cl_estimated=s_cl(c, estimated),
        fit_trials=len(fit),
        validation_trials=len(held),
        min_cell_trials=int(counts.min()),
        max_cell_trials=int(counts.max()),
        validation_error=validation_error,
    )


def run_protocol(
    ground_truth,
    witness,
    budget,
    kappa=DEFAULT_KAPPA,
    seed=0,
    grid=None,
    contexts=None,
    binning=None,
    forward=None,
    sigma_source="bootstrap",
    workers=1,
):
    """Simulates Trials, Estimates p_hat and sigma_S, and Applies the Decision Rule

    The witness (c, S_cl) is fixed beforehand. With calibration trials in the
    budget, the classical bound is recomputed from a forward matrix estimated
    on a held-out share of region-labelled trials.

    Parameters
    ----------
    ground_truth : StatVector or QuantumLatentModel
        Statistics to sample from, or a model evaluated on grid/contexts/binning
    witness : WitnessResult
        Precomputed witness
    budget : TrialBudget
        Trial counts
    kappa : float
        Confidence multiplier
    seed : int or np.random.SeedSequence
        Master seed
    grid : LatentGrid, optional
        Needed with a model ground truth
    contexts : ContextSet, optional
        Needed with a model ground truth
    binning : OutcomeBinning, optional
        Needed with a model ground truth
    forward : ForwardMatrix, optional
        True response matrix (needed for calibration with a StatVector)
    sigma_source : str
        "bootstrap" (default) or "analytic"
    workers : int
        Worker processes

    Returns
    -------
    ProtocolReport
    """
    if sigma_source not in SIGMA_SOURCES:
        raise ValidationError(f"sigma source must be one of {SIGMA_SOURCES}, got '{sigma_source}'")
    if isinstance(ground_truth, QuantumLatentModel):
        if grid is None or contexts is None or binning is None:
            raise ValidationError("A model ground truth needs grid, contexts and binning")
        if forward is None:
            forward = build_forward_matrix(grid, contexts, binning)
        p_true = ideal_statistics(ground_truth, grid, contexts, binning, forward)
    elif isinstance(ground_truth, StatVector):
        p_true = ground_truth
    else:
        raise ValidationError("Ground truth must be a StatVector or a QuantumLatentModel")
    if budget.cell_trials and forward is None:
        raise ValidationError("Calibration trials need the true forward matrix")

    trial_seed, bootstrap_seed, calibration_seed = seed_sequence(seed).spawn(3)
    log = simulate_trials(p_true, budget.trials, trial_seed)
    p_hat = estimate_statistics(log)
    s_obs = witness_value(witness.c, p_hat)

    replicates = bootstrap_distribution(log, witness.c, budget.bootstrap, bootstrap_seed, workers)
    summary = summarize_replicates(replicates)
    sigma_analytic = analytic_sigma(p_true, witness.c, budget.trials)
    sigma_s = summary["std"] if sigma_source == "bootstrap" else sigma_analytic

    bound = witness.s_cl
    calibration = None
    if budget.cell_trials:
        calibration = _calibrate(forward, witness.c, budget, calibration_seed)
        bound = calibration.s_cl_estimated

    if witness.classical:
        logger.warning("Witness is the classical fallback; detection carries no evidence")
    detected = detect(s_obs, bound, kappa, sigma_s)
    tag = p_true.metadata.get("tag", "statistics")
    logger.info(
        "%s: S_obs %.6f, S_cl %.6f, sigma_S %.6f -> %s",
        tag,
        s_obs,
        bound,
        sigma_s,
        "detected" if detected else "not detected",
    )
    return ProtocolReport(
        s_obs=s_obs,
        s_cl=bound,
        sigma_s=float(sigma_s),
        kappa=float(kappa),
        detected=detected,
        bootstrap=summary,
        sigma_analytic=sigma_analytic,
        sigma_source=sigma_source,
        trials=int(budget.trials),
        seed=None if isinstance(seed, np.random.SeedSequence) else int(seed),
        ground_truth=tag,
        calibration=calibration,
        metadata={"s_cl_exact": float(witness.s_cl), "witness_gap": float(witness.gap)},
        trial_log=log,
    )
