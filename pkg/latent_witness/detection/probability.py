"""probability.py

Detection Rule, Closed-Form and Monte Carlo Detection Probabilities, Heatmaps

"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import pandas as pd

from ..exceptions import ValidationError
from ..phase_space.forward import ideal_statistics
from ..phase_space.wigner import QuantumLatentModel, check_beta
from ..tasks import WorkerPool
from ..utilities.functions import chunk_sizes, normal_tail, seed_sequence, spawn_generators
from ..witness.solver import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, SolverVariant
from ..witness.witness import optimal_witness, s_cl, witness_value
from .noise import check_alpha, check_sigma, classical_saturator, mix_alpha, project_blocks

logger = logging.getLogger(__name__)

DEFAULT_KAPPA = 2.0
MC_CHUNK = 1000


@dataclass
class DetectionConfig:
    """
    Parameters of One Detection Experiment

    Attributes
    ----------
    alpha : float
        Classical admixture in [0, 1]
    beta : float
        Thermal weight of the latent model in [0, 1]
    sigma : float
        Noise standard deviation per statistics entry
    kappa : float
        Confidence multiplier of the decision rule
    n_mc : int
        Monte Carlo repetitions
    seed : int or np.random.SeedSequence
        Master seed of the repetitions
    """

    alpha: float = 0.0
    beta: float = 0.0
    sigma: float = 0.01
    kappa: float = DEFAULT_KAPPA
    n_mc: int = 10_000
    seed: object = 0

    def __post_init__(self):
        check_alpha(self.alpha)
        check_beta(self.beta)
        check_sigma(self.sigma)
        if not np.isfinite(self.kappa) or self.kappa <= 0:
            raise ValidationError(f"Confidence multiplier kappa must be positive, got {self.kappa}")
        if int(self.n_mc) != self.n_mc or self.n_mc < 1:
            raise ValidationError(f"Monte Carlo repetitions must be at least 1, got {self.n_mc}")


class DetectionEstimate(NamedTuple):
    frequency: float
    stderr: float


def detect(s_obs, s_cl, kappa, sigma_s):
    """Decision Rule S_obs > S_cl + kappa sigma_S (Strict)"""
    if sigma_s < 0:
        raise ValidationError(f"sigma_S must be non-negative, got {sigma_s}")
    return bool(s_obs > s_cl + kappa * sigma_s)


def witness_sigma(sigma, c):
    """Standard Deviation sigma ||c||_2 of the Witness Statistic"""
    return float(sigma * np.linalg.norm(c))


def p_det_closed(alpha, kappa, sigma, c, p_q, s_cl_value):
    """Closed-Form Detection Probability Under Gaussian Witness Noise

    P = 1 - Phi[(S_cl + kappa sigma_S - mu_alpha) / sigma_S] with
    mu_alpha - S_cl = (1 - alpha) (c . p_q - S_cl). For sigma = 0 the result is
    a step function in mu_alpha > S_cl.

    Parameters
    ----------
    alpha : float or array_like
        Classical admixture(s)
    kappa : float
        Confidence multiplier
    sigma : float
        Noise standard deviation per entry
    c : array_like
        Witness vector
    p_q : StatVector
        Quantum statistics
    s_cl_value : float
        Classical bound of c

    Returns
    -------
    float or array_like
        Detection probability per alpha
    """
    check_sigma(sigma)
    alpha = np.asarray(alpha, dtype=float)
    if np.any((alpha < 0) | (alpha > 1)):
        raise ValidationError("Admixture alpha must lie in [0, 1]")
    margin = (1.0 - alpha) * (witness_value(c, p_q) - s_cl_value)
    sigma_s = witness_sigma(sigma, c)
    if sigma_s == 0:
        probability = np.where(margin > 0, 1.0, 0.0)
    else:
        probability = normal_tail(kappa - margin / sigma_s)
    return float(probability) if probability.ndim == 0 else probability


def alpha_half_maximum(delta, sigma_s, kappa=DEFAULT_KAPPA):
    """Admixture at Which the Closed-Form Detection Probability Equals 1/2

    Returns
    -------
    float
        1 - kappa sigma_S / delta (outside [0, 1] when the curve never crosses)
    """
    if delta <= 0:
        raise ValidationError(f"Witness gap must be positive, got {delta}")
    return 1.0 - kappa * sigma_s / delta


def _count_detections(p_alpha, c, bound, kappa, sigma, n_outcomes, size, rng):
    sigma_s = witness_sigma(sigma, c)
    if sigma == 0:
        return size if detect(witness_value(c, p_alpha), bound, kappa, 0.0) else 0
    noisy = p_alpha[None, :] + rng.normal(0.0, sigma, size=(size, p_alpha.size))
    values = project_blocks(noisy, n_outcomes) @ c
    return sum(detect(value, bound, kappa, sigma_s) for value in values)


def p_det_mc(config, witness, p_q, p_cl, forward=None, workers=1, chunk=MC_CHUNK):
    """Monte Carlo Detection Frequency Including the Simplex Projection

    Repetitions are split into fixed-size chunks, each with its own child of
    the master seed, so the estimate does not depend on the worker count.

    Parameters
    ----------
    config : DetectionConfig
        alpha, sigma, kappa, n_mc and seed
    witness : WitnessResult
        Witness c and its bound
    p_q : StatVector
        Quantum statistics
    p_cl : StatVector
        Saturating classical statistics
    forward : ForwardMatrix, optional
        Recompute the bound from this matrix instead of using witness.s_cl
    workers : int
        Worker processes
    chunk : int
        Repetitions per task

    Returns
    -------
    DetectionEstimate
        Detection frequency and its binomial standard error
    """
    bound = witness.s_cl if forward is None else s_cl(witness.c, forward)
    p_alpha = mix_alpha(p_q, p_cl, config.alpha)
    sizes = chunk_sizes(config.n_mc, chunk)
    generators = spawn_generators(config.seed, len(sizes))
    tasks = [
        (p_alpha.values, witness.c, bound, config.kappa, config.sigma, p_q.n_outcomes, size, rng)
        for size, rng in zip(sizes, generators)
    ]
    with WorkerPool(workers) as pool:
        counts = pool.starmap(_count_detections, tasks)
    frequency = sum(counts) / config.n_mc
    stderr = float(np.sqrt(frequency * (1.0 - frequency) / config.n_mc))
    logger.debug(
        "alpha %.4f sigma %.4f: detection frequency %.4f +- %.4f",
        config.alpha,
        config.sigma,
        frequency,
        stderr,
    )
    return DetectionEstimate(frequency, stderr)


def detection_curve(alphas, sigma, witness, p_q, p_cl, kappa=DEFAULT_KAPPA, n_mc=0, seed=0, workers=1):
    """Detection Probability Versus alpha for One Noise Scale

    Parameters
    ----------
    alphas : array_like
        Admixture grid
    sigma : float
        Noise standard deviation per entry
    witness : WitnessResult
        Fixed witness
    p_q : StatVector
        Quantum statistics
    p_cl : StatVector
        Saturating classical statistics
    kappa : float
        Confidence multiplier
    n_mc : int
        Monte Carlo repetitions per alpha (0 skips the Monte Carlo columns)
    seed : int
        Master seed, one child per alpha
    workers : int
        Worker processes

    Returns
    -------
    pandas.DataFrame
        Columns alpha, p_closed, p_mc, mc_stderr
    """
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        raise ValidationError("The alpha grid is empty")
    closed = p_det_closed(alphas, kappa, sigma, witness.c, p_q, witness.s_cl)
    p_mc = np.full(alphas.size, np.nan)
    stderr = np.full(alphas.size, np.nan)
    if n_mc > 0:
        for index, (alpha, child) in enumerate(zip(alphas, seed_sequence(seed).spawn(alphas.size))):
            config = DetectionConfig(alpha=float(alpha), sigma=sigma, kappa=kappa, n_mc=n_mc, seed=child)
            p_mc[index], stderr[index] = p_det_mc(config, witness, p_q, p_cl, workers=workers)
    return pd.DataFrame(
        {"alpha": alphas, "p_closed": np.atleast_1d(closed), "p_mc": p_mc, "mc_stderr": stderr}
    )


@dataclass
class Heatmap:
    """
    Detection Probabilities With Rows Over beta and Columns Over alpha
    """

    probabilities: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    gaps: np.ndarray
    metadata: dict = field(default_factory=dict)

    def to_frame(self):
        frame = pd.DataFrame(self.probabilities, columns=[repr(float(a)) for a in self.alphas])
        frame.insert(0, "beta", self.betas)
        return frame


def _heatmap_row(beta, alphas, sigma, kappa, grid, contexts, binning, forward, solver, frozen):
    p_q = ideal_statistics(QuantumLatentModel.mix(beta), grid, contexts, binning, forward)
    if frozen is None:
        witness = optimal_witness(p_q, forward, **solver)
        c, bound = witness.c, witness.s_cl
    else:
        c, bound = frozen
    gap = witness_value(c, p_q) - bound
    return p_det_closed(alphas, kappa, sigma, c, p_q, bound), gap


def heatmap(
    alphas,
    betas,
    sigma,
    grid,
    contexts,
    binning,
    forward,
    kappa=DEFAULT_KAPPA,
    freeze_witness=False,
    tol=DEFAULT_TOLERANCE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    variant=SolverVariant.MIN_NORM_POINT,
    workers=1,
):
    """Closed-Form Detection Probability Over an (alpha, beta) Grid

    Each beta row rebuilds p_q for MIX(beta) and, unless the witness is frozen
    at beta = 0, re-optimizes the witness before sweeping alpha.

    Parameters
    ----------
    alphas : array_like
        Admixture grid (columns)
    betas : array_like
        Thermal weights (rows)
    sigma : float
        Noise standard deviation per entry
    grid : LatentGrid
        Latent grid
    contexts : ContextSet
        Projection angles
    binning : OutcomeBinning
        Outcome bins
    forward : ForwardMatrix
        Forward matrix for grid/contexts/binning
    kappa : float
        Confidence multiplier
    freeze_witness : bool
        Reuse the beta = 0 witness for every row
    tol : float
        Solver tolerance
    max_iterations : int
        Solver iteration cap
    variant : SolverVariant or str
        Nearest-point algorithm
    workers : int
        Worker processes, one row per task

    Returns
    -------
    Heatmap
    """
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if alphas.size == 0 or betas.size == 0:
        raise ValidationError("Heatmap grids must be non-empty")
    check_sigma(sigma)
    for beta in betas:
        check_beta(beta)
    solver = {"tol": tol, "max_iterations": max_iterations, "variant": variant}

    frozen = None
    if freeze_witness:
        reference = optimal_witness(
            ideal_statistics(QuantumLatentModel.fock1(), grid, contexts, binning, forward),
            forward,
            **solver,
        )
        frozen = (reference.c, reference.s_cl)

    tasks = [
        (float(beta), alphas, sigma, kappa, grid, contexts, binning, forward, solver, frozen)
        for beta in betas
    ]
    with WorkerPool(workers) as pool:
        rows = pool.starmap(_heatmap_row, tasks)
    probabilities = np.vstack([np.atleast_1d(row) for row, _ in rows])
    gaps = np.array([gap for _, gap in rows])
    metadata = {
        "sigma": float(sigma),
        "kappa": float(kappa),
        "witness_mode": "frozen" if freeze_witness else "reoptimized",
        "tol": float(tol),
        "variant": SolverVariant.parse(variant).value,
    }
    return Heatmap(probabilities, alphas, betas, gaps, metadata)
