"""witness.py

Linear Nonclassicality Witnesses, Classical Bounds and the Optimal Witness

"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError
from ..phase_space.forward import proportional_fit
from ..phase_space.statistics import StatVector
from .solver import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    SolverVariant,
    nearest_point,
)

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-9
UNIT_NORM_TOLERANCE = 1e-9
CERTIFY_MAX_CYCLES = 2000


@dataclass
class ClassicalWeights:
    """
    Non-Negative Latent Weights Summing to One
    """

    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.ndim != 1 or self.w.size == 0:
            raise ValidationError("Classical weights must be a non-empty vector")
        if np.any(self.w < 0) or not np.all(np.isfinite(self.w)):
            raise ValidationError("Classical weights must be finite and non-negative")
        total = float(self.w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValidationError(f"Classical weights sum to {total!r}, not 1")

    @property
    def support(self):
        return np.flatnonzero(self.w > 0)


@dataclass
class WitnessResult:
    """
    Optimal Witness c Together With its Duality Certificate

    Attributes
    ----------
    c : array_like
        Unit-norm witness (length J*K)
    s_cl : float
        Classical bound max_i c . a_i
    s : float
        Witness value c . p
    gap : float
        s - s_cl
    w_star : ClassicalWeights
        Weights of the nearest classical point
    q_star : StatVector
        A w_star
    iterations : int
        Solver iteration count
    certificate_residual : float
        |gap - distance|
    distance : float
        ||p - q_star||_2
    classical : bool
        True when the distance is within tol (c is then the uniform fallback)
    metadata : dict
        Solver settings and provenance
    """

    c: np.ndarray
    s_cl: float
    s: float
    gap: float
    w_star: ClassicalWeights
    q_star: StatVector
    iterations: int
    certificate_residual: float
    distance: float
    classical: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        norm = np.linalg.norm(self.c)
        if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise ValidationError(f"Witness must have unit norm, got {norm!r}")

    def to_dict(self):
        """JSON-Ready Dictionary; c and w_star Keep Full Precision as repr Strings"""
        support = self.w_star.support
        return {
            "c": [repr(float(value)) for value in self.c],
            "s_cl": float(self.s_cl),
            "s": float(self.s),
            "gap": float(self.gap),
            "distance": float(self.distance),
            "certificate_residual": float(self.certificate_residual),
            "iterations": int(self.iterations),
            "classical": bool(self.classical),
            "n_contexts": int(self.q_star.n_contexts),
            "n_outcomes": int(self.q_star.n_outcomes),
            "w_star": {
                "size": int(self.w_star.w.size),
                "indices": [int(index) for index in support],
                "values": [repr(float(value)) for value in self.w_star.w[support]],
            },
            "q_star": [repr(float(value)) for value in self.q_star.values],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data):
        weights = np.zeros(int(data["w_star"]["size"]))
        weights[np.asarray(data["w_star"]["indices"], dtype=int)] = [
            float(value) for value in data["w_star"]["values"]
        ]
        q_star = StatVector(
            np.array([float(value) for value in data["q_star"]]),
            int(data["n_contexts"]),
            int(data["n_outcomes"]),
        )
        return cls(
            c=np.array([float(value) for value in data["c"]]),
            s_cl=float(data["s_cl"]),
            s=float(data["s"]),
            gap=float(data["gap"]),
            w_star=ClassicalWeights(weights),
            q_star=q_star,
            iterations=int(data["iterations"]),
            certificate_residual=float(data["certificate_residual"]),
            distance=float(data["distance"]),
            classical=bool(data["classical"]),
            metadata=dict(data.get("metadata", {})),
        )


def _values(p):
    return p.values if isinstance(p, StatVector) else np.asarray(p, dtype=float)


def witness_value(c, p):
    """Witness Statistic S(p) = c . p

    Every S, S_cl and S_obs goes through this one dot product, so values that
    are equal mathematically also compare equal in floating point.

    Parameters
    ----------
    c : array_like
        Witness vector
    p : StatVector or array_like
        Statistics

    Returns
    -------
    float
    """
    c = np.asarray(c, dtype=float)
    values = _values(p)
    if c.shape != values.shape:
        raise ValidationError(
            f"Witness of length {c.size} does not match statistics of length {values.size}"
        )
    return float(np.dot(c, values))


def maximizing_column(c, forward, block_size=None):
    """Index of the Column Maximizing c . a_i, Lowest Index on Ties

    Parameters
    ----------
    c : array_like
        Witness vector
    forward : ForwardMatrix
        Forward matrix
    block_size : int, optional
        Scan the columns in consecutive blocks of this size, reducing the
        block maxima in column order

    Returns
    -------
    int
    """
    if block_size is None:
        return int(np.argmax(forward.scores(c)))
    c = np.asarray(c, dtype=float)
    if c.shape != (forward.dimension,):
        raise ValidationError(
            f"Vector of length {c.size} does not match matrix dimension {forward.dimension}"
        )
    best_index, best_score = -1, -np.inf
    for begin in range(0, forward.num_columns, block_size):
        scores = forward.matrix[:, begin : begin + block_size].T @ c
        local = int(np.argmax(scores))
        if scores[local] > best_score:
            best_index, best_score = begin + local, scores[local]
    return best_index


def s_cl(c, forward, block_size=None):
    """Classical Bound S_cl(c) = max_i c . a_i

    Parameters
    ----------
    c : array_like
        Witness vector of length J*K
    forward : ForwardMatrix
        Forward matrix A
    block_size : int, optional
        Column block size for a blocked scan

    Returns
    -------
    float
    """
    index = maximizing_column(c, forward, block_size)
    return witness_value(c, forward.column(index))


def witness_gap(c, p, forward):
    """Witness Gap Delta(c) = c . p - S_cl(c)"""
    return witness_value(c, p) - s_cl(c, forward)


def uniform_witness(n_contexts, n_outcomes):
    """Deterministic Fallback Witness 1 / sqrt(J K) in Every Entry"""
    dimension = n_contexts * n_outcomes
    return np.full(dimension, 1.0 / np.sqrt(dimension))


def _classical_fit(p, forward, tol):
    """Proportional Fit That Either Reaches p or Proves it Non-Classical

    Every unit vector c gives the weak-duality bound distance >= c . p - S_cl(c),
    so the fit stops as soon as the normalized residual certifies a gap above tol.
    """
    if np.any(p.values < 0):
        return None

    def certified_outside(weights, residual):
        norm = np.linalg.norm(residual)
        if norm <= tol:
            return False
        c = residual / norm
        return witness_value(c, p) - float(forward.scores(c).max()) > tol

    fit = proportional_fit(
        forward, p.values, tol=tol, max_cycles=CERTIFY_MAX_CYCLES, lower_bound=certified_outside
    )
    return fit if fit.converged else None


def optimal_witness(
    p,
    forward,
    tol=DEFAULT_TOLERANCE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    variant=SolverVariant.MIN_NORM_POINT,
):
    """Optimal Unit-Norm Witness via the Nearest Classical Point

    The maximal gap over unit c equals the Euclidean distance from p to the
    column hull, attained at c = (p - q*) / ||p - q*||. A short proportional
    fit runs first; when it reproduces p within tol the statistics are
    certified classical without the solver.

    Parameters
    ----------
    p : StatVector
        Statistics to test
    forward : ForwardMatrix
        Forward matrix A
    tol : float
        Distance tolerance; the solver stops once the certificate residual
        is at most tol
    max_iterations : int
        Solver iteration cap
    variant : SolverVariant or str
        MIN_NORM_POINT, AWAY_STEP or PAIRWISE

    Returns
    -------
    WitnessResult

    Raises
    ------
    NonConvergence
        If the solver does not meet its stopping rule
    """
    if not isinstance(p, StatVector):
        raise ValidationError("optimal_witness expects a StatVector")
    if (p.n_contexts, p.n_outcomes) != (forward.n_contexts, forward.n_outcomes):
        raise ValidationError(
            f"Statistics with {p.n_contexts} x {p.n_outcomes} entries do not match "
            f"matrix with {forward.n_contexts} x {forward.n_outcomes}"
        )
    variant = SolverVariant.parse(variant)
    fit = _classical_fit(p, forward, tol)
    if fit is None:
        result = nearest_point(forward.matrix, p.values, tol, max_iterations, variant)
        raw_weights, point, distance = result.weights, result.point, result.distance
        residual_vector, iterations = result.residual, result.iterations
        duality_gap = result.duality_gap
    else:
        raw_weights = fit.weights / fit.weights.sum()
        point = forward.apply(raw_weights)
        residual_vector = p.values - point
        distance = float(np.linalg.norm(residual_vector))
        iterations = 0
        duality_gap = float(forward.scores(residual_vector).max() - residual_vector @ point)
    weights = ClassicalWeights(raw_weights)
    q_star = StatVector(point, p.n_contexts, p.n_outcomes)

    classical = distance <= tol
    if classical:
        c = uniform_witness(p.n_contexts, p.n_outcomes)
        logger.warning(
            "Statistics are classical within tol %.1e (distance %.3e); using the uniform witness",
            tol,
            distance,
        )
    else:
        c = residual_vector / distance
    bound = s_cl(c, forward)
    value = witness_value(c, p)
    gap = value - bound
    residual = abs(gap - distance)
    metadata = {
        "tol": float(tol),
        "max_iterations": int(max_iterations),
        "variant": variant.value,
        "duality_gap": float(duality_gap),
        "active_columns": int(weights.support.size),
        "fit_cycles": 0 if fit is None else int(fit.cycles),
    }
    logger.info("Witness gap %.6e (distance %.6e, certificate residual %.3e)", gap, distance, residual)
    return WitnessResult(
        c=c,
        s_cl=bound,
        s=value,
        gap=gap,
        w_star=weights,
        q_star=q_star,
        iterations=iterations,
        certificate_residual=residual,
        distance=distance,
        classical=classical,
        metadata=metadata,
    )


def classical_membership(p, forward, tol=DEFAULT_TOLERANCE, **solver_options):
    """True if p Lies in the Classical Polytope Up to tol"""
    return optimal_witness(p, forward, tol, **solver_options).gap <= tol
