"""classicality.py

Classicality Test of Spin-j Activation Statistics Against the Sphere Model

"""
import logging

import numpy as np

from ..phase_space.statistics import StatVector
from ..witness.solver import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, SolverVariant
from ..witness.witness import optimal_witness
from .operators import activation_prob
from .sphere import classical_sphere_matrix, fibonacci_sphere

logger = logging.getLogger(__name__)

DEFAULT_SPHERE_POINTS = 10_000


def spin_statistics(state, directions):
    """Activation Statistics [p(H|n), p(L|n)] for Every Direction

    Parameters
    ----------
    state : SpinState
        Prepared state
    directions : DirectionSet
        Readout contexts

    Returns
    -------
    StatVector
        Length 2 D vector with two-outcome blocks
    """
    high = np.array(
        [
            activation_prob(state, vector, threshold)
            for vector, threshold in zip(directions.vectors, directions.thresholds)
        ]
    )
    values = np.column_stack([high, 1.0 - high]).ravel()
    return StatVector(values, len(directions), 2, {"j": state.j})


def run_spin_test(
    state,
    directions,
    threshold=None,
    sphere_points=None,
    tol=DEFAULT_TOLERANCE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    variant=SolverVariant.MIN_NORM_POINT,
):
    """Optimal Witness of Spin Statistics Against the Deterministic Sphere Model

    Parameters
    ----------
    state : SpinState
        Prepared state
    directions : DirectionSet
        Readout contexts
    threshold : float, optional
        Overrides every direction's threshold
    sphere_points : int or array_like, optional
        Antipodal Fibonacci lattice size, or explicit (N_s, 3) unit vectors
    tol : float
        Solver tolerance
    max_iterations : int
        Solver iteration cap
    variant : SolverVariant or str
        Nearest-point algorithm

    Returns
    -------
    WitnessResult
    """
    if threshold is not None:
        directions = directions.with_threshold(threshold)
    if sphere_points is None:
        sphere_points = DEFAULT_SPHERE_POINTS
    if np.ndim(sphere_points) == 0:
        sphere_points = fibonacci_sphere(int(sphere_points), antipodal=True)
    forward = classical_sphere_matrix(sphere_points, directions, state.j)
    statistics = spin_statistics(state, directions)
    result = optimal_witness(statistics, forward, tol, max_iterations, variant)
    result.metadata.update(
        {"j": state.j, "directions": len(directions), "sphere_points": forward.num_columns}
    )
    logger.info("Spin-%s witness gap %.6e over %d directions", state.j, result.gap, len(directions))
    return result
