"""solver.py

Nearest-Point Solvers Over the Convex Hull of the Matrix Columns

Minimizes 0.5 * ||p - A w||^2 over the probability simplex, either with
Frank-Wolfe (away-step or pairwise), whose linear minimization oracle is a
single argmax over A^T (p - A w), or with an exact active-set min-norm-point
method that keeps a QR factorization of the active columns.

"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import LinAlgError, qr, qr_delete, qr_insert, solve_triangular

from ..exceptions import ValidationError, NonConvergence

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 200_000
REFRESH_INTERVAL = 500
# Gap values below this many ulps of the score scale are rounding noise
GAP_ROUNDING_ULPS = 64.0
# columns closer than this (relative) to the span of the active set are skipped
DEPENDENCE_RCOND = 1e-10


class SolverVariant(Enum):
    """
    Enum Class for the Supported Nearest-Point Algorithms
    """

    MIN_NORM_POINT = "MIN_NORM_POINT"
    AWAY_STEP = "AWAY_STEP"
    PAIRWISE = "PAIRWISE"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValidationError(f"Not a known solver variant '{value}'")


@dataclass
class SolverResult:
    """
    Nearest Classical Point Found by the Solver

    Attributes
    ----------
    weights : array_like
        Length-N simplex weights w*
    point : array_like
        A w*, recomputed from the weights
    residual : array_like
        p - A w*
    distance : float
        ||p - A w*||_2
    duality_gap : float
        Frank-Wolfe gap max_i a_i . r - (A w) . r at the returned iterate
    iterations : int
        Number of steps (Frank-Wolfe) or column additions (min-norm point)
    variant : SolverVariant
        Algorithm used
    """

    weights: np.ndarray
    point: np.ndarray
    residual: np.ndarray
    distance: float
    duality_gap: float
    iterations: int
    variant: SolverVariant


def column_norms_squared(matrix):
    return np.asarray(matrix.multiply(matrix).sum(axis=0)).ravel()


def nearest_vertex(matrix, target):
    """Column Closest to the Target, Lowest Index on Ties"""
    scores = matrix.T @ target - 0.5 * column_norms_squared(matrix)
    return int(np.argmax(scores))


def _dense_column(matrix, index, size):
    start, stop = matrix.indptr[index], matrix.indptr[index + 1]
    column = np.zeros(size)
    column[matrix.indices[start:stop]] = matrix.data[start:stop]
    return column


def _check_problem(matrix, target, tol, max_iterations):
    if tol <= 0:
        raise ValidationError(f"Solver tolerance must be positive, got {tol}")
    if max_iterations < 1:
        raise ValidationError(f"Iteration cap must be at least 1, got {max_iterations}")
    target = np.asarray(target, dtype=float)
    if target.shape != (matrix.shape[0],):
        raise ValidationError(
            f"Target of length {target.size} does not match {matrix.shape[0]} matrix rows"
        )
    return target


def converged(gap, distance, along, best, tol):
    """Shared Stopping Rule of the Nearest-Point Solvers

    With c = r / ||r|| the witness gap falls short of the distance by exactly
    gap / distance, so gap <= tol * distance bounds the certificate residual
    by tol. Gaps at rounding level of the scores also stop.

    Parameters
    ----------
    gap : float
        Frank-Wolfe gap max_i a_i . r - (A w) . r
    distance : float
        ||r||_2
    along : float
        (A w) . r
    best : float
        max_i a_i . r
    tol : float
        Distance tolerance

    Returns
    -------
    bool
    """
    floor = GAP_ROUNDING_ULPS * np.finfo(float).eps * (abs(along) + abs(best))
    return gap <= max(tol * tol, tol * distance, floor) or distance <= tol


def frank_wolfe(
    matrix,
    target,
    tol=DEFAULT_TOLERANCE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    variant=SolverVariant.AWAY_STEP,
):
    """Projects a Target Vector Onto the Convex Hull of the Columns of A

    Stops by the shared rule of converged: the duality gap is at most
    max(tol^2, tol * distance) or at rounding level, or the residual norm is
    at most tol.

    Parameters
    ----------
    matrix : scipy.sparse.csc_matrix
        (D, N) matrix whose columns span the polytope
    target : array_like
        Length-D point p
    tol : float
        Distance tolerance
    max_iterations : int
        Iteration cap
    variant : SolverVariant or str
        AWAY_STEP or PAIRWISE

    Returns
    -------
    SolverResult

    Raises
    ------
    NonConvergence
        If the stopping rule is not met within max_iterations
    """
    variant = SolverVariant.parse(variant)
    if variant == SolverVariant.MIN_NORM_POINT:
        raise ValidationError("frank_wolfe runs AWAY_STEP or PAIRWISE; use nearest_point for MIN_NORM_POINT")
    target = _check_problem(matrix, target, tol, max_iterations)
    size, n_columns = matrix.shape

    start = nearest_vertex(matrix, target)
    weights = np.zeros(n_columns)
    weights[start] = 1.0
    point = _dense_column(matrix, start, size)
    gap = np.inf
    iterations = 0

    while True:
        residual = target - point
        distance = float(np.linalg.norm(residual))
        scores = matrix.T @ residual
        toward = int(np.argmax(scores))
        along = float(residual @ point)
        gap = float(scores[toward] - along)
        if converged(gap, distance, along, float(scores[toward]), tol):
            break
        if iterations >= max_iterations:
            raise NonConvergence(iterations, gap, distance)

        active = np.flatnonzero(weights > 0.0)
        away = int(active[np.argmin(scores[active])])
        away_gap = along - float(scores[away])
        vertex = _dense_column(matrix, toward, size)

        if variant == SolverVariant.PAIRWISE:
            direction = vertex - _dense_column(matrix, away, size)
            step_max = weights[away]
            kind = "pairwise"
        elif gap >= away_gap:
            direction = vertex - point
            step_max = 1.0
            kind = "toward"
        else:
            direction = point - _dense_column(matrix, away, size)
            step_max = weights[away] / (1.0 - weights[away])
            kind = "away"

        norm_squared = float(direction @ direction)
        if norm_squared == 0.0:
            # toward and away vertices coincide; nothing left to move
            break
        step = min(max(float(residual @ direction) / norm_squared, 0.0), step_max)

        if kind == "toward":
            weights *= 1.0 - step
            weights[toward] += step
        elif kind == "away":
            weights *= 1.0 + step
            weights[away] -= step
            if step == step_max:
                weights[away] = 0.0
        else:
            weights[toward] += step
            weights[away] -= step
            if step == step_max:
                weights[away] = 0.0
        np.maximum(weights, 0.0, out=weights)
        point = point + step * direction
        iterations += 1

        if iterations % REFRESH_INTERVAL == 0:
            weights /= weights.sum()
            point = matrix @ weights
            logger.debug(
                "Iteration %d: distance %.6e, gap %.3e, %d active columns",
                iterations,
                distance,
                gap,
                active.size,
            )

    weights /= weights.sum()
    point = matrix @ weights
    residual = target - point
    distance = float(np.linalg.norm(residual))
    logger.info(
        "Frank-Wolfe (%s) stopped after %d iterations: distance %.6e, gap %.3e",
        variant.value,
        iterations,
        distance,
        gap,
    )
    return SolverResult(weights, point, residual, distance, gap, iterations, variant)


def _extended_column(matrix, index, target):
    return np.append(_dense_column(matrix, index, target.size) - target, 1.0)


def _factorize(matrix, target, passive):
    columns = np.column_stack([_extended_column(matrix, index, target) for index in passive])
    return qr(columns, mode="economic", check_finite=False)


def _drop_column(q, r, position, matrix, target, passive):
    # passive already excludes the dropped column
    try:
        q, r = qr_delete(q, r, position, which="col", check_finite=False)
    except ValueError:
        return _factorize(matrix, target, passive)
    size = len(passive)
    return q[:, :size], r[:size, :size]


def _least_squares(q, r):
    # argmin ||E_P z - f|| with f the last unit vector: R z = Q^T f
    return solve_triangular(r, q[-1], check_finite=False)


def min_norm_point(
    matrix,
    target,
    tol=DEFAULT_TOLERANCE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
):
    """Exact Nearest Point of the Column Hull by Active-Set Least Squares

    With e_i = (a_i - p, 1) and f = (0, ..., 0, 1), the non-negative least
    squares problem min ||E v - f|| over v >= 0 has its solution at
    v = w* / (1 + d*^2), where w* is the nearest simplex point and d* its
    distance, so w* = v / sum(v). The Lawson-Hanson active-set method solves
    it: each outer step adds the column of largest positive gradient, and the
    inner loop steps back along the segment to the unconstrained solution
    until every active weight is positive. The active columns are kept in an
    economic QR factorization updated one column at a time.

    Parameters
    ----------
    matrix : scipy.sparse.csc_matrix
        (D, N) matrix whose columns span the polytope
    target : array_like
        Length-D point p
    tol : float
        Distance tolerance
    max_iterations : int
        Cap on column additions

    Returns
    -------
    SolverResult

    Raises
    ------
    NonConvergence
        If the stopping rule is not met within max_iterations
    """
    target = _check_problem(matrix, target, tol, max_iterations)
    n_columns = matrix.shape[1]

    start = nearest_vertex(matrix, target)
    passive = [start]
    q, r = _factorize(matrix, target, passive)
    scaled = np.zeros(n_columns)
    scaled[start] = _least_squares(q, r)[0]
    rejected = np.zeros(n_columns, dtype=bool)
    iterations = 0

    while True:
        mass = scaled.sum()
        weights = scaled / mass
        point = matrix @ weights
        residual = target - point
        distance = float(np.linalg.norm(residual))
        scores = matrix.T @ residual
        along = float(residual @ point)
        best = float(scores.max())
        gap = best - along
        if converged(gap, distance, along, best, tol):
            break

        # gradient of the least squares objective, halved and negated
        gradient = mass * (scores - float(residual @ target)) + (1.0 - mass)
        gradient[passive] = -np.inf
        gradient[rejected] = -np.inf
        toward = int(np.argmax(gradient))
        if not gradient[toward] > 0.0:
            logger.warning(
                "Min-norm-point solver has no improving column left (gap %.3e, distance %.6e)",
                gap,
                distance,
            )
            break
        if iterations >= max_iterations:
            raise NonConvergence(iterations, gap, distance)
        iterations += 1

        try:
            q_next, r_next = qr_insert(
                q,
                r,
                _extended_column(matrix, toward, target),
                len(passive),
                which="col",
                rcond=DEPENDENCE_RCOND,
                check_finite=False,
            )
        except (LinAlgError, ValueError):
            # dependent on the active columns, or the active set already spans
            rejected[toward] = True
            continue
        solution = _least_squares(q_next, r_next)
        if solution[-1] <= 0.0:
            rejected[toward] = True
            continue
        q, r = q_next, r_next
        passive.append(toward)
        current = scaled[passive]

        while np.any(solution <= 0.0):
            negative = np.flatnonzero(solution <= 0.0)
            steps = current[negative] / (current[negative] - solution[negative])
            step = float(steps.min())
            current = current + step * (solution - current)
            current[negative[steps == step]] = 0.0
            for position in np.flatnonzero(current <= 0.0)[::-1]:
                del passive[position]
                q, r = _drop_column(q, r, position, matrix, target, passive)
            current = current[current > 0.0]
            solution = _least_squares(q, r)

        scaled[:] = 0.0
        scaled[passive] = solution
        rejected[:] = False

        if iterations % REFRESH_INTERVAL == 0:
            q, r = _factorize(matrix, target, passive)
            logger.debug(
                "Iteration %d: distance %.6e, gap %.3e, %d active columns",
                iterations,
                distance,
                gap,
                len(passive),
            )

    weights = scaled / scaled.sum()
    point = matrix @ weights
    residual = target - point
    distance = float(np.linalg.norm(residual))
    logger.info(
        "Min-norm point stopped after %d column additions: distance %.6e, gap %.3e, %d active columns",
        iterations,
        distance,
        gap,
        len(passive),
    )
    return SolverResult(
        weights, point, residual, distance, gap, iterations, SolverVariant.MIN_NORM_POINT
    )


def nearest_point(
    matrix,
    target,
    tol=DEFAULT_TOLERANCE,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    variant=SolverVariant.MIN_NORM_POINT,
):
    """Nearest Point of the Column Hull With the Selected Algorithm

    Parameters
    ----------
    matrix : scipy.sparse.csc_matrix
        (D, N) matrix whose columns span the polytope
    target : array_like
        Length-D point p
    tol : float
        Distance tolerance
    max_iterations : int
        Iteration cap
    variant : SolverVariant or str
        MIN_NORM_POINT, AWAY_STEP or PAIRWISE

    Returns
    -------
    SolverResult
    """
    variant = SolverVariant.parse(variant)
    if variant == SolverVariant.MIN_NORM_POINT:
        return min_norm_point(matrix, target, tol, max_iterations)
    return frank_wolfe(matrix, target, tol, max_iterations, variant)
