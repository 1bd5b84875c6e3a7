"""forward.py

Forward Matrix A Mapping Latent Weights to Concatenated Context Statistics

"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse

from ..exceptions import ValidationError, NegativeMarginal
from ..utilities.functions import array_checksum
from .grid import check_coverage
from .statistics import StatVector, renormalize_blocks
from .wigner import QuantumLatentModel, wigner_fock1, wigner_thermal1

logger = logging.getLogger(__name__)

NEGATIVE_CLIP_TOLERANCE = 1e-6
# clipping below this size is rounding in far-tail strips
CLIP_ROUNDING = 1e-12
FIT_TOLERANCE = 1e-12
FIT_MAX_CYCLES = 5000
FIT_STALL_CYCLES = 50
FIT_STALL_RATIO = 0.99


@dataclass
class ForwardMatrix:
    """
    (J*K) x N Matrix of Conditional Outcome Probabilities per Latent Point

    Column i holds p(y_k | z_i, theta_j) flattened context-major. The matrix is
    kept in CSC form since indicator responses leave only J non-zeros per
    column.

    Attributes
    ----------
    matrix : scipy.sparse.csc_matrix
        The entries A_{(j,k),i}
    n_contexts : int
        Number of contexts J
    n_outcomes : int
        Number of outcomes per context K
    metadata : dict
        Grid, context and binning parameters the matrix was built from
    """

    matrix: sparse.csc_matrix
    n_contexts: int
    n_outcomes: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = sparse.csc_matrix(self.matrix, dtype=float)
        self.matrix.sort_indices()
        if self.matrix.shape[0] != self.n_contexts * self.n_outcomes:
            raise ValidationError(
                f"Matrix with {self.matrix.shape[0]} rows does not match "
                f"{self.n_contexts} contexts x {self.n_outcomes} outcomes"
            )
        data = self.matrix.data
        if data.size and (data.min() < 0.0 or data.max() > 1.0):
            raise ValidationError("Forward matrix entries must lie in [0, 1]")

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def num_columns(self):
        return self.matrix.shape[1]

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def column(self, index):
        """Dense Copy of Column a_i"""
        start, stop = self.matrix.indptr[index], self.matrix.indptr[index + 1]
        values = np.zeros(self.dimension)
        values[self.matrix.indices[start:stop]] = self.matrix.data[start:stop]
        return values

    def scores(self, vector):
        """All Inner Products c . a_i at Once (A^T c)"""
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.dimension,):
            raise ValidationError(
                f"Vector of length {vector.size} does not match matrix dimension {self.dimension}"
            )
        return self.matrix.T @ vector

    def apply(self, weights):
        """Statistics A w of a Latent Weight Vector"""
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.num_columns,):
            raise ValidationError(
                f"Weight vector of length {weights.size} does not match {self.num_columns} columns"
            )
        return self.matrix @ weights

    def column_block_sums(self):
        """(J, N) Array of Per-Context Column Sums"""
        dense_rows = self.matrix.tocoo()
        sums = np.zeros((self.n_contexts, self.num_columns))
        np.add.at(sums, (dense_rows.row // self.n_outcomes, dense_rows.col), dense_rows.data)
        return sums

    def checksum(self):
        """SHA-256 Over the Dense-Equivalent CSC Arrays"""
        return array_checksum(
            np.concatenate(
                [
                    np.asarray(self.matrix.shape, dtype=float),
                    self.matrix.indptr.astype(float),
                    self.matrix.indices.astype(float),
                    self.matrix.data,
                ]
            )
        )


def projections(grid, contexts):
    """Projected Coordinates y = zeta cos(theta_j) + eta sin(theta_j)

    Parameters
    ----------
    grid : LatentGrid
        Latent grid
    contexts : ContextSet
        Projection angles

    Returns
    -------
    array_like
        (J, N) array of projections
    """
    zeta, eta = grid.coordinates()
    angles = contexts.angles
    return np.outer(np.cos(angles), zeta) + np.outer(np.sin(angles), eta)


def build_forward_matrix(grid, contexts, binning):
    """Builds the Indicator Forward Matrix for Radon-Type Readouts

    Each latent point lands in exactly one bin per context, so every column
    has one unit entry per context block.

    Parameters
    ----------
    grid : LatentGrid
        Latent grid with N points
    contexts : ContextSet
        J projection angles
    binning : OutcomeBinning
        K outcome bins

    Returns
    -------
    ForwardMatrix
        (J*K) x N indicator matrix

    Raises
    ------
    ProjectionOutOfRange
        If y_max does not exceed sqrt(2) L, or some grid point projects
        outside [-y_max, y_max]
    """
    check_coverage(grid, binning)
    n_contexts, n_outcomes, n_points = contexts.count, binning.count, grid.num_points
    bins = binning.bin_index(projections(grid, contexts))
    # rows of column i are j*K + bin[j, i], already ascending in j
    rows = (np.arange(n_contexts)[:, None] * n_outcomes + bins).T.ravel()
    indptr = np.arange(n_points + 1) * n_contexts
    data = np.ones(rows.size)
    matrix = sparse.csc_matrix(
        (data, rows, indptr), shape=(n_contexts * n_outcomes, n_points)
    )
    metadata = {
        "grid": grid.metadata(),
        "contexts": contexts.metadata(),
        "binning": binning.metadata(),
    }
    logger.info(
        "Built forward matrix %d x %d (%d non-zeros)",
        matrix.shape[0],
        matrix.shape[1],
        matrix.nnz,
    )
    return ForwardMatrix(matrix, n_contexts, n_outcomes, metadata)


def latent_weights(model, grid):
    """Discretized Latent Quasi-Probabilities W(z_i) * cell_area

    Parameters
    ----------
    model : QuantumLatentModel
        Latent model
    grid : LatentGrid
        Latent grid

    Returns
    -------
    array_like
        Length-N weights (may be negative for nonclassical models)
    """
    zeta, eta = grid.coordinates()
    return model.wigner(zeta, eta) * grid.cell_area


def negativity_boundary(grid):
    """Smallest Thermal Weight beta at Which the Sampled MIX(beta) Weights are Non-Negative

    Cell centres miss the origin, so the sampled weights turn non-negative a
    little below the continuum boundary 3/4.

    Parameters
    ----------
    grid : LatentGrid
        Latent grid

    Returns
    -------
    float
        max over cells with W_fock < 0 of -W_fock / (W_thermal - W_fock)
    """
    zeta, eta = grid.coordinates()
    fock = wigner_fock1(zeta, eta)
    thermal = wigner_thermal1(zeta, eta)
    negative = fock < 0
    if not np.any(negative):
        return 0.0
    return float(np.max(-fock[negative] / (thermal[negative] - fock[negative])))


@dataclass
class ProportionalFit:
    """
    Outcome of an Iterative Proportional Fit

    Attributes
    ----------
    weights : array_like
        Non-negative length-N weights
    mismatch : float
        ||A w - t||_2 after the last cycle
    cycles : int
        Completed sweeps over all contexts
    converged : bool
        Whether the mismatch fell below the tolerance
    """

    weights: np.ndarray
    mismatch: float
    cycles: int
    converged: bool


def proportional_fit(
    forward,
    target,
    initial=None,
    tol=FIT_TOLERANCE,
    max_cycles=FIT_MAX_CYCLES,
    stall_cycles=FIT_STALL_CYCLES,
    lower_bound=None,
):
    """Iterative Proportional Fitting of Non-Negative Weights to Block Targets

    Sweeps over the contexts and rescales the weights so that block j of A w
    matches block j of the target. For indicator matrices this is the classic
    raking step; general stochastic columns get the EM update
    w_i <- w_i sum_k A_ki t_k / (A w)_k. Updates are multiplicative, so the
    weights stay non-negative.

    Parameters
    ----------
    forward : ForwardMatrix
        Response matrix A
    target : array_like
        Non-negative length J*K target
    initial : array_like, optional
        Non-negative starting weights (uniform by default)
    tol : float
        Stop once ||A w - t||_2 <= tol
    max_cycles : int
        Sweep cap
    stall_cycles : int
        Stop when the mismatch shrank by less than 1% over this many sweeps
    lower_bound : callable, optional
        Called with (weights, residual t - A w) after every sweep; the fit
        stops early once it returns True

    Returns
    -------
    ProportionalFit
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (forward.dimension,):
        raise ValidationError(
            f"Target of length {target.size} does not match matrix dimension {forward.dimension}"
        )
    if np.any(target < 0):
        raise ValidationError("Proportional fitting needs a non-negative target")
    if initial is None:
        weights = np.full(forward.num_columns, 1.0 / forward.num_columns)
    else:
        weights = np.array(initial, dtype=float)
        if weights.shape != (forward.num_columns,) or np.any(weights < 0):
            raise ValidationError("Starting weights must be non-negative, one per column")

    rows = forward.matrix.tocsr()
    size = forward.n_outcomes
    blocks = []
    for j in range(forward.n_contexts):
        block = rows[j * size : (j + 1) * size]
        blocks.append((block, block.T.tocsr(), target[j * size : (j + 1) * size]))

    residual = target - forward.apply(weights)
    history = [float(np.linalg.norm(residual))]
    cycles = 0
    while history[-1] > tol and cycles < max_cycles:
        for block, transpose, part in blocks:
            strips = block @ weights
            ratio = np.divide(part, strips, out=np.zeros(size), where=strips > 0)
            weights = weights * (transpose @ ratio)
        cycles += 1
        residual = target - forward.apply(weights)
        history.append(float(np.linalg.norm(residual)))
        if lower_bound is not None and lower_bound(weights, residual):
            break
        if cycles >= stall_cycles and history[-1] > FIT_STALL_RATIO * history[-1 - stall_cycles]:
            break
    mismatch = history[-1]
    logger.debug("Proportional fit: mismatch %.3e after %d cycles", mismatch, cycles)
    return ProportionalFit(weights, mismatch, cycles, mismatch <= tol)


def _strip_targets(model, binning, occupied, total):
    masses = np.where(occupied, model.binned_marginal(binning)[None, :], 0.0)
    return (masses / masses.sum(axis=1, keepdims=True) * total).ravel()


@lru_cache(maxsize=4)
def _consistent_components(grid, contexts, binning):
    forward = build_forward_matrix(grid, contexts, binning)
    fock = latent_weights(QuantumLatentModel.fock1(), grid)
    thermal = latent_weights(QuantumLatentModel.thermal1(), grid)
    occupied = forward.apply(np.ones(forward.num_columns)).reshape(contexts.count, binning.count) > 0

    fock_total = fock.sum()
    if fock_total <= 0:
        logger.warning("Grid too coarse for strip fitting, keeping point-sampled weights")
        return _read_only(fock), _read_only(thermal)

    fit = proportional_fit(
        forward,
        _strip_targets(QuantumLatentModel.thermal1(), binning, occupied, thermal.sum()),
        initial=thermal,
    )
    thermal_fit = fit.weights
    # W_fock + 3 W_thermal >= 0 everywhere, so it can be fitted like a density
    positive = np.maximum(fock + 3.0 * thermal, 0.0)
    positive_target = 3.0 * forward.apply(thermal_fit) + _strip_targets(
        QuantumLatentModel.fock1(), binning, occupied, fock_total
    )
    if np.any(positive_target < 0):
        logger.warning("Grid too coarse for strip fitting, keeping point-sampled weights")
        return _read_only(fock), _read_only(thermal)
    positive_fit = proportional_fit(forward, np.maximum(positive_target, 0.0), initial=positive)

    for name, result in [("thermal", fit), ("Fock", positive_fit)]:
        if not result.converged:
            logger.warning(
                "Strip fitting of the %s weights stopped at mismatch %.3e after %d cycles",
                name,
                result.mismatch,
                result.cycles,
            )
    logger.info(
        "Strip-consistent latent weights after %d + %d fitting cycles", fit.cycles, positive_fit.cycles
    )
    return _read_only(positive_fit.weights - 3.0 * thermal_fit), _read_only(thermal_fit)


def _read_only(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def consistent_weights(model, grid, contexts, binning):
    """Latent Weights Whose Strip Sums Reproduce the Exactly Binned Marginals

    Point-sampling W on the cell centres aliases the negative core of the Fock
    state into whole strips, which leaves binned marginals that no quantum
    state produces. The thermal weights and the non-negative combination
    W_fock + 3 W_thermal are instead fitted to the exact strip masses by
    iterative proportional fitting, starting from their point samples, and
    the Fock weights follow by difference. Hence

    * MIX(beta) weights are (1 - beta) w_fock + beta w_thermal exactly,
    * their strip sums equal the exactly binned marginal on every strip the
      grid reaches, and
    * for beta >= 3/4 they are a non-negative combination of fitted
      non-negative weights.

    The components are cached per (grid, contexts, binning).

    Parameters
    ----------
    model : QuantumLatentModel
        Latent model
    grid : LatentGrid
        Latent grid
    contexts : ContextSet
        Projection angles
    binning : OutcomeBinning
        Outcome bins

    Returns
    -------
    array_like
        Length-N weights
    """
    fock, thermal = _consistent_components(grid, contexts, binning)
    weight = model.thermal_weight
    return (1.0 - weight) * fock + weight * thermal


def binned_statistics(model, grid, contexts, binning, forward=None):
    """Strip Sums A w of the Strip-Consistent Weights Before Clipping

    Parameters
    ----------
    model : QuantumLatentModel
        Latent model
    grid : LatentGrid
        Latent grid
    contexts : ContextSet
        Projection angles
    binning : OutcomeBinning
        Outcome bins
    forward : ForwardMatrix, optional
        Precomputed matrix for the same grid/contexts/binning

    Returns
    -------
    array_like
        Raw length J*K vector
    """
    if forward is None:
        forward = build_forward_matrix(grid, contexts, binning)
    return forward.apply(consistent_weights(model, grid, contexts, binning))


def ideal_statistics(model, grid, contexts, binning, forward=None):
    """Ideal Decoding Statistics p_q of a Latent Model

    Sums the strip-consistent latent weights over the phase-space strip of
    each (context, bin) pair, clips tiny negative strip sums, and renormalizes
    each context block.

    Parameters
    ----------
    model : QuantumLatentModel
        Latent model
    grid : LatentGrid
        Latent grid
    contexts : ContextSet
        Projection angles
    binning : OutcomeBinning
        Outcome bins
    forward : ForwardMatrix, optional
        Precomputed matrix for the same grid/contexts/binning

    Returns
    -------
    StatVector
        p_q

    Raises
    ------
    NegativeMarginal
        If a binned value is below -1e-6
    """
    raw = binned_statistics(model, grid, contexts, binning, forward)
    if np.any(raw < -NEGATIVE_CLIP_TOLERANCE):
        worst = int(np.argmin(raw))
        raise NegativeMarginal(worst, float(raw[worst]))
    clipped = raw < 0.0
    if np.any(raw < -CLIP_ROUNDING):
        logger.warning("Clipped %d slightly negative binned marginals to zero", int(clipped.sum()))
    values = renormalize_blocks(
        np.where(clipped, 0.0, raw), contexts.count, binning.count
    )
    metadata = {
        "grid": grid.metadata(),
        "contexts": contexts.metadata(),
        "binning": binning.metadata(),
    }
    metadata.update(model.metadata())
    metadata["tag"] = model.tag
    return StatVector(values, contexts.count, binning.count, metadata)


def discretization_error(model, grid, contexts, binning, forward=None):
    """Largest Deviation of p_q from the Exactly Binned Quadrature Marginal

    Parameters
    ----------
    model : QuantumLatentModel
        Latent model
    grid : LatentGrid
        Latent grid
    contexts : ContextSet
        Projection angles
    binning : OutcomeBinning
        Outcome bins
    forward : ForwardMatrix, optional
        Precomputed matrix

    Returns
    -------
    float
        max_{j,k} |p_q(k|theta_j) - exact bin mass|
    """
    stats = ideal_statistics(model, grid, contexts, binning, forward)
    exact = model.binned_marginal(binning)
    return float(np.max(np.abs(stats.blocks() - exact[None, :])))


def sampling_error(model, grid, contexts, binning, forward=None):
    """Largest Deviation of Point-Sampled Strip Sums from the Exactly Binned Marginal

    Measures what the strip fitting corrects: the plain cell-centre samples
    W(z_i) * cell_area, summed per strip and renormalized per context.

    Returns
    -------
    float
        max_{j,k} |(A w_sampled)_{jk} / block sum - exact bin mass|
    """
    if forward is None:
        forward = build_forward_matrix(grid, contexts, binning)
    raw = forward.apply(latent_weights(model, grid)).reshape(contexts.count, binning.count)
    sampled = raw / raw.sum(axis=1, keepdims=True)
    return float(np.max(np.abs(sampled - model.binned_marginal(binning)[None, :])))
