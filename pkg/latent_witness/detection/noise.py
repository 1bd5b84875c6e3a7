"""noise.py

Classical Admixture, Gaussian Observation Noise and Block-Simplex Projection

"""
from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidationError
from ..phase_space.statistics import StatVector
from ..utilities.functions import as_generator
from ..witness.witness import maximizing_column


@dataclass
class NoiseRealization:
    """
    Isotropic Gaussian Noise Vector xi With Standard Deviation sigma
    """

    xi: np.ndarray
    sigma: float

    @classmethod
    def draw(cls, dimension, sigma, rng):
        check_sigma(sigma)
        rng = as_generator(rng)
        return cls(rng.normal(0.0, sigma, size=dimension), float(sigma))

    @property
    def dimension(self):
        return self.xi.size


def check_sigma(sigma):
    if not np.isfinite(sigma) or sigma < 0:
        raise ValidationError(f"Noise scale sigma must be non-negative, got {sigma}")


def check_alpha(alpha):
    if not (0.0 <= alpha <= 1.0):
        raise ValidationError(f"Admixture alpha must lie in [0, 1], got {alpha}")


def project_blocks(values, n_outcomes):
    """Euclidean Projection of Every Length-K Block Onto the Probability Simplex

    Sort-based: for each block the threshold tau solves sum(max(v - tau, 0)) = 1.

    Parameters
    ----------
    values : array_like
        Array whose last axis has a multiple of K entries
    n_outcomes : int
        Block length K

    Returns
    -------
    array_like
        Projected values, same shape as the input
    """
    values = np.asarray(values, dtype=float)
    blocks = values.reshape(-1, n_outcomes)
    ordered = -np.sort(-blocks, axis=1)
    cumulative = np.cumsum(ordered, axis=1) - 1.0
    ranks = np.arange(1, n_outcomes + 1)
    support = np.count_nonzero(ordered - cumulative / ranks > 0, axis=1)
    threshold = cumulative[np.arange(blocks.shape[0]), support - 1] / support
    return np.maximum(blocks - threshold[:, None], 0.0).reshape(values.shape)


def classical_saturator(forward, c):
    """Vertex a_i* Attaining the Classical Bound of Witness c

    Parameters
    ----------
    forward : ForwardMatrix
        Forward matrix A
    c : array_like
        Witness vector

    Returns
    -------
    StatVector
        p_cl = a_i*, with i* stored in the metadata
    """
    index = maximizing_column(c, forward)
    return StatVector(
        forward.column(index),
        forward.n_contexts,
        forward.n_outcomes,
        {"column": index},
    )


def mix_alpha(p_q, p_cl, alpha):
    """Worst-Case Admixture (1 - alpha) p_q + alpha p_cl"""
    check_alpha(alpha)
    if p_q.dimension != p_cl.dimension:
        raise ValidationError("Cannot mix statistics of different dimension")
    values = (1.0 - alpha) * p_q.values + alpha * p_cl.values
    return StatVector(values, p_q.n_contexts, p_q.n_outcomes, {"alpha": float(alpha)})


def observe(p_alpha, sigma, rng):
    """Noisy Observation Projected Back Onto Valid Conditional Distributions

    Parameters
    ----------
    p_alpha : StatVector
        Noise-free statistics
    sigma : float
        Standard deviation per entry
    rng : np.random.Generator or int
        Random source

    Returns
    -------
    StatVector
        p_obs (the input itself when sigma is zero)
    """
    check_sigma(sigma)
    if sigma == 0:
        return p_alpha
    noise = NoiseRealization.draw(p_alpha.dimension, sigma, rng)
    projected = project_blocks(p_alpha.values + noise.xi, p_alpha.n_outcomes)
    return StatVector(projected, p_alpha.n_contexts, p_alpha.n_outcomes, dict(p_alpha.metadata))
