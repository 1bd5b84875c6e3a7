"""statistics.py

Concatenated Conditional Probability Vectors p(y_k | theta_j)

"""
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError

BLOCK_SUM_TOLERANCE = 1e-9


@dataclass
class StatVector:
    """
    Length J*K Vector of Conditional Probabilities, Flattened Context-Major

    Entry j*K + k holds p(y_k | theta_j). Construction validates the vector,
    so intermediate (not yet normalized) data stays a plain array.

    Attributes
    ----------
    values : array_like
        The flattened probabilities
    n_contexts : int
        Number of contexts J
    n_outcomes : int
        Number of outcomes per context K
    metadata : dict
        Provenance (model tag, beta, grid, binning, ...)
    """

    values: np.ndarray
    n_contexts: int
    n_outcomes: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n_contexts * self.n_outcomes,):
            raise ValidationError(
                f"StatVector of length {self.values.size} does not match "
                f"{self.n_contexts} contexts x {self.n_outcomes} outcomes"
            )
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValidationError("StatVector entries must be finite and non-negative")
        sums = self.block_sums()
        if np.any(np.abs(sums - 1.0) > BLOCK_SUM_TOLERANCE):
            worst = int(np.argmax(np.abs(sums - 1.0)))
            raise ValidationError(
                f"Context block {worst} sums to {sums[worst]!r}, not 1"
            )

    @property
    def dimension(self):
        return self.values.size

    def blocks(self):
        """(J, K) View of the Probabilities, One Row per Context"""
        return self.values.reshape(self.n_contexts, self.n_outcomes)

    def block_sums(self):
        return self.blocks().sum(axis=1)


def renormalize_blocks(values, n_contexts, n_outcomes):
    """Divides Every Context Block by its Sum

    Parameters
    ----------
    values : array_like
        Non-negative flattened values
    n_contexts : int
        Number of contexts J
    n_outcomes : int
        Number of outcomes K

    Returns
    -------
    array_like
        Values with each block summing to 1
    """
    blocks = np.asarray(values, dtype=float).reshape(n_contexts, n_outcomes)
    sums = blocks.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise ValidationError("Cannot renormalize a context block with zero mass")
    return (blocks / sums).ravel()
