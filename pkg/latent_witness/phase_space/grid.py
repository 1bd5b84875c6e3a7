"""grid.py

Latent Phase-Space Grids, Readout Contexts and Outcome Binnings

"""
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError, ProjectionOutOfRange

DEFAULT_Y_MAX_FACTOR = 1.05


@dataclass(frozen=True)
class LatentGrid:
    """
    Uniform n x n Grid of Cell Centres Over the Square [-L, L]^2

    Points are ordered row-major with zeta varying fastest, so point i sits at
    (zeta[i % n], eta[i // n]).

    Attributes
    ----------
    half_width : float
        Half width L of the square, in quadrature units
    points_per_axis : int
        Number of cells n along each axis
    """

    half_width: float = 4.0
    points_per_axis: int = 100

    def __post_init__(self):
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise ValidationError(f"Grid half width must be positive, got {self.half_width}")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 1:
            raise ValidationError(
                f"Grid points per axis must be a positive integer, got {self.points_per_axis}"
            )

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def cell_area(self):
        return self.spacing ** 2

    @property
    def num_points(self):
        return self.points_per_axis ** 2

    @property
    def axis(self):
        """Cell-Centre Coordinates Along One Axis, Ascending"""
        n = self.points_per_axis
        return -self.half_width + (np.arange(n) + 0.5) * self.spacing

    @property
    def points(self):
        """(N, 2) Array of (zeta, eta) Coordinates in Row-Major Order"""
        zeta, eta = self.coordinates()
        return np.column_stack([zeta, eta])

    def coordinates(self):
        """Returns the Flattened zeta and eta Coordinate Arrays

        Returns
        -------
        (array_like, array_like)
            zeta and eta, each of length N
        """
        axis = self.axis
        eta, zeta = np.meshgrid(axis, axis, indexing="ij")
        return zeta.ravel(), eta.ravel()

    def metadata(self):
        return {"half_width": float(self.half_width), "points_per_axis": int(self.points_per_axis)}


@dataclass(frozen=True)
class ContextSet:
    """
    Projection Angles theta_j = j * pi / J for j = 1..J
    """

    count: int = 25

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValidationError(f"Number of contexts must be a positive integer, got {self.count}")

    @property
    def angles(self):
        return np.arange(1, self.count + 1) * np.pi / self.count

    def metadata(self):
        return {"count": int(self.count)}


@dataclass(frozen=True)
class OutcomeBinning:
    """
    K Uniform Outcome Bins Over [-y_max, y_max]

    Edges are built as y_max * (2k - K) / K, so for even K the centre edge is
    exactly zero. A value on an interior edge belongs to the higher bin.

    Attributes
    ----------
    count : int
        Number of bins K
    y_max : float
        Half width of the binned interval, in quadrature units
    """

    count: int = 100
    y_max: float = field(default=DEFAULT_Y_MAX_FACTOR * np.sqrt(2.0) * 4.0)

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValidationError(f"Number of bins must be a positive integer, got {self.count}")
        if not np.isfinite(self.y_max) or self.y_max <= 0:
            raise ValidationError(f"y_max must be positive, got {self.y_max}")

    @classmethod
    def for_grid(cls, grid, count=100, y_max_factor=DEFAULT_Y_MAX_FACTOR):
        """Builds the Binning Covering a Grid, y_max = factor * sqrt(2) * L

        Parameters
        ----------
        grid : LatentGrid
            Grid whose projections should be covered
        count : int
            Number of bins K
        y_max_factor : float
            Multiple of sqrt(2) * L used as y_max

        Returns
        -------
        OutcomeBinning
        """
        return cls(count=count, y_max=y_max_factor * np.sqrt(2.0) * grid.half_width)

    @property
    def width(self):
        return 2.0 * self.y_max / self.count

    @property
    def edges(self):
        k = np.arange(self.count + 1)
        return self.y_max * (2.0 * k - self.count) / self.count

    def bin_index(self, y):
        """Assigns Projected Values to Bins

        Parameters
        ----------
        y : array_like
            Projected coordinates

        Returns
        -------
        array_like
            Integer bin indices in [0, K-1]

        Raises
        ------
        ProjectionOutOfRange
            If any value lies outside [-y_max, y_max]
        """
        y = np.asarray(y, dtype=float)
        outside = np.abs(y) > self.y_max
        if np.any(outside):
            worst = float(np.max(np.abs(y[outside])))
            raise ProjectionOutOfRange(
                f"Projection {worst:.6f} lies outside [-{self.y_max:.6f}, {self.y_max:.6f}]"
            )
        index = np.searchsorted(self.edges, y, side="right") - 1
        return np.clip(index, 0, self.count - 1)

    def metadata(self):
        return {"count": int(self.count), "y_max": float(self.y_max)}


def check_coverage(grid, binning):
    """Requires y_max > sqrt(2) L, So Every Projection of the Square Fits

    Raises
    ------
    ProjectionOutOfRange
        If the binning is too narrow for the grid
    """
    reach = np.sqrt(2.0) * grid.half_width
    if binning.y_max <= reach:
        raise ProjectionOutOfRange(
            f"y_max {binning.y_max:.6f} does not exceed sqrt(2) * L = {reach:.6f}"
        )
