"""sphere.py

Readout Directions and the Deterministic-Threshold Latent Model on the Sphere

"""
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..exceptions import ValidationError
from ..phase_space.forward import ForwardMatrix
from .operators import check_spin, check_threshold

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def fibonacci_sphere(count, antipodal=False):
    """Near-Uniform Fibonacci Lattice of Unit Vectors

    Parameters
    ----------
    count : int
        Number of points
    antipodal : bool
        Build count / 2 lattice points and append their antipodes, so every
        hemisphere not containing a point on its boundary holds exactly half

    Returns
    -------
    array_like
        (count, 3) unit vectors
    """
    if int(count) != count or count < 1:
        raise ValidationError(f"Sphere point count must be a positive integer, got {count}")
    if antipodal:
        if count % 2:
            raise ValidationError("An antipodal lattice needs an even number of points")
        half = fibonacci_sphere(count // 2)
        return np.vstack([half, -half])
    index = np.arange(count)
    z = 1.0 - (2.0 * index + 1.0) / count
    radius = np.sqrt(1.0 - z ** 2)
    azimuth = GOLDEN_ANGLE * index
    points = np.column_stack([radius * np.cos(azimuth), radius * np.sin(azimuth), z])
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def unit_vectors(polar, azimuth):
    """Unit Vectors From Polar and Azimuthal Angles (Radians)"""
    polar = np.asarray(polar, dtype=float)
    azimuth = np.asarray(azimuth, dtype=float)
    return np.stack(
        [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)],
        axis=-1,
    )


@dataclass
class DirectionSet:
    """
    Readout Directions n_theta, Each With its Own Threshold m_th

    Attributes
    ----------
    vectors : array_like
        (D, 3) unit vectors
    thresholds : array_like
        D thresholds in spin-projection units
    """

    vectors: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        self.thresholds = np.broadcast_to(
            np.asarray(self.thresholds, dtype=float), (self.vectors.shape[0],)
        ).copy()
        if self.vectors.shape[1] != 3 or self.vectors.shape[0] < 1:
            raise ValidationError("Directions must be a non-empty (D, 3) array")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValidationError("Every direction must be a unit vector")

    def __len__(self):
        return self.vectors.shape[0]

    @classmethod
    def from_angles(cls, polar, azimuth, thresholds=0.0):
        return cls(unit_vectors(polar, azimuth), thresholds)

    @classmethod
    def fibonacci(cls, count, threshold=0.0):
        return cls(fibonacci_sphere(count), threshold)

    @classmethod
    def rings(cls, per_ring, polar_angles, threshold=0.0):
        """Evenly Spaced Directions on Circles of Constant Polar Angle

        A polar angle of pi / 2 gives a great circle.
        """
        azimuth = np.arange(per_ring) * 2.0 * np.pi / per_ring
        polar = np.repeat(np.asarray(polar_angles, dtype=float), per_ring)
        return cls.from_angles(polar, np.tile(azimuth, len(polar_angles)), threshold)

    def with_threshold(self, threshold):
        return DirectionSet(self.vectors.copy(), threshold)

    def rotated(self, rotation):
        """Applies a scipy.spatial.transform.Rotation to Every Direction"""
        return DirectionSet(rotation.apply(self.vectors), self.thresholds.copy())

    def angles(self):
        """(polar, azimuth) Arrays of the Directions"""
        polar = np.arccos(np.clip(self.vectors[:, 2], -1.0, 1.0))
        azimuth = np.arctan2(self.vectors[:, 1], self.vectors[:, 0])
        return polar, azimuth


def classical_sphere_matrix(sphere_points, directions, j):
    """Forward Matrix of Deterministic Threshold Responses on the Sphere

    Latent direction Omega_i answers H under context n_theta iff
    j (n_theta . Omega_i) > m_th. Each context block is [H, L].

    Parameters
    ----------
    sphere_points : array_like
        (N_s, 3) latent unit vectors
    directions : DirectionSet
        Readout contexts with thresholds
    j : float
        Spin

    Returns
    -------
    ForwardMatrix
        (2 D) x N_s indicator matrix
    """
    j = check_spin(j)
    for threshold in directions.thresholds:
        check_threshold(j, threshold)
    sphere_points = np.asarray(sphere_points, dtype=float)
    n_points, n_contexts = sphere_points.shape[0], len(directions)
    high = j * (directions.vectors @ sphere_points.T) > directions.thresholds[:, None]
    # H is row 2j of a block, L row 2j + 1
    rows = (2 * np.arange(n_contexts)[:, None] + (~high).astype(int)).T.ravel()
    indptr = np.arange(n_points + 1) * n_contexts
    matrix = sparse.csc_matrix(
        (np.ones(rows.size), rows, indptr), shape=(2 * n_contexts, n_points)
    )
    metadata = {"j": j, "sphere_points": int(n_points), "directions": int(n_contexts)}
    return ForwardMatrix(matrix, n_contexts, 2, metadata)
