"""operators.py

Spin-j Angular Momentum Operators, Rotations, States and Threshold POVMs

Basis vectors are |j, m> ordered m = j, j-1, ..., -j.

"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, eigvalsh

from ..exceptions import ValidationError
from ..utilities.functions import as_generator

HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10


def check_spin(j):
    """Validates a Positive Integer or Half-Integer Spin and Returns it as a float"""
    doubled = 2.0 * j
    if not np.isfinite(doubled) or doubled < 1 or abs(doubled - round(doubled)) > 1e-12:
        raise ValidationError(f"Spin must be a positive integer or half-integer, got {j}")
    return round(doubled) / 2.0


def dimension(j):
    return int(round(2 * check_spin(j))) + 1


def magnetic_numbers(j):
    """m = j, j-1, ..., -j"""
    j = check_spin(j)
    return j - np.arange(dimension(j))


def ladder_operator(j):
    """Raising Operator J+ With Entries sqrt(j(j+1) - m(m+1))"""
    j = check_spin(j)
    m = magnetic_numbers(j)
    raised = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    return np.diag(raised, k=1).astype(complex)


def spin_operators(j):
    """Returns the Cartesian Spin Operators

    Parameters
    ----------
    j : float
        Spin

    Returns
    -------
    (array_like, array_like, array_like)
        Jx, Jy, Jz as complex (2j+1) x (2j+1) matrices
    """
    raising = ladder_operator(j)
    lowering = raising.conj().T
    jx = (raising + lowering) / 2.0
    jy = (raising - lowering) / 2.0j
    jz = np.diag(magnetic_numbers(j)).astype(complex)
    return jx, jy, jz


def direction_operator(j, direction):
    """n . J for a Unit Vector n"""
    direction = np.asarray(direction, dtype=float)
    jx, jy, jz = spin_operators(j)
    return direction[0] * jx + direction[1] * jy + direction[2] * jz


def wigner_small_d(j, angle):
    """Real Rotation Matrix d^j(angle) = exp(-i angle Jy)

    Parameters
    ----------
    j : float
        Spin
    angle : float
        Rotation angle about y, radians

    Returns
    -------
    array_like
        Real (2j+1) x (2j+1) orthogonal matrix
    """
    raising = ladder_operator(j).real
    # -i angle Jy = -angle (J+ - J-) / 2 is real
    return expm(-0.5 * angle * (raising - raising.T))


def rotation_operator(j, alpha, beta, gamma):
    """U = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz), z-y-z Euler Angles

    Matches the intrinsic "ZYZ" convention of scipy.spatial.transform.Rotation.
    """
    m = magnetic_numbers(j)
    return (
        np.exp(-1j * alpha * m)[:, None]
        * wigner_small_d(j, beta)
        * np.exp(-1j * gamma * m)[None, :]
    )


def direction_angles(direction):
    """Polar and Azimuthal Angles of a Unit Vector"""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if direction.shape != (3,) or abs(norm - 1.0) > 1e-12:
        raise ValidationError(f"Direction must be a unit 3-vector, got {direction}")
    polar = np.arccos(np.clip(direction[2], -1.0, 1.0))
    azimuth = np.arctan2(direction[1], direction[0])
    return polar, azimuth


def direction_basis(j, direction):
    """Columns |j, m>_n: Eigenvectors of n . J With Eigenvalues m = j..-j"""
    polar, azimuth = direction_angles(direction)
    return rotation_operator(j, azimuth, polar, 0.0)


def check_threshold(j, threshold):
    j = check_spin(j)
    if not (-j <= threshold < j):
        raise ValidationError(f"Threshold m_th must lie in [-{j}, {j}), got {threshold}")


def activation_povm(j, direction, threshold=0.0):
    """High/Low Activation POVM of a Directional Threshold Readout

    E_H projects onto the eigenvectors of n . J with m > m_th, E_L onto the rest.

    Parameters
    ----------
    j : float
        Spin
    direction : array_like
        Unit vector n
    threshold : float
        m_th in [-j, j)

    Returns
    -------
    (array_like, array_like)
        E_H and E_L
    """
    check_threshold(j, threshold)
    basis = direction_basis(j, direction)
    high = (magnetic_numbers(j) > threshold).astype(float)
    e_high = (basis * high[None, :]) @ basis.conj().T
    e_low = (basis * (1.0 - high)[None, :]) @ basis.conj().T
    return e_high, e_low


@dataclass
class SpinState:
    """
    Density Matrix of a Spin-j System in the |j, m> Basis

    Attributes
    ----------
    j : float
        Spin
    rho : array_like
        (2j+1) x (2j+1) density matrix
    """

    j: float
    rho: np.ndarray

    def __post_init__(self):
        self.j = check_spin(self.j)
        self.rho = np.asarray(self.rho, dtype=complex)
        size = dimension(self.j)
        if self.rho.shape != (size, size):
            raise ValidationError(f"Density matrix must be {size} x {size}, got {self.rho.shape}")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > HERMITIAN_TOLERANCE:
            raise ValidationError("Density matrix is not Hermitian")
        if abs(np.trace(self.rho) - 1.0) > TRACE_TOLERANCE:
            raise ValidationError("Density matrix does not have unit trace")
        if eigvalsh(self.rho).min() < -PSD_TOLERANCE:
            raise ValidationError("Density matrix is not positive semidefinite")

    @classmethod
    def pure(cls, j, vector):
        vector = np.asarray(vector, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        return cls(j, np.outer(vector, vector.conj()))

    @classmethod
    def basis(cls, j, m):
        """|j, m><j, m|"""
        numbers = magnetic_numbers(j)
        index = np.flatnonzero(np.isclose(numbers, m))
        if index.size != 1:
            raise ValidationError(f"m = {m} is not a magnetic number of spin {j}")
        vector = np.zeros(numbers.size, dtype=complex)
        vector[index[0]] = 1.0
        return cls.pure(j, vector)

    @classmethod
    def coherent(cls, j, polar, azimuth):
        """Spin-Coherent State |j, j> Rotated to Point Along (polar, azimuth)"""
        return cls.pure(j, rotation_operator(j, azimuth, polar, 0.0)[:, 0])

    @classmethod
    def maximally_mixed(cls, j):
        size = dimension(j)
        return cls(j, np.eye(size) / size)

    @classmethod
    def haar_random(cls, j, rng):
        rng = as_generator(rng)
        size = dimension(j)
        vector = rng.normal(size=size) + 1j * rng.normal(size=size)
        return cls.pure(j, vector)

    def rotated(self, operator):
        """U rho U^dagger"""
        rho = operator @ self.rho @ operator.conj().T
        return SpinState(self.j, (rho + rho.conj().T) / 2.0)


def activation_prob(state, direction, threshold=0.0):
    """Probability Tr(rho E_H) of the High Outcome, Clipped to [0, 1]"""
    e_high, _ = activation_povm(state.j, direction, threshold)
    return float(np.clip(np.real(np.trace(state.rho @ e_high)), 0.0, 1.0))
