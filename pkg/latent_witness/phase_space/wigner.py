"""wigner.py

Closed-Form Wigner Functions and Quadrature Marginals of the Latent Models

Conventions follow the vacuum-variance-1/4 scaling, where the single-photon
Fock state reads W(z, e) = (2/pi) [4 (z^2 + e^2) - 1] exp[-2 (z^2 + e^2)].

"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erf

from ..exceptions import ValidationError

FOCK1_ORIGIN = -2.0 / np.pi
THERMAL1_ORIGIN = 2.0 / (3.0 * np.pi)
# (1 - beta) * W_fock(0) + beta * W_thermal(0) = 0
NEGATIVITY_BOUNDARY = 0.75
THERMAL_MEAN_PHOTONS = 1.0
# truncation of the geometric thermal populations, tail mass 2^-(n_max + 1)
PHOTON_CUTOFF = 200


class ModelVariant(Enum):
    """
    Enum Class for the Latent Quantum Models
    """

    FOCK1 = "FOCK1"
    THERMAL1 = "THERMAL1"
    MIX = "MIX"


def wigner_fock1(zeta, eta):
    """Wigner Function of the Single-Photon Fock State

    Parameters
    ----------
    zeta : float or array_like
        First quadrature
    eta : float or array_like
        Second quadrature

    Returns
    -------
    float or array_like
        (2/pi) [4 r^2 - 1] exp(-2 r^2)
    """
    r2 = np.square(zeta) + np.square(eta)
    return (2.0 / np.pi) * (4.0 * r2 - 1.0) * np.exp(-2.0 * r2)


def wigner_thermal1(zeta, eta):
    """Wigner Function of the Thermal State With Mean Photon Number 1

    Parameters
    ----------
    zeta : float or array_like
        First quadrature
    eta : float or array_like
        Second quadrature

    Returns
    -------
    float or array_like
        (2 / (3 pi)) exp(-2 r^2 / 3)
    """
    r2 = np.square(zeta) + np.square(eta)
    return (2.0 / (3.0 * np.pi)) * np.exp(-2.0 * r2 / 3.0)


def check_beta(beta):
    if not (0.0 <= beta <= 1.0):
        raise ValidationError(f"Mixing parameter beta must lie in [0, 1], got {beta}")


def wigner_mix(beta, zeta, eta):
    """Wigner Function of (1 - beta)|1><1| + beta rho_th(1)

    Parameters
    ----------
    beta : float
        Thermal weight in [0, 1]
    zeta : float or array_like
        First quadrature
    eta : float or array_like
        Second quadrature

    Returns
    -------
    float or array_like
        Convex combination of the Fock and thermal Wigner functions
    """
    check_beta(beta)
    return (1.0 - beta) * wigner_fock1(zeta, eta) + beta * wigner_thermal1(zeta, eta)


def marginal_fock1(y):
    """Quadrature Marginal |<y|1>|^2 = 4 sqrt(2/pi) y^2 exp(-2 y^2)"""
    y = np.asarray(y, dtype=float)
    return 4.0 * np.sqrt(2.0 / np.pi) * y ** 2 * np.exp(-2.0 * y ** 2)


def marginal_thermal1(y):
    """Quadrature Marginal of the n = 1 Thermal State, a Gaussian of Variance 3/4"""
    y = np.asarray(y, dtype=float)
    return np.sqrt(2.0 / (3.0 * np.pi)) * np.exp(-2.0 * y ** 2 / 3.0)


def _fock1_cdf(y):
    return 0.5 * erf(np.sqrt(2.0) * y) - np.sqrt(2.0 / np.pi) * y * np.exp(-2.0 * y ** 2)


def _thermal1_cdf(y):
    return 0.5 * erf(np.sqrt(2.0 / 3.0) * y)


def thermal_populations(mean_photons, n_max):
    """Photon-Number Populations of a Thermal State

    Parameters
    ----------
    mean_photons : float
        Mean photon number nbar
    n_max : int
        Largest photon number returned

    Returns
    -------
    array_like
        nbar^n / (nbar + 1)^(n + 1) for n = 0..n_max
    """
    n = np.arange(n_max + 1)
    return mean_photons ** n / (mean_photons + 1.0) ** (n + 1)


@dataclass(frozen=True)
class QuantumLatentModel:
    """
    Latent Quasi-Probability Model Selected by Variant Tag and beta

    Attributes
    ----------
    variant : ModelVariant
        FOCK1, THERMAL1 or MIX
    beta : float
        Thermal weight of the mixture (ignored by the pure variants)
    """

    variant: ModelVariant = ModelVariant.FOCK1
    beta: float = 0.0

    def __post_init__(self):
        if not isinstance(self.variant, ModelVariant):
            try:
                object.__setattr__(self, "variant", ModelVariant(str(self.variant).upper()))
            except ValueError:
                raise ValidationError(f"Not a known latent model '{self.variant}'")
        check_beta(self.beta)

    @classmethod
    def fock1(cls):
        return cls(ModelVariant.FOCK1, 0.0)

    @classmethod
    def thermal1(cls):
        return cls(ModelVariant.THERMAL1, 1.0)

    @classmethod
    def mix(cls, beta):
        return cls(ModelVariant.MIX, beta)

    @property
    def thermal_weight(self):
        if self.variant == ModelVariant.FOCK1:
            return 0.0
        if self.variant == ModelVariant.THERMAL1:
            return 1.0
        return float(self.beta)

    @property
    def tag(self):
        if self.variant == ModelVariant.MIX:
            return f"MIX({self.beta!r})"
        return self.variant.value

    def photon_distribution(self, n_max=PHOTON_CUTOFF):
        """Photon-Number Populations P(n) of the Model

        Parameters
        ----------
        n_max : int
            Largest photon number returned (at least 1)

        Returns
        -------
        array_like
            (1 - beta) delta(n, 1) + beta nbar^n / (nbar + 1)^(n + 1) with
            nbar = 1, for n = 0..n_max
        """
        if int(n_max) != n_max or n_max < 1:
            raise ValidationError(f"Photon cutoff must be at least 1, got {n_max}")
        weight = self.thermal_weight
        populations = weight * thermal_populations(THERMAL_MEAN_PHOTONS, int(n_max))
        populations[1] += 1.0 - weight
        return populations

    @property
    def mean_photon_number(self):
        populations = self.photon_distribution()
        return float(np.arange(populations.size) @ populations)

    def wigner(self, zeta, eta):
        return wigner_mix(self.thermal_weight, zeta, eta)

    def marginal(self, y):
        weight = self.thermal_weight
        return (1.0 - weight) * marginal_fock1(y) + weight * marginal_thermal1(y)

    def binned_marginal(self, binning):
        """Exact Probability Mass of the Quadrature Marginal in Each Bin

        Parameters
        ----------
        binning : OutcomeBinning
            Outcome bins

        Returns
        -------
        array_like
            K bin masses (the same for every angle, both states being
            rotation invariant)
        """
        edges = binning.edges
        weight = self.thermal_weight
        cdf = (1.0 - weight) * _fock1_cdf(edges) + weight * _thermal1_cdf(edges)
        return np.diff(cdf)

    def metadata(self):
        return {"model": self.variant.value, "beta": self.thermal_weight}
