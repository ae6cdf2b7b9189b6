"""Radial model potentials for one electron of a two-electron atom.

All functions accept scalars or numpy arrays and return the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SingularityError, UndefinedInputError

DEFAULT_Z = 2.0
DEFAULT_ALPHA = 0.46135


class Variant(str, Enum):
    COULOMB = "coulomb"
    MEANFIELD = "meanfield"
    H1 = "h1"
    H2 = "h2"


@dataclass(frozen=True)
class PotentialModel:
    variant: Variant = Variant.H2
    Z: float = DEFAULT_Z
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.Z > 0:
            raise ValueError(f"Z must be positive, got {self.Z}")
        if self.variant is Variant.H2 and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1) for model h2, got {self.alpha}")

    @property
    def uses_alpha(self) -> bool:
        return self.variant is Variant.H2

    def asymptotic_charge(self) -> float:
        """Charge seen at large r, ``-r V(r) -> Z_inf``."""
        if self.variant is Variant.COULOMB:
            return self.Z
        if self.variant is Variant.MEANFIELD:
            return meanfield_effective_charge(self.Z)
        return self.Z - screening_prefactor(self.Z)

    def __call__(self, r):
        return eval_potential(self, r)


def _positive(r, what: str):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise SingularityError(f"{what} requires r > 0")
    return r


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def partition_fraction(r_i, r_j):
    """Share ``r_i^2 / (r_i^2 + r_j^2)`` of the pair correlation energy owned by electron i."""
    r_i = np.asarray(r_i, dtype=float)
    r_j = np.asarray(r_j, dtype=float)
    if np.any(r_i < 0) or np.any(r_j < 0):
        raise UndefinedInputError("radii must be non-negative")
    s = r_i**2 + r_j**2
    if np.any(s == 0):
        raise UndefinedInputError("partition fraction undefined for r_i = r_j = 0")
    return _out(r_i**2 / s)


def two_body_potential(Z: float, r_i, r_j):
    """``-Z/r_i + r_i^2 / (r_i^2 + r_j^2)^{3/2}``."""
    r_i = _positive(r_i, "two_body_potential")
    r_j = np.asarray(r_j, dtype=float)
    s = r_i**2 + r_j**2
    return _out(-Z / r_i + r_i**2 / s**1.5)


def zeta_h1(Z: float, r):
    """Screening factor ``1 - [27/25 + 6/5 Zr - 6/(125 Zr)] exp(-2Zr)``."""
    r = _positive(r, "zeta_h1")
    zr = Z * r
    return _out(1.0 - (27.0 / 25.0 + 1.2 * zr - 6.0 / (125.0 * zr)) * np.exp(-2.0 * zr))


def zeta_h2(Z: float, alpha: float, r):
    """Screening factor ``1 - alpha (1 + 3Zr) exp(-2Zr)``; finite at r = 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise UndefinedInputError("zeta_h2 requires r >= 0")
    zr = Z * r
    return _out(1.0 - alpha * (1.0 + 3.0 * zr) * np.exp(-2.0 * zr))


def screening_prefactor(Z: float) -> float:
    return (Z / 2.0) ** 0.6


def meanfield_effective_charge(Z: float) -> float:
    return Z - 0.5 * (2.0 * Z) ** (1.0 / 3.0)


def eval_potential(model: PotentialModel, r):
    r = _positive(r, "eval_potential")
    Z = model.Z
    v = model.variant
    if v is Variant.COULOMB:
        out = -Z / r
    elif v is Variant.MEANFIELD:
        out = -Z / r + 0.5 * (2.0 * Z) ** (1.0 / 3.0) / r
    elif v is Variant.H1:
        out = -Z / r + screening_prefactor(Z) * zeta_h1(Z, r) / r
    else:
        out = -Z / r + screening_prefactor(Z) * zeta_h2(Z, model.alpha, r) / r
    return _out(out)
