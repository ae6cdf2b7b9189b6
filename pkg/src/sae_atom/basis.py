"""B-spline radial basis on [0, rmax].

Splines are indexed ``0 .. n_splines - 1`` and have polynomial *order* ``k``
(degree ``k - 1``).  Both ends of the knot vector carry full multiplicity
``k``, so ``B_0(0) = 1`` and ``B_{n-1}(rmax) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import BasisError


class KnotScheme(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"
    SINH_HYBRID = "sinh-hybrid"


@dataclass(frozen=True)
class BasisConfig:
    rmax: float = 400.0
    n_splines: int = 600
    order_k: int = 10
    knot_scheme: KnotScheme = KnotScheme.EXPONENTIAL
    clustering: float = 5.0
    quad_points_per_interval: int | None = None  # None -> order_k + 4

    def __post_init__(self):
        object.__setattr__(self, "knot_scheme", KnotScheme(self.knot_scheme))
        if self.quad_points_per_interval is None:
            object.__setattr__(self, "quad_points_per_interval", self.order_k + 4)
        if not self.rmax > 0:
            raise BasisError(f"rmax must be positive, got {self.rmax}")
        if self.order_k < 2:
            raise BasisError(f"order_k must be >= 2, got {self.order_k}")
        if self.n_splines <= self.order_k:
            raise BasisError(
                f"n_splines ({self.n_splines}) must exceed order_k ({self.order_k})"
            )
        if not self.clustering > 0:
            raise BasisError(f"clustering must be positive, got {self.clustering}")
        if self.quad_points_per_interval < self.order_k:
            raise BasisError("quad_points_per_interval must be >= order_k")

    def with_(self, **changes) -> "BasisConfig":
        return replace(self, **changes)


# Profile used for the reference table: 600 splines, k=10, 200 bohr box.
TABLE_PROFILE = BasisConfig(rmax=200.0)
# Default: same spline count and order, box doubled so that n <= 12 Rydberg
# states are not squeezed by the wall.
DEFAULT_PROFILE = BasisConfig()
FAST_PROFILE = BasisConfig(rmax=100.0, n_splines=300)


def make_breakpoints(config: BasisConfig) -> np.ndarray:
    """Distinct knots ``0 = x_0 < x_1 < ... < x_m = rmax``."""
    m = config.n_splines - config.order_k + 2
    t = np.linspace(0.0, 1.0, m)
    g = config.clustering
    if config.knot_scheme is KnotScheme.LINEAR:
        x = t * config.rmax
    elif config.knot_scheme is KnotScheme.EXPONENTIAL:
        x = config.rmax * np.expm1(g * t) / np.expm1(g)
    else:
        # linear near the origin, exponential further out
        x = config.rmax * np.sinh(g * t) / np.sinh(g)
    x[0], x[-1] = 0.0, config.rmax
    return x


@dataclass(frozen=True, eq=False)
class BSplineBasis:
    config: BasisConfig
    knots: np.ndarray
    breakpoints: np.ndarray
    # (n_intervals, q) arrays of Gauss-Legendre nodes and weights
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.config.n_splines

    @property
    def k(self) -> int:
        return self.config.order_k

    @property
    def rmax(self) -> float:
        return self.config.rmax

    def support(self, i: int) -> tuple[float, float]:
        return float(self.knots[i]), float(self.knots[i + self.k])

    def span(self, r) -> np.ndarray:
        """Index ``mu`` with ``knots[mu] <= r < knots[mu+1]``; nonzero splines are ``mu-k+1 .. mu``."""
        r = np.asarray(r, dtype=float)
        mu = np.searchsorted(self.knots, r, side="right") - 1
        return np.clip(mu, self.k - 1, self.n - 1)

    def local_values(self, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values and first derivatives of the ``k`` splines that are nonzero at each ``r``.

        Returns ``(mu, values, derivs)`` where ``values[p, a]`` belongs to spline
        ``mu[p] - k + 1 + a``.  Derivatives at interior breakpoints are right limits.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        t = self.knots
        k = self.k
        mu = self.span(r)
        npts = r.size
        vals = np.zeros((npts, k))
        vals[:, 0] = 1.0
        left = np.zeros((npts, k))
        right = np.zeros((npts, k))
        lower = None
        for j in range(1, k):
            if j == k - 1:
                lower = vals[:, : k - 1].copy()
            left[:, j] = r - t[mu + 1 - j]
            right[:, j] = t[mu + j] - r
            saved = np.zeros(npts)
            for s in range(j):
                denom = right[:, s + 1] + left[:, j - s]
                temp = vals[:, s] / denom
                vals[:, s] = saved + right[:, s + 1] * temp
                saved = left[:, j - s] * temp
            vals[:, j] = saved
        if lower is None:  # k == 1 is rejected by BasisConfig, kept for safety
            lower = np.ones((npts, 1))

        # B'_{i,k} = (k-1) [B_{i,k-1}/(t_{i+k-1}-t_i) - B_{i+1,k-1}/(t_{i+k}-t_{i+1})]
        # lower[:, a] is B_{mu-k+2+a, k-1}, a = 0..k-2
        derivs = np.zeros((npts, k))
        for a in range(k - 1):
            i = mu - k + 2 + a
            h = t[i + k - 1] - t[i]
            term = (k - 1) * lower[:, a] / h
            derivs[:, a + 1] += term
            derivs[:, a] -= term
        return mu, vals, derivs

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        return self.nodes, self.weights


def gauss_legendre(q: int) -> tuple[np.ndarray, np.ndarray]:
    """``q``-point Gauss-Legendre rule on [-1, 1]."""
    return np.polynomial.legendre.leggauss(q)


def build_basis(config: BasisConfig = DEFAULT_PROFILE) -> BSplineBasis:
    bp = make_breakpoints(config)
    if np.any(np.diff(bp) <= 0):
        raise BasisError("breakpoints are not strictly increasing; reduce clustering")
    k = config.order_k
    knots = np.concatenate([np.zeros(k - 1), bp, np.full(k - 1, config.rmax)])
    assert knots.size == config.n_splines + k

    x, w = gauss_legendre(config.quad_points_per_interval)
    a, b = bp[:-1, None], bp[1:, None]
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    for arr in (knots, bp, nodes, weights):
        arr.setflags(write=False)
    return BSplineBasis(config, knots, bp, nodes, weights)


def _check(basis: BSplineBasis, i: int, r) -> np.ndarray:
    if not 0 <= i < basis.n:
        raise IndexError(f"spline index {i} outside 0..{basis.n - 1}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > basis.rmax):
        raise ValueError(f"radius outside [0, {basis.rmax}]")
    return r


def _pick(basis: BSplineBasis, i: int, r, which: int):
    r = _check(basis, i, r)
    mu, vals, ders = basis.local_values(r)
    a = i - (mu - basis.k + 1)
    inside = (a >= 0) & (a < basis.k)
    src = vals if which == 0 else ders
    out = np.where(inside, src[np.arange(mu.size), np.clip(a, 0, basis.k - 1)], 0.0)
    return float(out[0]) if r.ndim == 0 else out


def eval_spline(basis: BSplineBasis, i: int, r):
    """``B_i(r)``; scalar or array ``r``."""
    return _pick(basis, i, r, 0)


def eval_spline_deriv(basis: BSplineBasis, i: int, r):
    """``dB_i/dr``; right limit at interior breakpoints."""
    return _pick(basis, i, r, 1)


def quadrature_nodes(basis: BSplineBasis) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-interval ``(nodes, weights)`` pairs."""
    return list(zip(basis.nodes, basis.weights))
