"""Numerical checks of the screening-factor derivation.

The central quantity is the expectation of ``g(r_i, r_j)^{3/5}`` over the
hydrogenic 1s density of the second electron,

    w(r_j) = 4 Z^3 r_j^2 exp(-2 Z r_j),      int_0^inf w = 1,

with ``g = r_i^2/(r_i^2+r_j^2)`` (``"fi"``) or ``g = r_j^2/(r_i^2+r_j^2)``
(``"fj"``).  The ``fj`` reading follows the integrand literally; the
``fi`` reading is the partition fraction of electron ``i``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.special import binom

from .errors import NoRootError, QuadratureError
from .potentials import partition_fraction, two_body_potential, zeta_h1

EXPONENT = 0.6
VARIANTS = ("fi", "fj")

# 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15)
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_X15 = np.concatenate([-_XK[:-1], _XK[::-1]])
_W15 = np.concatenate([_WK[:-1], _WK[::-1]])
_W7 = np.zeros(15)
_W7[1:7:2] = _WG[:3]
_W7[7] = _WG[3]
_W7[8:15] = _W7[6::-1]


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    y = f(c + h * _X15)
    k = h * float(_W15 @ y)
    g = h * float(_W7 @ y)
    return k, abs(k - g)


def adaptive_integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                       tol: float = 1e-10, max_intervals: int = 4000) -> tuple[float, float]:
    """Globally adaptive Gauss-Kronrod quadrature; ``f`` takes an array of points.

    The interval with the largest error estimate is halved until the summed
    estimate drops below the absolute tolerance ``tol``.
    """
    if b <= a:
        return 0.0, 0.0
    val, err = _gk15(f, a, b)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    while total_err > tol:
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] after {len(heap)} intervals "
                f"(error {total_err:.3g} > {tol:.3g})", total, total_err)
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    # re-sum to shed accumulated rounding from the running update
    total = math.fsum(item[3] for item in heap)
    return total, total_err


def density_1s(Z: float, r):
    """Normalised radial 1s density ``4 Z^3 r^2 exp(-2 Z r)``."""
    r = np.asarray(r, dtype=float)
    return 4.0 * Z**3 * r**2 * np.exp(-2.0 * Z * r)


def tail_mass(Z: float, R: float) -> float:
    """``int_R^inf density_1s``."""
    x = 2.0 * Z * R
    return math.exp(-x) * (1.0 + x + 0.5 * x * x)


def weighted_integral(Z: float, r_i: float, g: Callable, tol: float = 1e-10) -> float:
    """``int_0^inf density_1s(r_j) g(r_j) dr_j`` for ``|g| <= 1``, split at ``r_j = r_i``."""
    if not r_i > 0:
        raise ValueError("r_i must be positive")
    R = 40.0 / Z
    if tail_mass(Z, R) > 0.1 * tol:
        R = max(R, r_i) + 40.0 / Z
    split = min(r_i, R)
    integrand = lambda x: density_1s(Z, x) * g(x)  # noqa: E731
    inner, _ = adaptive_integrate(integrand, 0.0, split, 0.45 * tol)
    outer, _ = adaptive_integrate(integrand, split, R, 0.45 * tol)
    return inner + outer


def _fraction(variant: str, r_i: float, exponent: float):
    if variant == "fi":
        return lambda r_j: (r_i**2 / (r_i**2 + r_j**2)) ** exponent
    if variant == "fj":
        return lambda r_j: (r_j**2 / (r_i**2 + r_j**2)) ** exponent
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


@dataclass(frozen=True)
class OracleConfig:
    Z: float = 2.0
    r_grid: tuple = ()
    variant: str = "fi"
    series_kmax: int = 1
    tol: float = 1e-10

    def __post_init__(self):
        if not self.Z > 0:
            raise ValueError("Z must be positive")
        if any(r <= 0 for r in self.r_grid):
            raise ValueError("r_grid must be strictly positive")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.series_kmax < 0:
            raise ValueError("series_kmax must be >= 0")
        if not 0 < self.tol <= 1e-6:
            raise ValueError("tol must lie in (0, 1e-6]")


def expectation_numeric(Z: float, r_i: float, variant: str = "fi",
                        exponent: float = EXPONENT, tol: float = 1e-10) -> float:
    """``<g^exponent>`` over the normalised 1s density of the other electron."""
    return weighted_integral(Z, r_i, _fraction(variant, r_i, exponent), tol)


def series_truncated(Z: float, r_i: float, kmax: int, variant: str = "fi",
                     exponent: float = EXPONENT, tol: float = 1e-12) -> float:
    """Same expectation with ``(1+t^2)^{-p}`` replaced by its binomial series through ``t^{2 kmax}``.

    ``t = r_</r_>``.  On the side where ``g = t^2/(1+t^2)`` the extra factor
    ``t^{2p}`` is kept exactly.
    """
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    p = exponent
    R = max(40.0 / Z, r_i) + 40.0 / Z
    # fi: inner side g = 1/(1+t^2); fj: inner side g = t^2/(1+t^2)
    inner_power = 0.0 if variant == "fi" else 2.0 * p
    outer_power = 2.0 * p - inner_power
    total = 0.0
    for k in range(kmax + 1):
        c = float(binom(-p, k))
        inner = lambda x, k=k: density_1s(Z, x) * (x / r_i) ** (2 * k + inner_power)  # noqa: E731
        outer = lambda x, k=k: density_1s(Z, x) * (r_i / x) ** (2 * k + outer_power)  # noqa: E731
        a, _ = adaptive_integrate(inner, 0.0, r_i, tol)
        b, _ = adaptive_integrate(outer, r_i, R, tol)
        total += c * (a + b)
    return total


# --- stationarity of the two-coordinate potential ------------------------------

def dV_dri_expanded(Z: float, r_i, r_j):
    """Derivative of the two-coordinate potential with respect to ``r_i``, three-term form."""
    s = r_i**2 + r_j**2
    return Z / r_i**2 + 2.0 * r_i / s**1.5 - 3.0 * r_i**3 / s**2.5


def dV_dri_combined(Z: float, r_i, r_j):
    s = r_i**2 + r_j**2
    return Z / r_i**2 + (2.0 * r_i * r_j**2 - r_i**3) / s**2.5


def extremum_derivative_check(Z: float, r_i: float, r_j: float,
                              step: float = 1e-5) -> tuple[float, float]:
    """Returns ``(|finite difference - analytic|, |expanded - combined|)``."""
    if not r_i > 0:
        raise ValueError("r_i must be positive")
    fd = (two_body_potential(Z, r_i + step, r_j) - two_body_potential(Z, r_i - step, r_j)) / (2 * step)
    analytic = dV_dri_expanded(Z, r_i, r_j)
    return abs(fd - analytic), abs(analytic - dV_dri_combined(Z, r_i, r_j))


def equality_gap(Z: float, r_i, r_j):
    """``Z (r_i^2+r_j^2)^{3/2} - 2 r_i^3``: zero exactly where the minimum condition holds with equality."""
    return Z * (r_i**2 + r_j**2) ** 1.5 - 2.0 * r_i**3


def correlation_identity_residual(Z: float, r_i: float, r_j: float) -> float:
    lhs = 1.0 / math.sqrt(r_i**2 + r_j**2)
    rhs = (0.5 * Z * partition_fraction(r_i, r_j)) ** 0.2 / r_i
    return abs(lhs - rhs)


@dataclass(frozen=True)
class StationarityResult:
    Z: float
    r_j: float
    r_i: float
    residual: float


def stationarity_check(Z: float, r_j: float) -> StationarityResult:
    """Root of the equality condition in ``r_i`` and the correlation-term identity residual there.

    With ``s = sqrt(r_i^2 + r_j^2)`` the equality reads ``s = (2/Z)^{1/3} r_i``,
    so a root exists for ``r_j > 0`` only when ``Z < 2``; for ``r_j = 0`` it
    holds for every ``r_i`` when ``Z = 2`` and never otherwise.
    """
    if not Z > 0 or r_j < 0:
        raise ValueError("need Z > 0 and r_j >= 0")
    if r_j == 0.0:
        if Z != 2.0:
            raise NoRootError(f"no positive root for Z={Z}, r_j=0")
        r_i = 1.0  # every r_i satisfies the equality; report a representative
        return StationarityResult(Z, r_j, r_i, correlation_identity_residual(Z, r_i, r_j))

    h = lambda x: equality_gap(Z, x, r_j) / r_j**3  # noqa: E731
    grid = r_j * np.geomspace(1e-3, 1e6, 91)
    vals = h(grid)
    change = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if change.size == 0:
        raise NoRootError(f"equality condition has no root for Z={Z}, r_j={r_j}")
    a, b = grid[change[0]], grid[change[0] + 1]
    r_i = bisect(h, a, b, xtol=1e-15 * b, rtol=4 * np.finfo(float).eps, maxiter=400)
    return StationarityResult(Z, r_j, r_i, correlation_identity_residual(Z, r_i, r_j))


# --- report ---------------------------------------------------------------------

CSV_COLUMNS = ("r", "numeric_fi", "numeric_fj", "zeta_h1", "series_k1", "err_fi_vs_h1", "status")


@dataclass
class OracleRecord:
    r: float
    numeric_fi: float | None
    numeric_fj: float | None
    zeta_h1: float
    series_value: float
    abs_error_numeric_vs_h1: float | None
    status: str = "ok"


@dataclass
class OracleReport:
    records: list[OracleRecord]
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        def cell(x):
            if x is None:
                return ""
            if isinstance(x, str):
                return x
            return f"{x:.12g}"

        lines = [",".join(CSV_COLUMNS)]
        for rec in self.records:
            lines.append(",".join(cell(v) for v in (
                rec.r, rec.numeric_fi, rec.numeric_fj, rec.zeta_h1,
                rec.series_value, rec.abs_error_numeric_vs_h1, rec.status)))
        return "\n".join(lines) + "\n"


def compare_closed_form(config: OracleConfig, variants: Sequence[str] = VARIANTS) -> OracleReport:
    """Tabulate both expectation readings, the closed form, and the truncated series on ``config.r_grid``."""
    records = []
    for r in config.r_grid:
        values, failed = {}, []
        for v in VARIANTS:
            if v not in variants:
                values[v] = None
                continue
            try:
                values[v] = expectation_numeric(config.Z, r, v, tol=config.tol)
            except QuadratureError as exc:
                values[v] = exc.estimate
                failed.append(v)
        z = zeta_h1(config.Z, r)
        series = series_truncated(config.Z, r, config.series_kmax, config.variant)
        err = None if values["fi"] is None else abs(values["fi"] - z)
        status = "ok" if not failed else "quad-fail:" + "+".join(failed)
        records.append(OracleRecord(r, values["fi"], values["fj"], z, series, err, status))

    meta = {
        "Z": config.Z,
        "variant": config.variant,
        "series_kmax": config.series_kmax,
        "weight": "normalised 1s density 4 Z^3 r^2 exp(-2 Z r)",
    }
    # which reading the closed form follows, judged where it is a valid fraction
    gaps = {}
    for v in VARIANTS:
        key = "numeric_" + v
        pts = [abs(getattr(rec, key) - rec.zeta_h1) for rec in records
               if getattr(rec, key) is not None and 0.0 <= rec.zeta_h1 <= 1.0]
        if pts:
            gaps[v] = float(np.mean(pts))
    if gaps:
        meta["mean_abs_gap"] = gaps
        meta["closer_variant"] = min(gaps, key=gaps.get)
    return OracleReport(records, meta)
