"""Tune the screening parameter alpha so that 4 eps_1s hits a target ground-state energy."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .basis import DEFAULT_PROFILE, BasisConfig, build_basis
from .errors import CalibrationInfeasibleError
from .potentials import PotentialModel, Variant
from .solver import ChannelSpec, solve_channel

REFERENCE_GROUND = -2.90372  # He 1s^2 reference energy (hartree) from the Ref column


@dataclass(frozen=True)
class CalibrationProblem:
    Z: float = 2.0
    target_energy: float = REFERENCE_GROUND
    bracket: tuple[float, float] = (0.1, 0.9)
    tol_alpha: float = 1e-6
    basis: BasisConfig = DEFAULT_PROFILE

    def __post_init__(self):
        lo, hi = self.bracket
        if not 0.0 < lo < hi < 1.0:
            raise ValueError(f"bracket must satisfy 0 < lo < hi < 1, got {self.bracket}")
        if not self.target_energy < 0:
            raise ValueError("target_energy must be negative")
        if not 1e-8 <= self.tol_alpha <= 1e-3:
            raise ValueError("tol_alpha must lie in [1e-8, 1e-3]")


@dataclass
class CalibrationResult:
    alpha: float
    residual: float
    evaluations: int
    method: str
    profile: list = field(default_factory=list)


class Objective:
    """``4 eps_1s(alpha) - target``, counting every solve."""

    def __init__(self, problem: CalibrationProblem):
        self.problem = problem
        self.basis = build_basis(problem.basis)
        self.calls = 0
        self.history: list[tuple[float, float]] = []

    def ground_energy(self, alpha: float) -> float:
        model = PotentialModel(Variant.H2, self.problem.Z, alpha)
        sol = solve_channel(self.basis, ChannelSpec(model, 0, 1))
        return 4.0 * float(sol.eigenvalues[0])

    def __call__(self, alpha: float) -> float:
        self.calls += 1
        value = self.ground_energy(alpha) - self.problem.target_energy
        self.history.append((float(alpha), value))
        return value


def objective(problem: CalibrationProblem, alpha: float) -> float:
    return Objective(problem)(alpha)


def fit_alpha(problem: CalibrationProblem) -> CalibrationResult:
    """Root of the objective when it changes sign on the bracket, otherwise the minimiser of its magnitude."""
    f = Objective(problem)
    lo, hi = problem.bracket
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return CalibrationResult(lo, 0.0, f.calls, "endpoint", f.history)
    if f_hi == 0.0:
        return CalibrationResult(hi, 0.0, f.calls, "endpoint", f.history)
    if np.sign(f_lo) != np.sign(f_hi):
        # Brent: bisection safeguarded secant / inverse quadratic steps
        alpha = brentq(f, lo, hi, xtol=problem.tol_alpha, rtol=4 * np.finfo(float).eps)
        residual = f(alpha)
        return CalibrationResult(alpha, residual, f.calls, "brent", f.history)

    res = minimize_scalar(lambda a: abs(f(a)), bounds=(lo, hi), method="bounded",
                          options={"xatol": problem.tol_alpha})
    alpha = float(res.x)
    values = [v for _, v in f.history]
    flat = max(values) - min(values) < 1e-12
    at_edge = min(alpha - lo, hi - alpha) < 2 * problem.tol_alpha
    if flat or at_edge:
        raise CalibrationInfeasibleError(
            "objective has no sign change and no interior minimum on the bracket",
            sorted(f.history))
    return CalibrationResult(alpha, f(alpha), f.calls, "bounded-golden", f.history)


def sample_profile(problem: CalibrationProblem, alphas) -> list[tuple[float, float]]:
    f = Objective(problem)
    return [(float(a), f(a)) for a in alphas]


def is_monotone(profile: list[tuple[float, float]]) -> bool:
    values = np.array([v for _, v in sorted(profile)])
    steps = np.diff(values)
    return bool(np.all(steps > 0) or np.all(steps < 0))
