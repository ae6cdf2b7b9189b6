"""Galerkin discretisation of the radial single-electron Hamiltonian.

The first and last splines are dropped, which imposes ``u(0) = u(rmax) = 0``.
Matrices are assembled interval by interval, so every entry with
``|i - j| >= k`` is exactly zero.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import BSplineBasis
from .errors import BasisError, IterationLimitError
from .potentials import PotentialModel


@dataclass(frozen=True)
class ChannelSpec:
    model: PotentialModel
    l: int = 0
    n_states: int = 5

    def __post_init__(self):
        if self.l < 0:
            raise ValueError("l must be >= 0")
        if self.n_states < 1:
            raise ValueError("n_states must be >= 1")


@dataclass(frozen=True)
class Eigensolution:
    channel: ChannelSpec
    eigenvalues: np.ndarray
    coefficients: np.ndarray  # columns, in the reduced (boundary-dropped) basis
    basis_dim: int
    box_distorted: np.ndarray = field(repr=False)

    def principal(self, index: int) -> int:
        return self.channel.l + 1 + index


class _Grid:
    """Quadrature points with the local spline tables, shared by every assembly."""

    def __init__(self, basis: BSplineBasis):
        k = basis.k
        n_int, q = basis.nodes.shape
        r = basis.nodes.ravel()
        mu, vals, ders = basis.local_values(r)
        self.r = r
        self.w = basis.weights.ravel()
        self.vals = vals.reshape(n_int, q, k)
        self.ders = ders.reshape(n_int, q, k)
        # first spline touching each interval; constant within an interval
        self.first = mu.reshape(n_int, q)[:, 0] - k + 1
        self.n = basis.n
        self.k = k
        self.overlap = None
        self.kinetic = None
        self.inv_r2 = None


_grids: "weakref.WeakKeyDictionary[BSplineBasis, _Grid]" = weakref.WeakKeyDictionary()


def _grid(basis: BSplineBasis) -> _Grid:
    g = _grids.get(basis)
    if g is None:
        g = _grids[basis] = _Grid(basis)
    return g


def _assemble(g: _Grid, left: np.ndarray, right: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``M_ij = sum_p w_p f_p L_i(r_p) R_j(r_p)`` in the full basis, then boundary splines dropped."""
    n_int = left.shape[0]
    wf = (g.w * f).reshape(n_int, -1)
    local = np.einsum("iqa,iq,iqb->iab", left, wf, right)
    full = np.zeros((g.n, g.n))
    idx = g.first[:, None] + np.arange(g.k)[None, :]
    np.add.at(full, (idx[:, :, None], idx[:, None, :]), local)
    return full[1:-1, 1:-1]


def assemble_overlap(basis: BSplineBasis) -> np.ndarray:
    g = _grid(basis)
    if g.overlap is None:
        g.overlap = _assemble(g, g.vals, g.vals, np.ones_like(g.r))
    return g.overlap


def assemble_kinetic(basis: BSplineBasis) -> np.ndarray:
    """``(1/2) int B_i' B_j' dr``."""
    g = _grid(basis)
    if g.kinetic is None:
        g.kinetic = 0.5 * _assemble(g, g.ders, g.ders, np.ones_like(g.r))
    return g.kinetic


def assemble_potential(basis: BSplineBasis, potential) -> np.ndarray:
    """``int B_i V B_j dr`` for a callable ``V(r)`` evaluated at the quadrature nodes."""
    g = _grid(basis)
    return _assemble(g, g.vals, g.vals, np.asarray(potential(g.r), dtype=float))


def assemble_hamiltonian(basis: BSplineBasis, model: PotentialModel, l: int) -> np.ndarray:
    g = _grid(basis)
    H = assemble_kinetic(basis) + assemble_potential(basis, model)
    if l:
        if g.inv_r2 is None:
            g.inv_r2 = assemble_potential(basis, lambda r: 1.0 / r**2)
        H = H + 0.5 * l * (l + 1) * g.inv_r2
    return H


def solve_generalized(H: np.ndarray, S: np.ndarray, n_states: int, label: str = ""):
    """Lowest ``n_states`` pairs of ``H c = e S c`` via ``S = L L^T``."""
    try:
        L = scipy.linalg.cholesky(S, lower=True)
    except np.linalg.LinAlgError as exc:
        raise BasisError(f"overlap matrix is not positive definite: {exc}") from exc
    tmp = scipy.linalg.solve_triangular(L, H, lower=True)
    A = scipy.linalg.solve_triangular(L, tmp.T, lower=True)
    try:
        e, y = scipy.linalg.eigh(A, subset_by_index=[0, n_states - 1])
    except np.linalg.LinAlgError as exc:
        raise IterationLimitError(f"eigensolver did not converge for {label}") from exc
    c = scipy.linalg.solve_triangular(L.T, y, lower=False)
    return e, c


def outer_turning_point(energy: float, charge: float, l: int) -> float:
    """Largest r with ``energy = -charge/r + l(l+1)/(2r^2)``; inf for unbound energies."""
    if energy >= 0:
        return np.inf
    disc = charge**2 + 2.0 * energy * l * (l + 1)
    return (charge + np.sqrt(max(disc, 0.0))) / (-2.0 * energy)


def solve_channel(basis: BSplineBasis, spec: ChannelSpec) -> Eigensolution:
    dim = basis.n - 2
    if spec.n_states > dim - 2:
        raise ValueError(f"n_states must be <= {dim - 2} for this basis")
    S = assemble_overlap(basis)
    H = assemble_hamiltonian(basis, spec.model, spec.l)
    label = f"{spec.model.variant.value} l={spec.l}"
    e, c = solve_generalized(H, S, spec.n_states, label)
    charge = spec.model.asymptotic_charge()
    distorted = np.array(
        [outer_turning_point(x, charge, spec.l) > 0.5 * basis.rmax for x in e]
    )
    return Eigensolution(spec, e, c, dim, distorted)
