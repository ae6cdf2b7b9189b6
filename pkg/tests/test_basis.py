import numpy as np
import numpy.testing as npt
import pytest
from scipy.interpolate import BSpline

from sae_atom.basis import (
    BasisConfig,
    KnotScheme,
    build_basis,
    eval_spline,
    eval_spline_deriv,
    gauss_legendre,
    make_breakpoints,
    quadrature_nodes,
)
from sae_atom.errors import BasisError


def _sample_r(basis, n=1000, seed=0):
    rng = np.random.default_rng(seed)
    uni = rng.uniform(0, basis.rmax, n // 2)
    log = np.exp(rng.uniform(np.log(1e-6), np.log(basis.rmax), n - n // 2))
    return np.concatenate([uni, log])


def test_paper_count_relation():
    b = build_basis(BasisConfig(rmax=200.0, n_splines=600, order_k=10))
    assert b.knots.size == 610
    assert np.all(b.knots[:10] == 0.0)
    assert np.all(b.knots[-10:] == 200.0)
    assert np.all(np.diff(b.knots) >= 0)


def test_small_linear_knots():
    b = build_basis(BasisConfig(rmax=1.0, n_splines=5, order_k=3, knot_scheme="linear"))
    npt.assert_allclose(b.breakpoints, [0, 1 / 3, 2 / 3, 1], atol=1e-15)
    npt.assert_allclose(b.knots, [0, 0, 0, 1 / 3, 2 / 3, 1, 1, 1], atol=1e-15)


def test_linear_scheme_ignores_clustering():
    a = make_breakpoints(BasisConfig(knot_scheme="linear", clustering=1.0))
    b = make_breakpoints(BasisConfig(knot_scheme="linear", clustering=9.0))
    npt.assert_array_equal(a, b)
    npt.assert_allclose(np.diff(a), a[1] - a[0], rtol=1e-12)


def test_exponential_breakpoints_formula():
    cfg = BasisConfig(rmax=50.0, n_splines=40, order_k=6, clustering=3.0)
    t = np.linspace(0, 1, 40 - 6 + 2)
    npt.assert_allclose(make_breakpoints(cfg), 50.0 * np.expm1(3.0 * t) / np.expm1(3.0), rtol=1e-14)


@pytest.mark.parametrize("scheme", list(KnotScheme))
def test_schemes_strictly_increasing(scheme):
    bp = make_breakpoints(BasisConfig(knot_scheme=scheme))
    assert np.all(np.diff(bp) > 0)
    assert bp[0] == 0.0 and bp[-1] == 400.0


@pytest.mark.parametrize("kwargs", [
    dict(n_splines=10, order_k=10),
    dict(n_splines=5, order_k=8),
    dict(rmax=0.0),
    dict(rmax=-3.0),
    dict(clustering=0.0),
    dict(order_k=1, n_splines=5),
    dict(quad_points_per_interval=4),
])
def test_config_rejected(kwargs):
    with pytest.raises(BasisError):
        BasisConfig(**kwargs)


def test_hat_function():
    b = build_basis(BasisConfig(rmax=2.0, n_splines=3, order_k=2, knot_scheme="linear"))
    # knots 0,0,1,2,2: spline 1 is the hat on {0,1,2}
    assert eval_spline(b, 1, 1.0) == pytest.approx(1.0)
    assert eval_spline_deriv(b, 1, 0.5) == pytest.approx(1.0)
    assert eval_spline_deriv(b, 1, 1.5) == pytest.approx(-1.0)
    # right limit at the interior breakpoint
    assert eval_spline_deriv(b, 1, 1.0) == pytest.approx(-1.0)


def test_partition_of_unity(default_basis):
    r = _sample_r(default_basis)
    mu, vals, ders = default_basis.local_values(r)
    npt.assert_allclose(vals.sum(axis=1), 1.0, atol=1e-12, rtol=0)
    assert np.abs(ders.sum(axis=1)).max() < 1e-8 * np.abs(ders).max()
    assert vals.min() >= -1e-15


def test_matches_scipy(small_basis):
    b = small_basis
    r = np.linspace(0, b.rmax, 777)
    ref = BSpline.design_matrix(r, b.knots, b.k - 1).toarray()
    for i in (0, 1, 7, 60, b.n - 2, b.n - 1):
        npt.assert_allclose(eval_spline(b, i, r), ref[:, i], atol=1e-13)
        dref = BSpline(b.knots, np.eye(b.n)[i], b.k - 1).derivative()(r)
        npt.assert_allclose(eval_spline_deriv(b, i, r), dref, atol=1e-9 * np.abs(dref).max())


def test_local_support(small_basis):
    b = small_basis
    r = np.linspace(0, b.rmax, 3001)
    for i in (0, 5, 40, b.n - 1):
        lo, hi = b.support(i)
        outside = (r < lo) | (r > hi)
        assert np.all(eval_spline(b, i, r[outside]) == 0.0)


def test_derivative_finite_difference(default_basis):
    b = default_basis
    rng = np.random.default_rng(3)
    h = 1e-6
    checked = 0
    for _ in range(100):
        i = int(rng.integers(1, b.n - 1))
        lo, hi = b.support(i)
        r = rng.uniform(lo, hi)
        # stay clear of breakpoints, where the derivative of order-k splines is only C^{k-2}
        if np.min(np.abs(b.breakpoints - r)) < 10 * h:
            continue
        d = eval_spline_deriv(b, i, r)
        fd = (eval_spline(b, i, r + h) - eval_spline(b, i, r - h)) / (2 * h)
        if abs(d) < 1e-3 * np.abs(eval_spline_deriv(b, i, np.linspace(lo, hi, 50))).max():
            continue
        assert abs(fd - d) / abs(d) < 1e-6
        checked += 1
    assert checked > 50


def test_out_of_range():
    b = build_basis(BasisConfig(rmax=10.0, n_splines=20, order_k=4))
    with pytest.raises(IndexError):
        eval_spline(b, 20, 1.0)
    with pytest.raises(IndexError):
        eval_spline_deriv(b, -1, 1.0)
    with pytest.raises(ValueError):
        eval_spline(b, 3, 10.5)
    with pytest.raises(ValueError):
        eval_spline(b, 3, -0.1)


def test_gauss_legendre_two_point():
    x, w = gauss_legendre(2)
    npt.assert_allclose(x, [-1 / np.sqrt(3), 1 / np.sqrt(3)], rtol=1e-15)
    npt.assert_allclose(w, [1.0, 1.0], rtol=1e-15)


def test_three_point_exactness():
    x, w = gauss_legendre(3)
    nodes = 0.5 * (x + 1)
    assert abs(0.5 * w @ nodes**5 - 1 / 6) < 1e-14


def test_quadrature_intervals(default_basis):
    b = default_basis
    pairs = quadrature_nodes(b)
    assert len(pairs) == b.breakpoints.size - 1
    for (x, w), lo, hi in zip(pairs, b.breakpoints[:-1], b.breakpoints[1:]):
        assert np.all(w > 0)
        assert np.all((x > lo) & (x < hi))
        assert w.sum() == pytest.approx(hi - lo, rel=1e-13)


def test_quadrature_polynomial_exactness(default_basis):
    b = default_basis
    q = b.config.quad_points_per_interval
    deg = 2 * q - 1
    for x, w, lo, hi in list(zip(b.nodes, b.weights, b.breakpoints[:-1], b.breakpoints[1:]))[::50]:
        u = (x - lo) / (hi - lo)
        got = w @ u**deg / (hi - lo)
        assert got == pytest.approx(1.0 / (deg + 1), rel=1e-12)


def test_integral_of_unity(default_basis):
    b = default_basis
    _, vals, _ = b.local_values(b.nodes.ravel())
    total = b.weights.ravel() @ vals.sum(axis=1)
    assert abs(total - b.rmax) < 1e-10
