"""End-to-end acceptance checks.

Each test prints one ``ACCEPTANCE <n> PASS|FAIL`` line (visible even under
output capture) and then asserts at the pinned tolerance.
"""
import time

import numpy as np
import pytest

from sae_atom.basis import TABLE_PROFILE, BasisConfig, build_basis
from sae_atom.calibration import CalibrationProblem, Objective, fit_alpha
from sae_atom.cli import main
from sae_atom.errors import NoRootError
from sae_atom.oracle import (
    expectation_numeric,
    stationarity_check,
    weighted_integral,
)
from sae_atom.potentials import PotentialModel, zeta_h1
from sae_atom.solver import ChannelSpec, solve_channel
from sae_atom.spectrum import ReferenceTable, compare_reference, compute_levels

pytestmark = pytest.mark.acceptance

H1 = PotentialModel("h1", 2.0)
H2 = PotentialModel("h2", 2.0, 0.46135)


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def basis():
    return build_basis()


@pytest.fixture(scope="module")
def table_basis():
    return build_basis(TABLE_PROFILE)


@pytest.fixture(scope="module")
def table():
    return ReferenceTable.load()


@pytest.fixture(scope="module")
def levels(basis, table):
    return {m.variant.value: compute_levels(m, 7, 5, basis, table=table) for m in (H1, H2)}


def test_1_hydrogen(capsys, table_basis):
    t0 = time.perf_counter()
    worst = 0.0
    for l in range(4):
        sol = solve_channel(table_basis, ChannelSpec(PotentialModel("coulomb", 1.0), l, 6 - l))
        n = np.arange(l + 1, 7)
        worst = max(worst, np.max(np.abs(sol.eigenvalues + 0.5 / n**2)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 10
    report(capsys, 1, ok, f"max |eps + 1/2n^2| = {worst:.2e} (tol 1e-9), {elapsed:.2f} s")
    assert worst < 1e-9
    assert elapsed < 10


def test_2_meanfield(capsys, basis):
    z_eff = 2 - 4 ** (1 / 3) / 2
    sol = solve_channel(basis, ChannelSpec(PotentialModel("meanfield", 2.0), 0, 5))
    n = np.arange(1, 6)
    worst = np.max(np.abs(sol.eigenvalues + z_eff**2 / (2 * n**2)))
    report(capsys, 2, worst < 1e-9, f"max deviation {worst:.2e} (tol 1e-9)")
    assert worst < 1e-9


def _table_check(capsys, number, levels, table, column, anchors):
    report_ = compare_reference(levels, table, column)
    s = report_.summary()[column]
    bad = [f"{r.label}(l={r.l}) {r.computed:.7f} vs {r.table}" for r in report_.failures()]
    raw = max(abs(r.delta) for r in report_.rows)
    by_label = {(lv.l, lv.label): lv.energy for lv in levels}
    anchor_ok = all(abs(by_label[k] - v) < 2e-5 for k, v in anchors.items())
    ok = report_.all_passed and anchor_ok and raw < 2e-5
    report(capsys, number, ok,
           f"{column}: {s['match'] + s['borderline']}/{s['total']} rows "
           f"(borderline {s['borderline']}), max |delta| {raw:.2e}"
           + (f"; mismatches: {', '.join(bad)}" if bad else ""))
    return report_, anchor_ok, raw


def test_3_h2_table(capsys, basis, table):
    t0 = time.perf_counter()
    lv = compute_levels(H2, 7, 5, basis, table=table)
    elapsed = time.perf_counter() - t0
    anchors = {(0, "1s1s"): -2.90367, (0, "1s2s"): -2.14580, (1, "1s2p"): -2.12617,
               (2, "1s3d"): -2.05555}
    rep, anchor_ok, raw = _table_check(capsys, 3, lv, table, "H2", anchors)
    assert rep.all_passed, [r.label for r in rep.failures()]
    assert anchor_ok and raw < 2e-5
    assert elapsed < 60


def test_4_h1_table(capsys, levels, table):
    anchors = {(0, "1s1s"): -3.29443, (0, "1s2s"): -2.15290}
    rep, anchor_ok, raw = _table_check(capsys, 4, levels["h1"], table, "H1", anchors)
    assert rep.all_passed, [r.label for r in rep.failures()]
    assert anchor_ok and raw < 2e-5


def test_5_high_l(capsys, levels):
    worst = 0.0
    for name in ("h1", "h2"):
        for lv in levels[name]:
            if lv.l >= 3:
                worst = max(worst, abs(lv.energy - (-2 - 0.5 / lv.n**2)))
    report(capsys, 5, worst < 2e-5, f"max |E - (-2 - 1/2n^2)| over l>=3 = {worst:.2e} (tol 2e-5)")
    assert worst < 2e-5


def test_6_oracle_properties(capsys):
    Z = 2.0
    radii = np.geomspace(1e-2, 30, 40)
    norm = max(abs(weighted_integral(Z, r, lambda x: np.ones_like(x)) - 1) for r in radii)
    fi = np.array([expectation_numeric(Z, r, "fi") for r in radii])
    fj = np.array([expectation_numeric(Z, r, "fj") for r in radii])
    bounded = bool(np.all((fi >= 0) & (fi <= 1) & (fj >= 0) & (fj <= 1)))
    ident = max(abs(expectation_numeric(Z, r, "fi", 1.0) + expectation_numeric(Z, r, "fj", 1.0) - 1)
                for r in radii)

    # stationarity: a root exists for Z < 2 when r_j > 0, and only at Z = 2 when r_j = 0
    stat, missing = 0.0, []
    for rj in (0.0, 0.5, 1.0, 2.0):
        for z in (1.0, 1.5, 2.0):
            has_root = (z < 2.0) if rj > 0 else (z == 2.0)
            try:
                stat = max(stat, stationarity_check(z, rj).residual)
                if not has_root:
                    missing.append(f"unexpected root Z={z} rj={rj}")
            except NoRootError:
                if has_root:
                    missing.append(f"no root Z={z} rj={rj}")

    zr = np.linspace(4, 20, 33)
    track = max(abs(expectation_numeric(Z, x / Z, "fi") - zeta_h1(Z, x / Z)) for x in zr)
    diverge = min(abs(expectation_numeric(Z, x / Z, "fj") - zeta_h1(Z, x / Z)) for x in zr)

    parts = {
        "normalisation": norm < 1e-9,
        "bounded": bounded,
        "identity": ident < 1e-9,
        "stationarity": stat < 1e-10 and not missing,
        "fi tracks closed form": track < 0.02,
    }
    ok = all(parts.values())
    report(capsys, 6, ok,
           f"norm {norm:.1e}, bounded {bounded}, identity {ident:.1e}, "
           f"stationarity {stat:.1e} {missing or ''}, "
           f"max |fi - zeta| on Zr in [4,20] = {track:.4f} (tol 0.02), "
           f"min |fj - zeta| there = {diverge:.3f} (recorded)")
    assert norm < 1e-9
    assert bounded
    assert ident < 1e-9
    assert stat < 1e-10 and not missing
    assert track < 0.02


def test_7_calibration(capsys):
    problem = CalibrationProblem(2.0, -2.90372)
    result = fit_alpha(problem)
    in_range = 0.458 <= result.alpha <= 0.465
    # fixed point: target set to the energy computed at the published alpha
    f = Objective(problem)
    target = f.ground_energy(0.46135)
    fp = fit_alpha(CalibrationProblem(2.0, target, (0.4, 0.5), 1e-8))
    fp_ok = abs(fp.alpha - 0.46135) <= 1e-8
    ok = in_range and result.evaluations <= 60 and fp_ok
    report(capsys, 7, ok,
           f"alpha* = {result.alpha:.7f} in [0.458, 0.465], {result.evaluations} evaluations, "
           f"fixed-point error {abs(fp.alpha - 0.46135):.1e}")
    assert in_range
    assert result.evaluations <= 60
    assert fp_ok


def test_8_knot_insensitivity(capsys, table_basis):
    linear = build_basis(TABLE_PROFILE.with_(n_splines=900, knot_scheme="linear"))
    worst = {}
    for model in (H1, H2):
        for l in range(8):
            a = solve_channel(table_basis, ChannelSpec(model, l, 5)).eigenvalues
            b = solve_channel(linear, ChannelSpec(model, l, 5)).eigenvalues
            worst[(model.variant.value, l)] = float(np.max(np.abs(a - b)))
    bad = {k: v for k, v in worst.items() if v >= 1e-7}
    report(capsys, 8, not bad,
           f"max shift {max(worst.values()):.2e} (tol 1e-7)"
           + (f"; over tolerance: {', '.join(f'{m} l={l}: {v:.1e}' for (m, l), v in bad.items())}"
              if bad else ""))
    assert not bad


def test_9_validate_command(capsys):
    t0 = time.perf_counter()
    code = main(["validate"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out.splitlines()
    ok = code == 0 and elapsed < 180
    report(capsys, 9, ok, f"exit {code} in {elapsed:.1f} s; {out[-2]}")
    assert elapsed < 180
    assert code == 0
