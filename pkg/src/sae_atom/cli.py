"""Command-line interface: ``sae-atom {spectrum,validate,oracle,fit-alpha}``.

Exit codes: 0 success, 1 computation failure or table mismatch, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .basis import FAST_PROFILE, BasisConfig, KnotScheme, build_basis
from .calibration import REFERENCE_GROUND, CalibrationProblem, fit_alpha
from .errors import BasisError, CalibrationInfeasibleError
from .oracle import OracleConfig, compare_closed_form
from .potentials import DEFAULT_ALPHA, PotentialModel, Variant
from .spectrum import CorePolicy, ReferenceTable, compare_reference, compute_levels, emit

log = logging.getLogger("sae_atom")

_SKIP = {"command", "config", "echo_config", "func", "verbose", "_parser"}


def _bracket(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
    return lo, hi


def _rows(text: str) -> list[int]:
    out = []
    for item in text.split(","):
        item = item.strip().upper()
        if not item.startswith("L") or not item[1:].isdigit():
            raise argparse.ArgumentTypeError(f"row filter must look like L0,L3; got {text!r}")
        out.append(int(item[1:]))
    return out


def _add_basis_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("basis")
    g.add_argument("--n-splines", dest="n_splines", type=int, default=None)
    g.add_argument("--rmax", type=float, default=None, help="box radius in bohr")
    g.add_argument("--order", type=int, default=None, help="spline order k")
    g.add_argument("--knots", choices=[s.value for s in KnotScheme], default=None)
    g.add_argument("--clustering", type=float, default=None)
    g.add_argument("--quad-points", dest="quad_points", type=int, default=None)
    g.add_argument("--fast", action="store_true",
                   help="300 splines, rmax=100: quick runs, low-lying states only")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="file of 'key = value' lines; flags override")
    p.add_argument("--echo-config", action="store_true",
                   help="print the effective configuration and exit")
    p.add_argument("--output", "-o", default="-", help="destination file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sae-atom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="1snl energies for one model potential")
    sp.add_argument("--model", choices=[v.value for v in Variant], default="h2")
    sp.add_argument("--Z", type=float, default=2.0)
    sp.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    sp.add_argument("--lmax", type=int, default=7)
    sp.add_argument("--nper", type=int, default=5)
    sp.add_argument("--policy", choices=[c.value for c in CorePolicy], default="ionic_core")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_basis_options(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_spectrum)

    va = sub.add_parser("validate", help="regress H1 and H2 against the bundled table")
    va.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    va.add_argument("--rows", type=_rows, default=None, help="e.g. L0 or L0,L2")
    va.add_argument("--table", type=Path, default=None, help="alternative table file")
    _add_basis_options(va)
    _add_common(va)
    va.set_defaults(func=cmd_validate)

    orc = sub.add_parser("oracle", help="screening-factor expectation values vs the closed form")
    orc.add_argument("--Z", type=float, default=2.0)
    orc.add_argument("--rmin", type=float, default=0.1)
    orc.add_argument("--rmax", type=float, default=10.0)
    orc.add_argument("--points", type=int, default=50)
    orc.add_argument("--spacing", choices=["linear", "log"], default="linear")
    orc.add_argument("--variant", choices=["fi", "fj", "both"], default="both")
    orc.add_argument("--tol", type=float, default=1e-10)
    _add_common(orc)
    orc.set_defaults(func=cmd_oracle)

    fa = sub.add_parser("fit-alpha", help="tune alpha to a target ground-state energy")
    fa.add_argument("--Z", type=float, default=2.0)
    fa.add_argument("--target", type=float, default=REFERENCE_GROUND,
                    help="two-electron ground-state energy (default: He reference -2.90372)")
    fa.add_argument("--bracket", type=_bracket, default=(0.1, 0.9))
    fa.add_argument("--tol", type=float, default=1e-6)
    fa.add_argument("--format", choices=["text", "json"], default="text")
    _add_basis_options(fa)
    _add_common(fa)
    fa.set_defaults(func=cmd_fit_alpha)
    parser._subparser_map = sub.choices  # type: ignore[attr-defined]
    return parser


# --- configuration -----------------------------------------------------------------

def read_config(path: Path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(path.read_text("utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _canonical(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_canonical(v) for v in value)
    if isinstance(value, list):
        return ",".join(f"L{v}" for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def echo_config(args: argparse.Namespace) -> str:
    lines = [f"# sae-atom {args.command}", f"command = {args.command}"]
    for key in sorted(vars(args)):
        value = getattr(args, key)
        if key in _SKIP or value is None:
            continue
        lines.append(f"{key} = {_canonical(value)}")
    return "\n".join(lines) + "\n"


def _apply_config(parser: argparse.ArgumentParser, sub: argparse.ArgumentParser,
                  values: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        if key == "command":
            continue
        action = actions.get(key)
        if action is None or key in _SKIP:
            parser.error(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                parser.error(f"config key {key!r} expects true/false")
            defaults[key] = value.lower() in ("true", "1", "yes")
        else:
            if action.choices is not None and value not in action.choices:
                parser.error(f"config key {key!r}: {value!r} not in {list(action.choices)}")
            defaults[key] = value  # argparse converts string defaults with the action's type
    sub.set_defaults(**defaults)


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            values = read_config(args.config)
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        if values.get("command", args.command) != args.command:
            parser.error(f"config file is for command {values['command']!r}")
        sub = parser._subparser_map[args.command]  # type: ignore[attr-defined]
        _apply_config(parser, sub, values)
        args = parser.parse_args(argv)
    args._parser = parser
    return args


def _usage(args, message: str):
    args._parser._subparser_map[args.command].error(message)


def basis_config(args) -> BasisConfig:
    cfg = FAST_PROFILE if args.fast else BasisConfig()
    changes = {
        "n_splines": args.n_splines,
        "rmax": args.rmax,
        "order_k": args.order,
        "knot_scheme": args.knots,
        "clustering": args.clustering,
        "quad_points_per_interval": args.quad_points,
    }
    changes = {k: v for k, v in changes.items() if v is not None}
    if "order_k" in changes and "quad_points_per_interval" not in changes:
        changes["quad_points_per_interval"] = changes["order_k"] + 4
    try:
        return cfg.with_(**changes)
    except BasisError as exc:
        _usage(args, str(exc))


def _write(args, text: str) -> None:
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")


# --- commands -------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    if args.model == "h2" and not 0.0 < args.alpha < 1.0:
        _usage(args, f"--alpha {args.alpha}: alpha must lie in (0,1) for model h2")
    if args.Z <= 0:
        _usage(args, "--Z must be positive")
    if args.lmax < 0 or args.nper < 1:
        _usage(args, "--lmax must be >= 0 and --nper >= 1")
    cfg = basis_config(args)
    if args.nper > cfg.n_splines - 4:
        _usage(args, "--nper exceeds the basis dimension")
    model = PotentialModel(args.model, args.Z, args.alpha)
    levels = compute_levels(model, args.lmax, args.nper, build_basis(cfg),
                            args.policy, ReferenceTable.load())
    _write(args, emit(levels, args.format))
    return 0


def _format_row(r) -> str:
    table = "" if r.table is None else str(r.table)
    delta = "" if r.delta is None else f"{r.delta:+.2e}"
    return (f"{r.column:<3} L={r.l} {r.label:<6} computed={r.computed:.9f} "
            f"trunc={r.truncated} table={table:<9} delta={delta:<10} {r.status}")


def cmd_validate(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        _usage(args, f"--alpha {args.alpha}: alpha must lie in (0,1)")
    try:
        table = ReferenceTable.load(args.table)
    except (OSError, ValueError) as exc:
        _usage(args, f"cannot read table: {exc}")
    ls = args.rows
    lmax = max(r.l for r in table.rows) if ls is None else max(ls)
    nper = max(n - l for l, n in table.keys()) if table.rows else 5
    basis = build_basis(basis_config(args))

    lines, counts, ok = [], [], True
    for variant, column in (("h1", "H1"), ("h2", "H2")):
        model = PotentialModel(variant, 2.0, args.alpha)
        levels = compute_levels(model, lmax, nper, basis)
        report = compare_reference(levels, table, column, ls)
        lines.extend(_format_row(r) for r in report.rows)
        s = report.summary()[column]
        passed = s["match"] + s["borderline"]
        counts.append((column, passed, s["total"], s["borderline"]))
        ok &= report.all_passed
        if variant == "h2":
            ref = compare_reference(levels, table, "Ref", ls).summary()["Ref"]
            info = (f"info: H2 vs Ref column {ref['match'] + ref['borderline']}/{ref['total']} "
                    f"agree under truncation")
    summary = ", ".join(f"{p}/{t} {c} rows" for c, p, t, _ in counts) + " match"
    border = ", ".join(f"{c} {b}" for c, _, _, b in counts)
    lines.append(f"{summary} (borderline: {border})")
    lines.append(info)
    _write(args, "\n".join(lines) + "\n")
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    if args.points < 1:
        _usage(args, "--points must be >= 1")
    if not 0 < args.rmin <= args.rmax:
        _usage(args, "need 0 < --rmin <= --rmax")
    if args.Z <= 0 or not 0 < args.tol <= 1e-6:
        _usage(args, "need --Z > 0 and --tol in (0, 1e-6]")
    space = np.geomspace if args.spacing == "log" else np.linspace
    grid = tuple(float(r) for r in space(args.rmin, args.rmax, args.points))
    variants = ("fi", "fj") if args.variant == "both" else (args.variant,)
    series_variant = "fi" if args.variant == "both" else args.variant
    config = OracleConfig(args.Z, grid, series_variant, 1, args.tol)
    report = compare_closed_form(config, variants)
    _write(args, report.to_csv())
    if all(rec.status != "ok" for rec in report.records):
        print("error: quadrature failed on every row", file=sys.stderr)
        return 1
    return 0


def cmd_fit_alpha(args) -> int:
    lo, hi = args.bracket
    if not 0.0 < lo < hi < 1.0:
        _usage(args, f"--bracket {lo},{hi}: need 0 < lo < hi < 1")
    if not 1e-8 <= args.tol <= 1e-3:
        _usage(args, "--tol must lie in [1e-8, 1e-3]")
    if args.target >= 0 or args.Z <= 0:
        _usage(args, "need --target < 0 and --Z > 0")
    problem = CalibrationProblem(args.Z, args.target, (lo, hi), args.tol, basis_config(args))
    try:
        result = fit_alpha(problem)
    except CalibrationInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for a, v in exc.profile:
            print(f"  alpha={a:.8f} residual={v:+.6e}", file=sys.stderr)
        return 1
    if args.format == "json":
        text = json.dumps({"alpha": result.alpha, "residual": result.residual,
                           "evaluations": result.evaluations, "method": result.method,
                           "Z": args.Z, "target": args.target}, indent=1) + "\n"
    else:
        text = (f"alpha = {result.alpha:.8f}\nresidual = {result.residual:+.3e}\n"
                f"evaluations = {result.evaluations}\nmethod = {result.method}\n")
    _write(args, text)
    return 0


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.echo_config:
        _write(args, echo_config(args))
        return 0
    try:
        return args.func(args)
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
