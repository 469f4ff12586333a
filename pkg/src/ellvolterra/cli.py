"""Command-line front door: validate, classify, iterate and analyze operators.

All output is deterministic for identical inputs: JSON keys are sorted and
floats use their shortest round-trip representation (at most 17 significant
digits).  Exit codes: 0 success, 1 validation/file failure, 2 usage error.
Species indices in files and reports are 1-based.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classify import detect_ell, enumerate_extremals, extremal_count
from .core import (
    CubicMatrix,
    MatrixValidationError,
    apply,
    collect_violations,
    load_operator,
)
from .dynamics import (
    FixedPointReport,
    detect_cycle,
    find_fixed_points,
    omega_limit_estimate,
    orbit,
    orbit_to_csv,
)
from .families import CycleSpec, M2Params, M3SymParams, cycle_family, m2_analyze, m2_operator, m3_analyze, m3_coefficients, m3_operator

SCHEMA_VERSION = 1


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _point_list(x: np.ndarray) -> list[float]:
    return [float(v) for v in x]


def _eig_list(eigs: np.ndarray) -> list[list[float]]:
    return [[float(e.real), float(e.imag)] for e in eigs]


def _fp_dict(report: FixedPointReport) -> dict:
    return {
        "location": _point_list(report.location),
        "residual": float(report.residual),
        "eigenvalues": _eig_list(report.eigenvalues),
        "type": report.type,
        "source": report.source,
    }


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(args: argparse.Namespace, payload: dict) -> None:
    _emit(args, json.dumps(payload, sort_keys=True) + "\n")


def _violation_dict(v) -> dict:
    d = {"kind": type(v).__name__.removesuffix("Error").lower(), "i": v.i, "j": v.j}
    if hasattr(v, "k"):
        d["k"] = v.k
    if hasattr(v, "total"):
        d["sum"] = v.total
    return d


def _cmd_validate(args: argparse.Namespace) -> int:
    with open(args.operator, encoding="utf-8") as fh:
        payload = json.load(fh)
    entries = np.asarray(payload["P"], dtype=float)
    m = int(payload["m"])
    if entries.shape != (m, m, m):
        _emit_json(args, {"schema": SCHEMA_VERSION, "valid": False,
                          "violations": [{"kind": "shape", "shape": list(entries.shape)}]})
        return 1
    violations = collect_violations(entries)
    if violations:
        _emit_json(args, {"schema": SCHEMA_VERSION, "valid": False,
                          "violations": [_violation_dict(v) for v in violations]})
        return 1
    _emit_json(args, {"schema": SCHEMA_VERSION, "valid": True, "m": m})
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    V = load_operator(args.operator)
    cls = detect_ell(V)
    _emit_json(args, {
        "schema": SCHEMA_VERSION,
        "m": cls.m,
        "ell": cls.ell,
        "is_volterra": cls.is_volterra,
        "volterra_coords": sorted(cls.volterra_coords),
        "witnesses": {str(k): list(pair) for k, pair in sorted(cls.witnesses.items())},
        "non_prefix_volterra_coords": sorted(cls.non_prefix_volterra_coords),
        "unclassifiable": cls.unclassifiable,
    })
    return 0


def _cmd_apply(args: argparse.Namespace) -> int:
    V = load_operator(args.operator)
    image = apply(V, _floats(args.x))
    _emit_json(args, {"schema": SCHEMA_VERSION, "image": _point_list(image)})
    return 0


def _cmd_orbit(args: argparse.Namespace) -> int:
    V = load_operator(args.operator)
    o = orbit(V, _floats(args.x0), args.n)
    if args.format == "csv":
        _emit(args, orbit_to_csv(o))
    else:
        _emit_json(args, {"schema": SCHEMA_VERSION,
                          "points": [_point_list(row) for row in o.points]})
    return 0


def _cmd_fixed_points(args: argparse.Namespace) -> int:
    V = load_operator(args.operator)
    scan = find_fixed_points(V, grid_density=args.grid)
    line = None
    if scan.fixed_line is not None:
        line = {
            "point": _point_list(scan.fixed_line.point),
            "direction": _point_list(scan.fixed_line.direction),
            "member_count": scan.fixed_line.member_count,
            "max_deviation": scan.fixed_line.max_deviation,
        }
    _emit_json(args, {
        "schema": SCHEMA_VERSION,
        "fixed_points": [_fp_dict(r) for r in scan.reports],
        "discarded_starts": scan.discarded_starts,
        "fixed_line": line,
    })
    return 0


def _cmd_cycles(args: argparse.Namespace) -> int:
    V = load_operator(args.operator)
    report = detect_cycle(V, _floats(args.x0), burn_in=args.burn_in, max_period=args.max_period)
    payload: dict = {"schema": SCHEMA_VERSION, "cycle": None}
    if report is not None:
        payload["cycle"] = {
            "period": report.period,
            "points": [_point_list(row) for row in report.points],
            "closure_residual": report.closure_residual,
        }
    _emit_json(args, payload)
    return 0


def _parse_ell(text: str, m: int) -> int | None:
    if text == "all":
        return None
    ell = int(text)
    if not 0 <= ell <= m:
        raise ValueError(f"--ell must be in 0..{m} or 'all', got {text}")
    return ell


def _cmd_extremals_count(args: argparse.Namespace) -> int:
    _emit(args, f"{extremal_count(args.m, _parse_ell(args.ell, args.m))}\n")
    return 0


def _cmd_extremals_enumerate(args: argparse.Namespace) -> int:
    ell = _parse_ell(args.ell, args.m)
    total = extremal_count(args.m, ell)
    width = max(1, len(str(total - 1)))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for idx, V in enumerate(enumerate_extremals(args.m, ell)):
        payload = V.to_json_dict()
        payload["detected_ell"] = detect_ell(V).ell
        path = out_dir / f"extremal_{idx:0{width}d}.json"
        path.write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")
    sys.stdout.write(f"wrote {total} matrices to {out_dir}\n")
    return 0


def _operator_payload(V: CubicMatrix, report: dict) -> dict:
    payload = V.to_json_dict()
    payload["schema"] = SCHEMA_VERSION
    payload["report"] = report
    return payload


def _cmd_family_cycle(args: argparse.Namespace) -> int:
    cycles = tuple(tuple(int(v) for v in spec.split(",")) for spec in args.cycle)
    spec = CycleSpec(m=args.m, ell=args.ell, cycles=cycles)
    V = cycle_family(spec)
    report = {
        "family": "cycle",
        "m": spec.m,
        "ell": spec.ell,
        "cycles": [list(c) for c in spec.cycles],
        "detected_ell": detect_ell(V).ell,
    }
    _emit_json(args, _operator_payload(V, report))
    return 0


def _cmd_family_m2(args: argparse.Namespace) -> int:
    params = M2Params(a=args.a, c=args.c)
    V = m2_operator(params)
    report: dict = {"family": "m2", "a": params.a, "c": params.c,
                    "b": params.b, "d": params.d}
    if args.analyze:
        analysis = m2_analyze(params)
        report["regime"] = analysis.regime
        report["fixed_points"] = {k: _fp_dict(r) for k, r in analysis.fixed_points.items()}
        report["global_attractor"] = _point_list(analysis.global_attractor)
    _emit_json(args, _operator_payload(V, report))
    return 0


def _cmd_family_m3(args: argparse.Namespace) -> int:
    params = M3SymParams(a=args.a, b=args.b, c=args.c)
    V = m3_operator(params)
    report: dict = {"family": "m3-symmetric", "a": params.a, "b": params.b, "c": params.c,
                    "coefficients": m3_coefficients(params)}
    if args.analyze:
        analysis = m3_analyze(params)
        report["regime"] = analysis.regime
        report["fixed_points"] = {k: _fp_dict(r) for k, r in analysis.fixed_points.items()}
        report["invariant_sets"] = analysis.invariant_sets
        report["stable_manifolds"] = analysis.stable_manifolds
        report["unstable_directions"] = {
            k: _point_list(v) for k, v in analysis.unstable_directions.items()
        }
        if analysis.fixed_line is not None:
            report["fixed_line"] = {
                "coordinate_sum": analysis.fixed_line.coordinate_sum,
                "endpoints": [_point_list(e) for e in analysis.fixed_line.endpoints],
            }
    _emit_json(args, _operator_payload(V, report))
    return 0


def _barycentric_starts(m: int, grid: int) -> np.ndarray:
    import itertools

    pts = []
    for cuts in itertools.combinations(range(grid - 1 + m - 1), m - 1):
        counts = np.diff((-1,) + cuts + (grid - 1 + m - 1,)) - 1
        pts.append(counts / (grid - 1))
    return np.array(pts)


def _cmd_portrait(args: argparse.Namespace) -> int:
    V = load_operator(args.operator)
    if args.grid < 2:
        raise ValueError("--grid must be at least 2")
    m = V.m
    header = ",".join(f"x0_{i}" for i in range(1, m + 1))
    header += ",limit_type," + ",".join(f"limit_x{i}" for i in range(1, m + 1))
    lines = [header]
    for start in _barycentric_starts(m, args.grid):
        estimate = omega_limit_estimate(V, start, burn_in=args.burn_in, window=args.window)
        label = estimate.kind
        if estimate.kind == "cycle":
            label = f"cycle-{estimate.period}"
        rep = estimate.representatives[0]
        lines.append(
            ",".join(repr(float(v)) for v in start)
            + f",{label},"
            + ",".join(repr(float(v)) for v in rep)
        )
    _emit(args, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ell-volterra",
        description="Quadratic stochastic operators on the simplex: "
        "validation, Volterra-prefix classification, dynamics, families.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--seed", type=int, default=0,
        help="seed for sampling-based checks (reserved; current commands are deterministic)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("validate", help="validate operator JSON")
    p.add_argument("operator")
    add_out(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("classify", help="detect the Volterra prefix length")
    p.add_argument("operator")
    add_out(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("apply", help="apply the operator to a point")
    p.add_argument("operator")
    p.add_argument("--x", required=True, help="comma-separated coordinates")
    add_out(p)
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser("orbit", help="iterate an orbit")
    p.add_argument("operator")
    p.add_argument("--x0", required=True, help="comma-separated start point")
    p.add_argument("--n", type=int, required=True, help="number of steps")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    add_out(p)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("fixed-points", help="vertex tests plus Newton multistart")
    p.add_argument("operator")
    p.add_argument("--grid", type=int, default=20, help="barycentric grid density")
    add_out(p)
    p.set_defaults(func=_cmd_fixed_points)

    p = sub.add_parser("cycles", help="detect a periodic orbit from a start point")
    p.add_argument("operator")
    p.add_argument("--x0", required=True)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--max-period", type=int, default=20)
    add_out(p)
    p.set_defaults(func=_cmd_cycles)

    p = sub.add_parser("extremals", help="extreme points of an operator class")
    ext = p.add_subparsers(dest="extremals_command", required=True)
    q = ext.add_parser("count", help="closed-form count")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--ell", required=True, help="prefix length, or 'all' for the unconstrained set")
    add_out(q)
    q.set_defaults(func=_cmd_extremals_count)
    q = ext.add_parser("enumerate", help="write every 0/1 matrix to a directory")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--ell", required=True)
    q.add_argument("--out", dest="out_dir", required=True, help="output directory")
    q.set_defaults(func=_cmd_extremals_enumerate)

    p = sub.add_parser("family", help="construct a named operator family")
    fam = p.add_subparsers(dest="family_command", required=True)
    q = fam.add_parser("cycle", help="vertex-cycle family representative")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--cycle", action="append", required=True,
                   help="comma-separated labels in cyclic order (repeatable)")
    add_out(q)
    q.set_defaults(func=_cmd_family_cycle)
    q = fam.add_parser("m2", help="two-species family")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--c", type=float, required=True)
    q.add_argument("--analyze", action="store_true")
    add_out(q)
    q.set_defaults(func=_cmd_family_m2)
    q = fam.add_parser("m3", help="symmetric three-species family")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--c", type=float, required=True)
    q.add_argument("--analyze", action="store_true")
    add_out(q)
    q.set_defaults(func=_cmd_family_m3)

    p = sub.add_parser("portrait", help="omega-limit label for a grid of starts (CSV)")
    p.add_argument("operator")
    p.add_argument("--grid", type=int, required=True, help="points per barycentric axis")
    p.add_argument("--burn-in", type=int, default=10000)
    p.add_argument("--window", type=int, default=100)
    add_out(p)
    p.set_defaults(func=_cmd_portrait)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MatrixValidationError as exc:
        print(f"invalid operator: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{getattr(exc, 'filename', '')}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
