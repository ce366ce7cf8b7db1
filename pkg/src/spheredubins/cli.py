"""Command line front end.

Three subcommands:

* ``plan``       shortest candidate path for a target rotation or a
                 start/goal configuration pair
* ``integrate``  run the chart integrator open loop, or synthesize an
                 extremal when a costate is supplied
* ``verify``     run the named verification suites

Angles cross the JSON/CSV boundary in degrees; everything internal is
radians.  Output files are byte-deterministic: sorted JSON keys, fixed
float formatting, no timestamps.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 no
solution or infeasible trajectory, 4 turn radius outside the
guaranteed domain.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND, core
from .adjoint import SphericalAdjoint, integrate_spherical_extremal
from .errors import (
    AbnormalSingularError,
    ChartPoleError,
    DomainRadiusError,
    NoSolutionError,
)
from .planner import plan, plan_between
from .sabban import sample_trace, segment_control
from .spherical import (
    SphericalConfig,
    SphericalParams,
    config_from_degrees,
    config_to_degrees,
    from_rotation,
    to_rotation,
)
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_SCHEMA = 2
EXIT_NO_SOLUTION = 3
EXIT_DOMAIN = 4


class SchemaError(ValueError):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_json(path, obj) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        _write_text(Path(path), text)
    return text


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _load_input(path: str) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read input file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"input is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("input must be a JSON object")
    return obj


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise SchemaError(f"missing key {key!r} in {where}")
    value = obj[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{where}.{key} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{where}.{key} has the wrong type")
    return value


def _config_from_json(obj, where: str) -> SphericalConfig:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object with lat_deg, "
                          "lon_deg, heading_deg")
    for key in ("lat_deg", "lon_deg", "heading_deg"):
        _require(obj, key, float, where)
    try:
        return config_from_degrees(obj)
    except ChartPoleError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _rotation_from_json(values, where: str) -> np.ndarray:
    if (not isinstance(values, list) or len(values) != 9
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in values)):
        raise SchemaError(f"{where} must be a list of 9 numbers "
                          "(row-major rotation)")
    m = np.array(values, dtype=float).reshape(3, 3)
    if (np.max(np.abs(m.T @ m - np.eye(3))) > 1e-6
            or np.linalg.det(m) < 0.0):
        raise SchemaError(f"{where} is not a rotation matrix")
    return m


def _rotation_to_list(m) -> list:
    return [float(v) for v in np.asarray(m, dtype=float).ravel()]


# ----------------------------------------------------------------- plan ----

def _cmd_plan(args) -> int:
    spec = _load_input(args.input)
    radius = _require(spec, "radius", float, "input")
    start = None
    if "start" in spec or "goal" in spec:
        start = _config_from_json(spec.get("start"), "input.start")
        goal = _config_from_json(spec.get("goal"), "input.goal")
        result = plan_between(start, goal, radius,
                              allow_out_of_domain=args.allow_out_of_domain)
    elif "rotation" in spec:
        target = _rotation_from_json(spec["rotation"], "input.rotation")
        result = plan(target, radius,
                      allow_out_of_domain=args.allow_out_of_domain)
    else:
        raise SchemaError("input needs either start/goal configurations "
                          "or a rotation")

    def path_json(c):
        return {
            "word": c.word,
            "lengths": [float(v) for v in c.lengths],
            "total_length": float(c.total_length),
            "residual": float(c.residual),
        }

    report = {
        "backend": BACKEND,
        "radius": radius,
        "max_steering": result.params.u_max,
        "target_rotation": _rotation_to_list(result.target),
        "best": path_json(result.best),
        "candidates": [path_json(c) for c in result.candidates],
    }
    out_dir = Path(args.out) if args.out else None
    text = _write_json(out_dir / "plan.json" if out_dir else None, report)
    if out_dir is None:
        sys.stdout.write(text)

    if args.trace:
        if out_dir is None:
            raise SchemaError("--trace requires --out")
        segments = result.best.segments()
        g0 = to_rotation(start) if start is not None else np.eye(3)
        rows = []
        chart_rows = []
        for s, g in sample_trace(g0, segments, result.params, ds=args.step):
            u = segment_control(segments, result.params, s)
            rows.append((s,
                         g[0, 0], g[1, 0], g[2, 0],
                         g[0, 1], g[1, 1], g[2, 1],
                         g[0, 2], g[1, 2], g[2, 2],
                         u))
            if chart_rows is not None:
                try:
                    d = config_to_degrees(from_rotation(g))
                except ChartPoleError:
                    chart_rows = None  # path crosses the guard band
                else:
                    chart_rows.append((s, d["lat_deg"], d["lon_deg"],
                                       d["heading_deg"], u))
        _write_csv(out_dir / "plan_trace_frame.csv",
                   ["s", "X1", "X2", "X3", "T1", "T2", "T3",
                    "N1", "N2", "N3", "u"], rows)
        if chart_rows is not None:
            _write_csv(out_dir / "plan_trace_chart.csv",
                       ["s", "lat_deg", "lon_deg", "heading_deg", "u"],
                       chart_rows)
    return EXIT_OK


# ------------------------------------------------------------ integrate ----

def _eta_from_spec(spec: dict) -> float:
    if ("eta" in spec) == ("radius" in spec):
        raise SchemaError("input needs exactly one of eta or radius")
    if "eta" in spec:
        eta = _require(spec, "eta", float, "input")
        if eta <= 0.0:
            raise SchemaError("input.eta must be positive")
        return eta
    radius = _require(spec, "radius", float, "input")
    if not 0.0 < radius < 1.0:
        raise SchemaError("input.radius must lie in (0, 1)")
    return radius / math.sqrt(1.0 - radius * radius)


def _cmd_integrate(args) -> int:
    spec = _load_input(args.input)
    eta = _eta_from_spec(spec)
    params = SphericalParams(eta)
    if "start" not in spec:
        raise SchemaError("input needs a start configuration")
    c0 = _config_from_json(spec["start"], "input.start")

    if ("controls" in spec) == ("costate" in spec):
        raise SchemaError("input needs exactly one of controls or costate")

    out_dir = Path(args.out) if args.out else None
    if args.trace and out_dir is None:
        raise SchemaError("--trace requires --out")

    if "controls" in spec:
        raw = spec["controls"]
        if not isinstance(raw, list) or not raw:
            raise SchemaError("input.controls must be a non-empty list")
        schedule = []
        for i, piece in enumerate(raw):
            where = f"input.controls[{i}]"
            if not isinstance(piece, dict):
                raise SchemaError(f"{where} must be an object")
            u = _require(piece, "steering", float, where)
            length = _require(piece, "length", float, where)
            if abs(u) > 1.0:
                raise SchemaError(f"{where}.steering must lie in [-1, 1]")
            if length < 0.0:
                raise SchemaError(f"{where}.length must be nonnegative")
            schedule.append((u, length))
        rows = [(0.0, c0.lat, c0.lon, c0.heading, schedule[0][0])]
        lat, lon, hdg = c0.lat, c0.lon, c0.heading
        done = 0.0
        for u, length in schedule:
            n = max(1, int(math.ceil(length / args.step - 1e-12)))
            sub = length / n
            for _ in range(n):
                lat, lon, hdg, breach = core.rk4_spherical(
                    lat, lon, hdg, u, eta, sub, args.step)
                if breach >= 0.0:
                    raise ChartPoleError(
                        "pole guard breached at arc length "
                        f"{done + breach:.6f}", breach_s=done + breach)
                done += sub
                rows.append((done, lat, lon, hdg, u))
        c_end = SphericalConfig(lat, lon, hdg)
        report = {
            "backend": BACKEND,
            "eta": eta,
            "turn_radius": params.turn_radius,
            "arc_length": done,
            "end": config_to_degrees(c_end),
            "end_rotation": _rotation_to_list(to_rotation(c_end)),
        }
        switch_rows = None
    else:
        cmeta = spec["costate"]
        if not isinstance(cmeta, dict):
            raise SchemaError("input.costate must be an object")
        lam_lat = _require(cmeta, "lam_lat", float, "input.costate")
        lam_lon = _require(cmeta, "lam_lon", float, "input.costate")
        lam_hdg = _require(cmeta, "lam_hdg", float, "input.costate")
        cost_mult = float(cmeta.get("cost_mult", -1.0))
        if cost_mult not in (-1.0, 0.0):
            raise SchemaError("input.costate.cost_mult must be -1 or 0")
        s_max = _require(spec, "s_max", float, "input")
        if s_max <= 0.0:
            raise SchemaError("input.s_max must be positive")
        a0 = SphericalAdjoint(lam_lat, lam_lon, lam_hdg, cost_mult)
        ext = integrate_spherical_extremal(c0, a0, params, s_max,
                                           step=args.step)
        end = ext.rows[-1]
        c_end = SphericalConfig(end[1], end[2], end[3])
        report = {
            "backend": BACKEND,
            "eta": eta,
            "turn_radius": params.turn_radius,
            "arc_length": float(end[0]),
            "end": config_to_degrees(c_end),
            "end_rotation": _rotation_to_list(to_rotation(c_end)),
            "word": "".join(seg.kind for seg in ext.word),
            "segment_lengths": [float(seg.length) for seg in ext.word],
            "max_abs_hamiltonian": ext.max_abs_hamiltonian,
            "hamiltonian_drift": ext.hamiltonian_drift,
            "switch_count": len(ext.switches),
        }
        rows = [(r[0], r[1], r[2], r[3], r[7]) for r in ext.rows]
        switch_rows = [(ev.s, ev.value, ev.rate,
                        -ev.control_before / eta, -ev.control_after / eta)
                       for ev in ext.switches]

    text = _write_json(out_dir / "integrate.json" if out_dir else None,
                       report)
    if out_dir is None:
        sys.stdout.write(text)
    if args.trace:
        deg = math.degrees
        _write_csv(out_dir / "integrate_trace.csv",
                   ["s", "lat_deg", "lon_deg", "heading_deg", "u"],
                   [(s, deg(a), deg(b), deg(c), u)
                    for s, a, b, c, u in rows])
        if switch_rows is not None:
            _write_csv(out_dir / "integrate_switches.csv",
                       ["s_switch", "H12", "dH12",
                        "kappa_before", "kappa_after"],
                       switch_rows)
    return EXIT_OK


# --------------------------------------------------------------- verify ----

def _cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    all_passed = True
    for name in names:
        report = run_suite(name, tolerance=args.tolerance,
                           quick=args.quick, seed=args.seed)
        reports.append(report)
        all_passed &= report["passed"]
        for check in report["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            if check["tolerance"] is None:
                detail = str(check["value"])
            else:
                detail = f"{check['value']:.3e} (tol {check['tolerance']:g})"
            print(f"[{status}] {name}: {check['name']} = {detail}")
        print(f"suite {name}: {'ok' if report['passed'] else 'FAILED'}")
    if args.out:
        _write_json(Path(args.out) / "verify.json",
                    {"backend": BACKEND, "suites": reports,
                     "passed": bool(all_passed)})
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


# ----------------------------------------------------------------- main ----

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spheredubins",
        description="Bounded-curvature shortest paths on the unit sphere.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="solve for a shortest path")
    p_plan.add_argument("--input", required=True,
                        help="JSON with radius plus start/goal or rotation")
    p_plan.add_argument("--out", help="directory for plan.json and traces")
    p_plan.add_argument("--step", type=float, default=1e-3,
                        help="trace sampling arc length (default 1e-3)")
    p_plan.add_argument("--trace", action="store_true",
                        help="write trace CSVs next to plan.json")
    p_plan.add_argument("--allow-out-of-domain", action="store_true",
                        help="search even when the radius has no "
                             "completeness guarantee")
    p_plan.set_defaults(func=_cmd_plan)

    p_int = sub.add_parser("integrate",
                           help="integrate the chart equations")
    p_int.add_argument("--input", required=True,
                       help="JSON with eta/radius, start and "
                            "controls or costate")
    p_int.add_argument("--out", help="directory for integrate.json "
                                     "and traces")
    p_int.add_argument("--step", type=float, default=1e-3,
                       help="integrator step (default 1e-3)")
    p_int.add_argument("--trace", action="store_true",
                       help="write trace CSVs next to integrate.json")
    p_int.set_defaults(func=_cmd_integrate)

    p_ver = sub.add_parser("verify", help="run verification suites")
    p_ver.add_argument("--suite", default="all",
                       choices=sorted(SUITES) + ["all"])
    p_ver.add_argument("--tolerance", type=float, default=None,
                       help="override the suite's headline tolerance")
    p_ver.add_argument("--quick", action="store_true",
                       help="smaller sample counts")
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.add_argument("--out", help="directory for verify.json")
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except DomainRadiusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NoSolutionError, ChartPoleError,
            AbnormalSingularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION


if __name__ == "__main__":
    sys.exit(main())
