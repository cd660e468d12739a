"""Command-line entry point.

Exit status is 0 on success, 1 when a numerical stage fails and 2 for usage
errors (bad arguments, unreadable or invalid input).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .algebraic import BivariatePoly, ImplicitCurveModel, radial_seed, trace_curve
from .angular import AngularState, orbit as angular_orbit, p_curve_sample, s_curve_sample
from .birkhoff import BilliardTable, IntegralPoly, billiard_orbit, eval_integral, homogenize_integral
from .curves import _load_json, curve_from_dict, curve_point
from .duality import double_dual_error, dualize_integral, orbit_correspondence
from .errors import BilliardError, DegreeTooLow
from .geometry import OrientedLine, PlanePoint
from .integrability import IntegralData, certify, e4_constancy_check, invariance_residual, \
    lemma_e1_residual, remarkable_identity
from .normal_form import (coeff_A, coeff_B, lazutkin_orders, twist_fd_check, twist_profile,
                          z_expansion_slope)
from .orbit_io import read_orbit_csv, write_angular_csv, write_birkhoff_csv
from .svg import Figure, Layer, bounding_box


class UsageError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        self.stage = stage
        super().__init__(f"{stage}: {exc}")


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except DegreeTooLow as exc:
        raise UsageError(str(exc)) from exc
    except BilliardError as exc:
        raise StageError(name, exc) from exc


# --- input parsing ---------------------------------------------------------


def _json(source: str):
    try:
        return _load_json(source)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {source!r}: {exc}") from exc


def _curve(source: str):
    spec = _json(source)
    try:
        return curve_from_dict(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid curve: {exc}") from exc


def _poly(source: str) -> BivariatePoly:
    """Polynomial from ``[[i, j, c], ...]`` or ``{"poly": [...]}``; a bare
    number is a constant."""
    try:
        return BivariatePoly.constant(float(source))
    except ValueError:
        pass
    spec = _json(source)
    if isinstance(spec, dict):
        spec = spec.get("poly", spec.get("terms"))
    try:
        return BivariatePoly.from_terms(spec)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid polynomial: {exc}") from exc


def _integral(source: str) -> IntegralPoly:
    """Integral from ``[[i, j, k, c], ...]`` or ``{"terms": [...], "degree": n}``;
    with a degree the terms are lifted to it."""
    spec = _json(source)
    degree = None
    if isinstance(spec, dict):
        degree = spec.get("degree")
        spec = spec["terms"]
    try:
        if degree is not None:
            return homogenize_integral(spec, int(degree))
        return IntegralPoly.from_list(spec)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid integral: {exc}") from exc


def _pair(text: str, what: str):
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{what} must be two comma-separated numbers, got {text!r}") from exc
    return a, b


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _near_tangent_lines(table: BilliardTable, count: int, shrink: float = 0.97):
    lines = []
    for k in range(count):
        phi = 2 * math.pi * k / count + 0.1
        lines.append(OrientedLine(phi, shrink * float(table.support(phi))))
    return lines


# --- subcommands -----------------------------------------------------------


def cmd_orbit(args) -> int:
    curve = _curve(args.curve)
    a, b = _pair(args.start, "--start")
    if args.system == "angular":
        if args.integral:
            raise UsageError("--integral applies to the birkhoff system only")
        states, diags = _stage("orbit", angular_orbit, curve, AngularState.from_xy(a, b), args.steps)
        text = write_angular_csv(states, diags)
    else:
        integral = _integral(args.integral) if args.integral else None
        table = BilliardTable(curve)
        states = _stage("orbit", billiard_orbit, table, OrientedLine(a, b), args.steps)
        text = write_birkhoff_csv(states, integral)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def cmd_dual_check(args) -> int:
    curve = _curve(args.curve)
    table = BilliardTable(curve)
    lines = _near_tangent_lines(table, args.chords)
    lines.append(lines[0].reversed())
    worst = max(_stage("dual-check", orbit_correspondence, curve, l, args.steps) for l in lines)
    _emit({"chords": len(lines), "negative_chords": 1, "steps": args.steps,
           "max_pole_deviation": worst,
           "double_dual_error": _stage("dual-check", double_dual_error, curve)})
    return 0


def cmd_twist(args) -> int:
    curve = _curve(args.curve)
    phis = np.linspace(0.0, 2 * math.pi, args.n_phi, endpoint=False)
    deltas = np.linspace(1e-3, math.pi - 1e-3, args.n_delta)
    _emit({"min_twist": twist_profile(curve, phis, deltas),
           "grid": {"phibar": args.n_phi, "delta": args.n_delta, "delta_range": [1e-3, math.pi - 1e-3]},
           "fd_max_rel_err": twist_fd_check(curve)})
    return 0


def cmd_integral_check(args) -> int:
    curve = _curve(args.curve)
    phi_poly = _integral(args.integral)
    table = BilliardTable(curve)
    lines = _near_tangent_lines(table, args.seeds, shrink=0.9)
    drift_b = 0.0
    for line in lines:
        states = _stage("integral-check", billiard_orbit, table, line, args.steps)
        vals = np.array([eval_integral(phi_poly, s.line) for s in states])
        drift_b = max(drift_b, float(np.max(np.abs(vals - vals[0]))) / (1 + abs(vals[0])))
    report = {"steps": args.steps, "seeds": len(lines), "birkhoff_drift": drift_b,
              "degree": phi_poly.degree}
    if phi_poly.degree % 2 == 0:
        G = dualize_integral(phi_poly)
        seeds = [AngularState(PlanePoint(math.cos(l.phi) / l.p, math.sin(l.phi) / l.p)) for l in lines]
        report["angular_drift"] = _stage("integral-check", invariance_residual, curve, G, args.steps, seeds)
    else:
        report["angular_drift"] = None
    _emit(report)
    return 0


def cmd_identity(args) -> int:
    f, g1 = _poly(args.f), _poly(args.g1)
    try:
        data = IntegralData(f, g1, k=args.k, p_half=args.p)
    except (ValueError, BilliardError) as exc:
        raise UsageError(str(exc)) from exc
    seed = PlanePoint(*_pair(args.seed, "--seed")) if args.seed else radial_seed(f)
    trace = _stage("trace", trace_curve, ImplicitCurveModel(f, seed), step=args.step)
    idx = np.linspace(0, len(trace.points) - 1, 64).astype(int)
    e1 = max(lemma_e1_residual(data, trace.points[i], args.eps) for i in idx)
    c1, spread1 = _stage("e2", remarkable_identity, data, trace)
    c, spread4 = _stage("e4", e4_constancy_check, data, trace)
    _emit({"k": data.k, "p_half": data.p_half, "m": data.m, "eps": args.eps,
           "e1_max_rel_residual": e1, "c1": c1, "c1_spread": spread1,
           "c": c, "c_spread": spread4, "trace_points": int(len(trace.points))})
    return 0


def cmd_certify(args) -> int:
    f = _poly(args.f)
    cert = _stage("certify", certify, f, step=args.step)
    print(cert.to_json())
    return 0


def cmd_normalform(args) -> int:
    curve = _curve(args.curve)
    phis = np.linspace(0.0, 2 * math.pi, args.rows, endpoint=False)
    print(f"{'phi':>10} {'A':>22} {'B':>22}")
    for t in phis:
        print(f"{t:10.6f} {float(coeff_A(curve, t)):22.15e} {float(coeff_B(curve, t)):22.15e}")
    ratios, _ = _stage("normalform", lazutkin_orders, curve, args.phi)
    print(f"z expansion slope at phi={args.phi}: {z_expansion_slope(curve, args.phi):.6f}")
    print("step residual ratios as v halves (0.05 -> 0.025 -> 0.0125):")
    print("  phi' residual: " + " ".join(f"{r:.4f}" for r in ratios[:, 0]))
    print("  v'   residual: " + " ".join(f"{r:.4f}" for r in ratios[:, 1]))
    return 0


def cmd_render(args) -> int:
    try:
        kind, rows = read_orbit_csv(args.inp)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read orbit CSV: {exc}") from exc
    curve = _curve(args.curve) if args.curve else None
    grid = np.linspace(0.0, 2 * math.pi, 720, endpoint=False)
    layers = []
    if kind == "angular":
        pts = np.array([[r["x"], r["y"]] for r in rows])
        box_src = [pts]
        if curve is not None:
            gam = curve_point(curve, grid)
            box_src.append(gam)
            layers.append(Layer("curve", gam, "closed", "#1f3a93", 1.5))
            layers.append(Layer("s-curve", s_curve_sample(curve, grid), "polyline", "#c0392b", 1.0))
            layers.append(Layer("p-curve", p_curve_sample(curve, grid), "polyline", "#27ae60", 1.0))
        layers.append(Layer("orbit", pts, "dots", "#000000", 1.5))
    else:
        hits = np.array([[r["hit_x"], r["hit_y"]] for r in rows if r["hit_x"] is not None]).reshape(-1, 2)
        box_src = [hits]
        if curve is not None:
            bd = BilliardTable(curve).point(grid)
            box_src.append(bd)
            layers.append(Layer("table", bd, "closed", "#1f3a93", 1.5))
        layers.append(Layer("chords", hits, "polyline", "#7f8c8d", 0.4))
        layers.append(Layer("orbit", hits, "dots", "#000000", 1.5))
    if not any(len(b) for b in box_src):
        raise UsageError("nothing to draw")
    fig = Figure(bounding_box(*box_src), size=args.size, title=f"{kind} orbit")
    for layer in layers:
        fig.add(layer)
    fig.save(args.out)
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dualbilliards",
                                 description="Angular and Birkhoff billiards under polar duality.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="iterate a map and write the orbit as CSV")
    p.add_argument("--system", choices=["angular", "birkhoff"], required=True)
    p.add_argument("--curve", required=True, help="curve JSON (file or inline)")
    p.add_argument("--start", required=True,
                   help="angular: 'x,y' in O-centred coordinates; birkhoff: 'phi,p' of the line")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    p.add_argument("--integral", help="integral JSON, evaluated along a birkhoff orbit")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("dual-check", help="compare dualized billiard orbits with angular orbits")
    p.add_argument("--curve", required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--chords", type=int, default=20)
    p.set_defaults(func=cmd_dual_check)

    p = sub.add_parser("twist", help="minimum twist over a grid")
    p.add_argument("--curve", required=True)
    p.add_argument("--n-phi", type=int, default=256)
    p.add_argument("--n-delta", type=int, default=64)
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("integral-check", help="drift of an integral along both maps")
    p.add_argument("--curve", required=True)
    p.add_argument("--integral", required=True)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seeds", type=int, default=5)
    p.set_defaults(func=cmd_integral_check)

    p = sub.add_parser("identity", help="residuals of the integrability identities")
    p.add_argument("--f", required=True, help="polynomial JSON of the curve")
    p.add_argument("--g1", default="1", help="polynomial JSON or a constant")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=float, default=None, help="half the degree of f^k g1")
    p.add_argument("--seed", help="'x,y' point on the oval to trace")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--step", type=float, default=1e-2)
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("certify", help="non-integrability certificate as JSON")
    p.add_argument("--f", required=True)
    p.add_argument("--step", type=float, default=1e-2)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("normalform", help="expansion coefficients and decay orders")
    p.add_argument("--curve", required=True)
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--phi", type=float, default=0.7)
    p.set_defaults(func=cmd_normalform)

    p = sub.add_parser("render", help="SVG phase portrait of an orbit CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--curve")
    p.add_argument("--size", type=int, default=640)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "steps", 1) is not None and getattr(args, "steps", 1) < 1:
            raise UsageError("--steps must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error in {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
