"""Acceptance criteria.  Each test prints one PASS/FAIL line and then asserts."""

from __future__ import annotations

import math

import numpy as np
import pytest

from dualbilliards.algebraic import (BivariatePoly, H_operator, ImplicitCurveModel, hessian3,
                                     hessian_relation_rhs, homogenize, radial_seed, trace_curve)
from dualbilliards.angular import (AngularState, orbit, p_curve_point, s_curve_sample, step_geometric,
                                   step_polar, symplectic_residual)
from dualbilliards.birkhoff import BilliardTable, billiard_orbit, eval_integral
from dualbilliards.curves import make_circle, make_ellipse, make_offset_circle, support_from_implicit, to_plane
from dualbilliards.duality import (dualize_integral, ellipse_angular_integral, ellipse_integral,
                                   incidence_angle, orbit_correspondence)
from dualbilliards.geometry import OrientedLine, PlanePoint, dual_of_line, dual_of_point
from dualbilliards.integrability import (NOT_POLY_INTEGRABLE, IntegralData, certify,
                                         degree_bookkeeping, e4_constancy_check, invariance_residual,
                                         lemma_e1_residual, mu_exact, mu_series, remarkable_identity)
from dualbilliards.normal_form import (lazutkin_orders, lazutkin_step_check, momentum_check,
                                       twist_fd_check, twist_profile, z_expansion_slope)

from conftest import convex_quartic, ellipse_poly, exterior_states, fermat_poly, trace_of

A, B = 2.0, 1.0
ONE = BivariatePoly.constant(1.0)


@pytest.fixture
def report(capsys):
    def _report(n: int, title: str, checks: dict):
        ok = all(bool(v[0]) for v in checks.values())
        detail = "; ".join(f"{k}={v[1]:.3g}" for k, v in checks.items())
        with capsys.disabled():
            print(f"\ncriterion {n:2d} {'PASS' if ok else 'FAIL'}: {title} [{detail}]")
        failed = [k for k, v in checks.items() if not v[0]]
        assert ok, f"criterion {n} failed: {failed}"
    return _report


def test_criterion_01_duality_algebra(report):
    rng = np.random.default_rng(1)
    inv_err = inc_err = 0.0
    for _ in range(1000):
        phi = rng.uniform(0, 2 * math.pi)
        p = rng.uniform(0.1, 10.0) * rng.choice([-1.0, 1.0])
        line = OrientedLine(phi, p)
        pole = dual_of_line(line)
        back = dual_of_point(pole)
        # the polar of the pole is the positive representative of the line
        ref = line if p > 0 else line.reversed()
        inv_err = max(inv_err, abs(math.remainder(back.phi - ref.phi, 2 * math.pi)) + abs(back.p - ref.p))
        pt = PlanePoint.polar(rng.uniform(0, 2 * math.pi), rng.uniform(0.1, 10.0))
        inv_err = max(inv_err, dual_of_line(dual_of_point(pt)).distance(pt))
        # a point on the line has a polar through the pole of the line
        q = line.foot + rng.uniform(-3, 3) * line.direction
        polar = dual_of_point(PlanePoint(*q))
        inc_err = max(inc_err, abs(polar.normal @ pole.as_array() - polar.p))
    report(1, "duality involution and incidence on 1000 random cases",
           {"involution": (inv_err < 1e-10, inv_err), "incidence": (inc_err < 1e-10, inc_err)})


def test_criterion_02_map_equivalence(report):
    curve = make_ellipse(A, B)
    states = exterior_states(curve, 100, np.random.default_rng(2))
    err = max(step_polar(curve, s)[0].point.distance(step_geometric(curve, s).point) for s in states)
    report(2, "polar vs geometric step on 100 ellipse states", {"max_diff": (err < 1e-9, err)})


def test_criterion_03_dynamics_duality(report):
    curve = make_ellipse(A, B)
    table = BilliardTable(curve)
    lines = [OrientedLine(phi, 0.985 * float(table.support(phi)))
             for phi in np.linspace(0.05, 2 * math.pi, 19, endpoint=False)]
    lines.append(OrientedLine(1.3, 0.985 * float(table.support(1.3))).reversed())
    worst_inc = max(incidence_angle(table, l) for l in lines)
    dev = max(orbit_correspondence(curve, l, 50) for l in lines)
    neg = sum(l.p < 0 for l in lines)
    report(3, "20 near-tangent chords (1 negative), 50 steps",
           {"max_pole_dev": (dev < 1e-8, dev), "max_incidence": (worst_inc < math.pi / 6, worst_inc),
            "negative_chords": (neg == 1, neg)})


def test_criterion_04_integral_transport(report):
    curve = make_ellipse(A, B)
    table = BilliardTable(curve)
    phi_poly = ellipse_integral(A, B)
    G = dualize_integral(phi_poly)
    coef_err = float(np.max(np.abs(G.F.coeffs - ellipse_poly(A, B).coeffs)))
    drift_b = 0.0
    seeds = []
    for phi in np.linspace(0.1, 2 * math.pi, 20, endpoint=False):
        line = OrientedLine(phi, 0.9 * float(table.support(phi)))
        vals = np.array([eval_integral(phi_poly, s.line) for s in billiard_orbit(table, line, 500)])
        drift_b = max(drift_b, float(np.max(np.abs(vals - vals[0]))))
        seeds.append(AngularState(dual_of_line(line)))
    drift_a = invariance_residual(curve, G, 500, seeds)
    drift_e = invariance_residual(curve, ellipse_angular_integral(A, B), 500, seeds)
    report(4, "dualized integral equals the angular integral; both conserved 500 steps",
           {"coef_err": (coef_err < 1e-12, coef_err), "birkhoff_drift": (drift_b < 1e-8, drift_b),
            "angular_drift": (drift_a < 1e-8 and drift_e < 1e-8, max(drift_a, drift_e))})


def test_criterion_05_twist_map(report):
    curve = make_ellipse(A, B)
    states = exterior_states(curve, 20, np.random.default_rng(5), lo=1.1)
    mom = max(max(momentum_check(curve, s.phi, s.r)) for s in states)
    tw = twist_profile(curve)
    fd = twist_fd_check(curve, nodes=20)
    sym = max(symplectic_residual(curve, s) for s in states)
    report(5, "generating function, twist and area preservation",
           {"momentum_rel_err": (mom < 1e-6, mom), "min_twist": (tw > 0, tw),
            "twist_fd_rel_err": (fd < 1e-4, fd), "symplectic": (sym < 1e-6, sym)})


def test_criterion_06_expansions(report):
    curve = make_ellipse(A, B)
    slope = z_expansion_slope(curve, 0.7)
    ratios, _ = lazutkin_orders(curve, 0.7)
    o1, o2 = float(np.min(np.log2(ratios[:, 0]))), float(np.min(np.log2(ratios[:, 1])))
    res2 = lazutkin_step_check(make_circle(1.0), 0.7, 0.05)[1]
    report(6, "near-boundary expansion orders",
           {"z_slope": (slope >= 3.9, slope), "order_phi": (o1 >= 2 - 0.2 and ratios[0, 0] >= 3.5, o1),
            "order_v": (o2 >= 3 - 0.2 and ratios[0, 1] >= 7, o2), "circle_res2": (res2 < 1e-10, res2)})


def test_criterion_07_lemma_e1(report, ellipse_trace):
    data = IntegralData(ellipse_poly(A, B), ONE)
    idx = np.linspace(0, len(ellipse_trace.points) - 1, 64).astype(int)
    res = max(lemma_e1_residual(data, ellipse_trace.points[i], 1e-3) for i in idx)
    x, y = 2 * math.cos(1.0), math.sin(1.0)
    e = [abs(mu_exact(data, x, y, h) - mu_series(data, x, y, h, 6)) for h in (0.1, 0.05)]
    order = math.log2(e[0] / e[1])
    report(7, "exact identity on 64 points; mu series tail",
           {"max_residual": (res < 1e-8, res), "tail_order": (abs(order - 7) < 0.3, order)})


def test_criterion_08_remarkable_identity(report, ellipse_trace):
    c1, spread = remarkable_identity(IntegralData(ellipse_poly(A, B), ONE), ellipse_trace)
    R = 1.5
    circ = BivariatePoly.from_terms([[2, 0, 1.0], [0, 2, 1.0], [0, 0, -R * R]])
    cc, cspread = remarkable_identity(IntegralData(circ, ONE), trace_of(circ))
    q = convex_quartic()
    _, qspread = remarkable_identity(IntegralData(q, ONE, p_half=1, strict=False), trace_of(q))
    c1_err = abs(c1 / (8 / (A * B) ** 2) - 1)
    cc_err = abs(cc / (8 * R * R) - 1)
    report(8, "c1 constancy on ellipse and circle; quartic control",
           {"ellipse_c1_err": (c1_err < 1e-9, c1_err), "ellipse_spread": (spread < 1e-9, spread),
            "circle_c1_err": (cc_err < 1e-9 and cspread < 1e-9, cc_err),
            "control_spread": (qspread > 1e-3, qspread)})


def test_criterion_09_hessian(report, ellipse_trace):
    rng = np.random.default_rng(9)
    rel = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 6))
        F = homogenize(BivariatePoly.from_terms(
            [[i, j, rng.normal()] for i in range(d + 1) for j in range(d + 1 - i)]), d)
        x, y, z = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 1.5)
        h = hessian3(F)(x, y, z)
        rel = max(rel, abs(h - hessian_relation_rhs(F, x, y, z)) / max(1.0, abs(h)))
    c, spread = e4_constancy_check(IntegralData(ellipse_poly(A, B), ONE), ellipse_trace)
    c_err = abs(c / (-64 / (A * B) ** 4) - 1)
    cases = [(d, k, q) for d in range(2, 7) for k in (1, 2, 3) for q in range(4)
             if (k * d + q) % 2 == 0][:20]
    table_ok = 0
    for d, k, q in cases:
        out = degree_bookkeeping(d, k, q)
        table_ok += out["deg_lhs"] - out["deg_rhs"] == 4 * k == out["z_power"]
    report(9, "Hessian relation, on-curve constancy, degree ledger",
           {"relation_residual": (rel < 1e-8, rel), "c_err": (c_err < 1e-9, c_err),
            "spread": (spread < 1e-9, spread), "ledger_cases": (len(cases) == 20 and table_ok == 20, table_ok)})


def test_criterion_10_fermat(report, fermat_trace):
    cert = certify(fermat_poly(), fermat_trace)
    targets = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    dist = max(min(math.hypot(w.x - a, w.y - b) for w in cert.witnesses) for a, b in targets) \
        if cert.witnesses else math.inf
    kinds = all(w.kind == "inflection" for w in cert.witnesses)
    table = BilliardTable(support_from_implicit(fermat_poly()))
    q = table.point(np.linspace(0, 2 * math.pi, 512, endpoint=False))
    dual_err = float(np.max(np.abs(np.abs(q[:, 0]) ** (4 / 3) + np.abs(q[:, 1]) ** (4 / 3) - 1)))
    report(10, "Fermat quartic certificate and dual table",
           {"witnesses": (len(cert.witnesses) == 4 and kinds, len(cert.witnesses)),
            "witness_dist": (dist < 1e-8, dist),
            "verdict": (cert.verdict == NOT_POLY_INTEGRABLE, float(cert.verdict == NOT_POLY_INTEGRABLE)),
            "dual_err": (dual_err < 1e-8, dual_err)})


def test_criterion_11_offset_circle(report):
    curve = make_offset_circle(1.0, 0.5)
    # tangency points from which an S-curve point exists lie on one half of the circle
    grid = np.linspace(0.0, math.pi, 130)[1:-1]
    pts = to_plane(curve, s_curve_sample(curve, grid))
    s_dev = float(np.max(np.abs(pts[:, 0] - 1.25)))
    P = to_plane(curve, [p_curve_point(curve, math.pi / 2).as_array()])[0]
    p_dev = float(np.hypot(P[0] - 2.0, P[1]))
    report(11, "offset circle S-curve and P-curve",
           {"s_samples": (len(pts) == 128, len(pts)), "s_dev": (s_dev < 1e-9, s_dev),
            "p_dev": (p_dev < 1e-8, p_dev)})


def test_criterion_12_H_product(report):
    rng = np.random.default_rng(12)
    X, Y = BivariatePoly.x(), BivariatePoly.y()
    worst = 0.0
    for _ in range(10):
        cubic = BivariatePoly.from_terms([[i, 3 - i, 0.05 * rng.normal()] for i in range(4)])
        f = X * X + Y * Y - 1.0 + cubic
        g = BivariatePoly.from_terms([[0, 0, 1.0]] + [[i, j, 0.2 * rng.normal()]
                                                       for i in range(3) for j in range(3 - i) if i + j])
        tr = trace_curve(ImplicitCurveModel(f, radial_seed(f)), step=2e-2)
        P = tr.points
        lhs = H_operator(f * g)(P[:, 0], P[:, 1])
        rhs = g(P[:, 0], P[:, 1]) ** 3 * H_operator(f)(P[:, 0], P[:, 1])
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.abs(rhs))))
    report(12, "H(fg) = g^3 H(f) on 10 traced curves", {"max_rel_err": (worst < 1e-8, worst)})
