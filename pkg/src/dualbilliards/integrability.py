"""Numerical checks of the identities satisfied by an integrable angular
billiard, and the algebraic non-integrability certificate.

An integral of the angular map of ``Gamma = {f = 0}`` is described by
``F_1 = f^k g_1`` of even degree ``2 p_half``; on the arc where ``g_1 > 0`` it
is replaced by ``G = F / (x^2 + y^2)^m`` with ``F = f g_1^(1/k)`` and
``m = p_half / k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from .algebraic import (BivariatePoly, CurveTrace, H_operator, ImplicitCurveModel,
                        SpecialPoint, find_real_flexes_and_singular, hessian3,
                        homogenize, radial_seed, trace_curve)
from .angular import AngularState, orbit as angular_orbit
from .curves import SupportCurve
from .errors import DegreeTooLow, ParityError, SignViolation
from .geometry import OrientedLine, PlanePoint, dual_of_line

WITNESS_MIN_RADIUS2 = 1e-8
WITNESS_TOL = 1e-8
TANGENCY_TOL = 1e-11

NOT_POLY_INTEGRABLE = "NOT_POLY_INTEGRABLE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class IntegralData:
    """Factored integral ``F_1 = f^k g_1`` with ``deg F_1 = 2 p_half``.

    ``strict=False`` skips the degree consistency check, which is how the
    negative controls force an exponent ``m`` that no polynomial integral of
    this shape would have.
    """

    f: BivariatePoly
    g1: BivariatePoly
    k: int = 1
    p_half: float | None = None
    strict: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        total = self.k * self.f.degree + max(self.g1.degree, 0)
        if self.p_half is None:
            object.__setattr__(self, "p_half", total / 2)
        elif self.strict and abs(2 * self.p_half - total) > 0:
            raise ParityError(f"deg F_1 = {total} but 2*p_half = {2 * self.p_half}")

    @property
    def m(self) -> float:
        return self.p_half / self.k

    def g(self, x, y):
        return self.g1(x, y) ** (1.0 / self.k)

    def F(self, x, y):
        return self.f(x, y) * self.g(x, y)

    def grad_F(self, x, y):
        fx, fy = self.f.gradient(x, y)
        f = self.f(x, y)
        g1 = self.g1(x, y)
        g = g1 ** (1.0 / self.k)
        g1x, g1y = self.g1.gradient(x, y)
        dg = (1.0 / self.k) * g1 ** (1.0 / self.k - 1.0)
        return fx * g + f * dg * g1x, fy * g + f * dg * g1y


def invariance_residual(curve: SupportCurve, G, n: int, seeds) -> float:
    """Largest relative drift ``|G(A_i) - G(A_0)| / (1 + |G(A_0)|)`` along the
    angular orbits of ``seeds``."""
    worst = 0.0
    for seed in seeds:
        states, _ = angular_orbit(curve, seed, n)
        xy = np.array([s.xy for s in states])
        vals = G(xy[:, 0], xy[:, 1])
        worst = max(worst, float(np.max(np.abs(vals - vals[0]))) / (1.0 + abs(float(vals[0]))))
    return worst


def mu_exact(data: IntegralData, x: float, y: float, eps: float) -> float:
    Fx, Fy = data.grad_F(x, y)
    rho2 = x * x + y * y
    return -rho2 * eps / (rho2 + 2 * eps * (x * Fy - y * Fx))


def mu_series(data: IntegralData, x: float, y: float, eps: float, order: int) -> float:
    """Partial sum ``sum_{k=1}^{order} (-1)^k (2w)^(k-1) eps^k`` of ``mu``,
    with ``w = (x F_y - y F_x) / (x^2 + y^2)``."""
    Fx, Fy = data.grad_F(x, y)
    w = 2.0 * (x * Fy - y * Fx) / (x * x + y * y)
    return sum((-1) ** k * w ** (k - 1) * eps**k for k in range(1, order + 1))


def lemma_e1_residual(data: IntegralData, point, eps: float, mu_order: int | None = None,
                      relative: bool = True) -> float:
    """Mismatch in ``F(A) (-mu/eps)^(2m) = F(B)`` for the two points
    ``A = T + eps v`` and ``B = T + mu v`` of the tangent line at ``T``
    (``v = (F_y, -F_x)``) seen from O at equal angles.

    ``mu_order`` replaces the exact ``mu`` by its truncated series.
    """
    x, y = point
    Fx, Fy = data.grad_F(x, y)
    mu = mu_exact(data, x, y, eps) if mu_order is None else mu_series(data, x, y, eps, mu_order)
    lhs = data.F(x + eps * Fy, y - eps * Fx) * (-mu / eps) ** (2 * data.m)
    rhs = data.F(x + mu * Fy, y - mu * Fx)
    diff = abs(lhs - rhs)
    if not relative:
        return float(diff)
    return float(diff / max(abs(lhs), abs(rhs), 1e-30))


def _check_g1_positive(data: IntegralData, pts: np.ndarray) -> np.ndarray:
    g1 = data.g1(pts[:, 0], pts[:, 1]) * np.ones(len(pts))
    if np.any(g1 <= 0):
        raise SignViolation("g_1 is not positive along the working arc")
    return g1


def _spread(vals: np.ndarray):
    mean = float(np.mean(vals))
    return mean, float((np.max(vals) - np.min(vals)) / abs(mean)) if mean != 0 else math.inf


def remarkable_identity(data: IntegralData, trace: CurveTrace):
    """Estimate of the constant ``c_1`` in ``g^3 H(f) = c_1 (x^2+y^2)^(3m-3)``
    along the trace, with its relative spread ``(max - min) / |mean|``."""
    pts = trace.points
    g1 = _check_g1_positive(data, pts)
    rho2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    h = H_operator(data.f)(pts[:, 0], pts[:, 1])
    q = g1 ** (3.0 / data.k) * h / rho2 ** (3 * data.m - 3)
    return _spread(q)


def e4_constancy_check(data: IntegralData, trace: CurveTrace):
    """Estimate of ``c`` from ``g_1^6 Hess^(2k) = -c (x^2+y^2)^(6p-6k)`` on the
    curve in the chart ``z = 1``; returns ``(c, spread)``."""
    pts = trace.points
    g1 = _check_g1_positive(data, pts)
    hess = hessian3(homogenize(data.f))
    rho2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    hv = hess(pts[:, 0], pts[:, 1], np.ones(len(pts)))
    ratio = g1**6 * hv ** (2 * data.k) / rho2 ** (6 * data.p_half - 6 * data.k)
    mean, spread = _spread(ratio)
    return -mean, spread


def degree_bookkeeping(d: int, k: int, q: int) -> dict:
    """Degrees of the two sides of the polynomial identity before
    homogenization; ``deg_lhs - deg_rhs`` is balanced by ``z^(4k)``."""
    if d < 1 or k < 1 or q < 0:
        raise ValueError("need d >= 1, k >= 1, q >= 0")
    if (k * d + q) % 2:
        raise ParityError(f"k*d + q = {k * d + q} is odd")
    p_half = (k * d + q) // 2
    deg_lhs = 6 * q + 2 * k * (3 * d - 4)
    assert deg_lhs == 12 * p_half - 8 * k
    return {"p_half": p_half, "deg_lhs": deg_lhs, "deg_rhs": 12 * p_half - 12 * k, "z_power": 4 * k}


# --- certificate -----------------------------------------------------------


@dataclass
class Certificate:
    verdict: str
    witnesses: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    degree: int | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "degree": self.degree,
            "witnesses": [{"x": w.x, "y": w.y, "kind": w.kind} for w in self.witnesses],
            "assumptions": list(self.assumptions),
            "tolerances": dict(self.tolerances),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


_ASSUMPTIONS = [
    "f is irreducible over C (asserted by the caller, not checked)",
    "only real points on the traced oval and in its inflated bounding box are examined",
    "a witness rules out polynomial integrals of the billiard in the dual oval of {f = 0}",
]


def _verify_witness(f: BivariatePoly, w: SpecialPoint, h_scale: float) -> bool:
    scale = max(1.0, f.coefficient_scale()) * max(1.0, abs(w.x), abs(w.y)) ** f.degree
    if abs(f(w.x, w.y)) > WITNESS_TOL * scale:
        return False
    if w.kind == "singular":
        gx, gy = f.gradient(w.x, w.y)
        return max(abs(gx), abs(gy)) <= WITNESS_TOL * scale
    return abs(H_operator(f)(w.x, w.y)) <= WITNESS_TOL * h_scale


def certify(f: BivariatePoly, trace: CurveTrace | None = None, step: float = 1e-2) -> Certificate:
    """Look for real singular or inflection points of ``{f = 0}`` away from O.

    Any such point certifies that the billiard in the dual oval has no
    polynomial integral; finding none is inconclusive.
    """
    d = f.degree
    if d <= 2:
        raise DegreeTooLow(f"degree {d}: conics are not covered by the certificate")
    if trace is None:
        trace = trace_curve(ImplicitCurveModel(f, radial_seed(f)), step=step)
    Hf = H_operator(f)
    h_scale = max(1.0, float(np.max(np.abs(Hf(trace.points[:, 0], trace.points[:, 1])))))
    found = find_real_flexes_and_singular(f, trace)
    witnesses = [w for w in found
                 if w.x**2 + w.y**2 > WITNESS_MIN_RADIUS2 and _verify_witness(f, w, h_scale)]
    return Certificate(
        verdict=NOT_POLY_INTEGRABLE if witnesses else INCONCLUSIVE,
        witnesses=witnesses,
        assumptions=list(_ASSUMPTIONS),
        tolerances={"curve": WITNESS_TOL, "H": WITNESS_TOL, "min_radius2": WITNESS_MIN_RADIUS2,
                    "trace_step": trace.step, "cluster_radius": 1e-6, "singular_grid": 64},
        degree=d,
    )


def _pole_polyline(table: BivariatePoly, trace: CurveTrace) -> np.ndarray:
    fx, fy = table.partial(1, 0), table.partial(0, 1)
    out = []
    for q in trace.points:
        t = (-fy(q[0], q[1]), fx(q[0], q[1]))
        out.append(dual_of_line(OrientedLine.through(q, t)).as_array())
    return np.array(out)


def _segment_crossings(P: np.ndarray, Q: np.ndarray):
    """Index pairs ``(i, j)`` where closed polylines ``P`` and ``Q`` cross."""
    a0, a1 = P, np.roll(P, -1, axis=0)
    b0, b1 = Q, np.roll(Q, -1, axis=0)
    da = a1 - a0
    db = b1 - b0
    den = da[:, None, 0] * db[None, :, 1] - da[:, None, 1] * db[None, :, 0]
    w = b0[None, :, :] - a0[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (w[..., 0] * db[None, :, 1] - w[..., 1] * db[None, :, 0]) / den
        t = (w[..., 0] * da[:, None, 1] - w[..., 1] * da[:, None, 0]) / den
    hit = (s >= 0) & (s < 1) & (t >= 0) & (t < 1) & np.isfinite(s) & np.isfinite(t)
    return list(zip(*np.nonzero(hit)))


def common_tangent_witnesses(table: BivariatePoly, seed_inner: PlanePoint, seed_outer: PlanePoint,
                             step: float = 1e-2) -> list[SpecialPoint]:
    """Poles of the lines tangent to two real ovals of ``{table = 0}``.

    Such a pole is a real node of the dual curve.  The oval through
    ``seed_inner`` must enclose O.  Candidates come from crossings of the two
    sampled dual branches and are polished by solving for the two tangency
    points directly.
    """
    tr1 = trace_curve(ImplicitCurveModel(table, seed_inner), step=step)
    tr2 = trace_curve(ImplicitCurveModel(table, seed_outer), step=step)
    D1, D2 = _pole_polyline(table, tr1), _pole_polyline(table, tr2)
    fx, fy = table.partial(1, 0), table.partial(0, 1)
    scale = max(1.0, table.coefficient_scale())

    def equations(u):
        x1, y1, x2, y2 = u
        dx, dy = x2 - x1, y2 - y1
        return [table(x1, y1), table(x2, y2),
                fx(x1, y1) * dx + fy(x1, y1) * dy,
                fx(x2, y2) * dx + fy(x2, y2) * dy]

    found = []
    for i, j in _segment_crossings(D1, D2):
        sol = root(equations, np.concatenate([tr1.points[i], tr2.points[j]]), tol=1e-14)
        # hybr often reports failure once it stalls at rounding level
        if max(abs(v) for v in equations(sol.x)) > TANGENCY_TOL * scale:
            continue
        q1, q2 = sol.x[:2], sol.x[2:]
        pole = dual_of_line(OrientedLine.through(q1, q2 - q1))
        if any(math.hypot(pole.x - w.x, pole.y - w.y) < 1e-6 for w in found):
            continue
        found.append(SpecialPoint(pole.x, pole.y, "singular"))
    return found


def certify_two_ovals(table: BivariatePoly, seed_inner: PlanePoint, seed_outer: PlanePoint,
                      step: float = 1e-2) -> Certificate:
    """Certificate for a table that is one oval of a curve with a second real
    oval: every common tangent line dualizes to a real singular point."""
    witnesses = [w for w in common_tangent_witnesses(table, seed_inner, seed_outer, step)
                 if w.x**2 + w.y**2 > WITNESS_MIN_RADIUS2]
    return Certificate(
        verdict=NOT_POLY_INTEGRABLE if witnesses else INCONCLUSIVE,
        witnesses=witnesses,
        assumptions=["the table is one real oval of an irreducible algebraic curve with a second real oval",
                     "witnesses are poles of common tangent lines (real nodes of the dual curve)"],
        tolerances={"tangency_residual": TANGENCY_TOL, "cluster_radius": 1e-6, "trace_step": step},
        degree=table.degree,
    )
