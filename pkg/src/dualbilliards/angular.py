"""The angular billiard map on points exterior to an oval Gamma.

From an exterior point A take the tangent line to Gamma whose tangency point T
lies ahead of A in the counterclockwise sense.  The image B is the point of
that tangent line on the reflection of the line OA in the line OT.  In polar
coordinates about O, with ``phibar`` the angle of T and
``delta = phibar - phi_A``,

    r_A = r^2 / (r cos delta + r' sin delta)
    r_B = r^2 / (r cos delta - r' sin delta),   phi_B = 2 phibar - phi_A,

all evaluated at ``phibar``.  A negative ``r_B`` puts B on the opposite ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._roots import newton_bisect
from .curves import SupportCurve, curve_point, tangent_vector
from .errors import (BilliardError, InteriorPoint, NoConvergence, OrbitError,
                     SCurveSingularity)
from .geometry import PlanePoint, normalize_angle

EXTERIOR_MARGIN = 1e-10
S_CURVE_TOL = 1e-8
SCAN_CELLS = 256


@dataclass(frozen=True)
class AngularState:
    """Exterior point A in O-centred coordinates."""

    point: PlanePoint

    @classmethod
    def from_polar(cls, phi: float, r: float) -> AngularState:
        return cls(PlanePoint.polar(phi, r))

    @classmethod
    def from_xy(cls, x: float, y: float) -> AngularState:
        return cls(PlanePoint(x, y))

    @property
    def phi(self) -> float:
        return self.point.angle

    @property
    def r(self) -> float:
        return self.point.norm

    @property
    def xy(self) -> np.ndarray:
        return self.point.as_array()


@dataclass(frozen=True)
class StepDiagnostics:
    phibar: float
    delta: float
    tangency: PlanePoint
    case: str  # case1: angle ATO = pi/2, case2: > pi/2, case3: < pi/2
    branch: str  # "direct" if r_B > 0 from the polar formula, else "opposite"


def _check_exterior(curve: SupportCurve, phi: float, r: float, margin: float) -> None:
    rg = float(curve.r(phi))
    if not r > rg + margin:
        raise InteriorPoint(f"point (phi={phi:.6g}, r={r:.6g}) is not outside the curve (r_curve={rg:.6g})")


def tangent_from_point(curve: SupportCurve, state: AngularState | tuple,
                       margin: float = EXTERIOR_MARGIN) -> float:
    """Angle ``phibar`` of the forward tangency point seen from ``state``.

    The returned angle lies in ``(phi_A, phi_A + pi)``, measured from the
    ``phi_A`` supplied (a polar pair ``(phi, r)`` may be passed to keep the
    angle unwrapped).
    """
    phi_a, r_a = (state.phi, state.r) if isinstance(state, AngularState) else state
    _check_exterior(curve, phi_a, r_a, margin)

    def g(t):
        r, r1, _, _ = curve.jet(t)
        d = t - phi_a
        return r_a * (r * math.cos(d) + r1 * math.sin(d)) - r * r

    def dg(t):
        r, r1, r2, _ = curve.jet(t)
        d = t - phi_a
        return r_a * (2 * r1 * math.cos(d) + (r2 - r) * math.sin(d)) - 2 * r * r1

    grid = phi_a + np.linspace(0.0, math.pi, SCAN_CELLS + 1)
    r, r1, _, _ = curve.jet(grid)
    d = grid - phi_a
    vals = r_a * (r * np.cos(d) + r1 * np.sin(d)) - r * r
    idx = np.nonzero((vals[:-1] > 0) & (vals[1:] <= 0))[0]
    if idx.size == 0:
        raise NoConvergence("no tangency bracket found in (phi_A, phi_A + pi)")
    k = int(idx[0])
    return newton_bisect(g, dg, float(grid[k]), float(grid[k + 1]),
                         fa=float(vals[k]), fb=float(vals[k + 1]))


def _case_tag(a: np.ndarray, t: np.ndarray) -> str:
    u, w = a - t, -t
    dot = float(u @ w)
    if abs(dot) <= 1e-12 * np.linalg.norm(u) * np.linalg.norm(w):
        return "case1"
    return "case2" if dot < 0 else "case3"


def polar_image(curve: SupportCurve, phi1: float, r1: float, s_tol: float = S_CURVE_TOL,
                margin: float = EXTERIOR_MARGIN):
    """Raw polar image ``(phi2, r2, phibar, delta)``; ``phi2`` is left unwrapped
    and ``r2`` keeps its sign.
    """
    phibar = tangent_from_point(curve, (phi1, r1), margin)
    delta = phibar - phi1
    r, rdot, _, _ = curve.jet(phibar)
    den = r * math.cos(delta) - rdot * math.sin(delta)
    if abs(den) < s_tol * r:
        raise SCurveSingularity(f"point lies on the S-curve (denominator {den:.3e})")
    return 2.0 * phibar - phi1, float(r * r / den), phibar, float(delta)


def step_polar(curve: SupportCurve, state: AngularState, s_tol: float = S_CURVE_TOL):
    """One application of the map via the polar formulas.

    Returns ``(image_state, StepDiagnostics)``.
    """
    phi2, r2, phibar, delta = polar_image(curve, state.phi, state.r, s_tol)
    image = AngularState(PlanePoint(r2 * math.cos(phi2), r2 * math.sin(phi2)))
    t = curve_point(curve, phibar)
    diag = StepDiagnostics(phibar=normalize_angle(phibar), delta=delta,
                           tangency=PlanePoint(float(t[0]), float(t[1])),
                           case=_case_tag(state.xy, t),
                           branch="direct" if r2 > 0 else "opposite")
    return image, diag


def _tangency_cartesian(curve: SupportCurve, a: np.ndarray, margin: float) -> float:
    """Forward tangency angle from the condition ``Gamma'(t) x (A - Gamma(t)) = 0``."""
    phi_a = math.atan2(a[1], a[0])
    _check_exterior(curve, phi_a, float(np.hypot(*a)), margin)

    def h(t):
        g = curve_point(curve, t)
        dg = tangent_vector(curve, t)
        return dg[0] * (a[1] - g[1]) - dg[1] * (a[0] - g[0])

    grid = phi_a + np.linspace(0.0, math.pi, SCAN_CELLS + 1)
    vals = np.array([h(t) for t in grid])
    idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if idx.size == 0:
        raise NoConvergence("no tangency bracket found")
    k = int(idx[0])
    return brentq(h, grid[k], grid[k + 1], xtol=1e-15, rtol=1e-15, maxiter=200)


def step_geometric(curve: SupportCurve, state: AngularState, angle_tol: float = 1e-8,
                   margin: float = EXTERIOR_MARGIN) -> AngularState:
    """One application of the map by the ruler construction: reflect the line
    OA in OT and intersect it with the tangent line at T.
    """
    a = state.xy
    t_angle = _tangency_cartesian(curve, a, margin)
    T = curve_point(curve, t_angle)
    tau = tangent_vector(curve, t_angle)
    tau = tau / np.linalg.norm(tau)
    u = T / np.linalg.norm(T)
    ahat = a / np.linalg.norm(a)
    d = 2.0 * (ahat @ u) * u - ahat
    cross_dt = d[0] * tau[1] - d[1] * tau[0]
    if abs(cross_dt) < angle_tol:
        raise SCurveSingularity("reflected line is parallel to the tangent line")
    s = (T[0] * tau[1] - T[1] * tau[0]) / cross_dt
    b = s * d
    return AngularState(PlanePoint(float(b[0]), float(b[1])))


def angular_map(curve: SupportCurve, state: AngularState) -> AngularState:
    return step_polar(curve, state)[0]


def orbit(curve: SupportCurve, state: AngularState, n: int, s_tol: float = S_CURVE_TOL):
    """``n`` iterates of the map.

    Returns ``(states, diagnostics)`` with ``len(states) == n + 1``.  A failure
    at step ``k`` raises ``OrbitError`` carrying ``k`` and the partial orbit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    states = [state]
    diags = []
    for k in range(n):
        try:
            nxt, diag = step_polar(curve, states[-1], s_tol)
        except BilliardError as exc:
            raise OrbitError(exc, k, partial=states) from exc
        states.append(nxt)
        diags.append(diag)
    return states, diags


def s_curve_point(curve: SupportCurve, phibar: float):
    """Point of the S-curve whose forward tangency angle is ``phibar``, or
    ``None`` when it is at infinity or not on the incoming half-line.
    """
    r, rdot, _, _ = curve.jet(phibar)
    delta = math.atan2(r, rdot)
    den = r * math.cos(delta) + rdot * math.sin(delta)
    if den <= 1e-14 * r:
        return None
    rho = r * r / den
    return PlanePoint.polar(phibar - delta, rho)


def p_curve_point(curve: SupportCurve, phibar: float):
    """Fixed point of the map on the tangent line at ``phibar`` (``OP`` orthogonal
    to ``OT``), or ``None`` when it is at infinity.
    """
    r, rdot, _, _ = curve.jet(phibar)
    if rdot <= 1e-14 * r:
        return None
    return PlanePoint.polar(phibar - 0.5 * math.pi, r * r / rdot)


def s_curve_sample(curve: SupportCurve, phibar_grid) -> np.ndarray:
    pts = [s_curve_point(curve, float(t)) for t in phibar_grid]
    return np.array([[p.x, p.y] for p in pts if p is not None]).reshape(-1, 2)


def p_curve_sample(curve: SupportCurve, phibar_grid) -> np.ndarray:
    pts = [p_curve_point(curve, float(t)) for t in phibar_grid]
    return np.array([[p.x, p.y] for p in pts if p is not None]).reshape(-1, 2)


def generating_function(curve: SupportCurve, phi1, phi2):
    """``S(phi1, phi2) = 2 sin(delta) / r(phibar)``."""
    return 2.0 * np.sin(0.5 * (phi2 - phi1)) / curve.r(0.5 * (phi1 + phi2))


def symplectic_residual(curve: SupportCurve, state: AngularState, h: float = 1e-6) -> float:
    """``|det J - 1|`` for the map written in coordinates ``(phi, 1/r)``,
    with ``J`` from central differences of step ``h``.
    """
    phi0, u0 = state.phi, 1.0 / state.r

    def F(phi, u):
        phi2, r2, _, _ = polar_image(curve, phi, 1.0 / u)
        return np.array([phi2, 1.0 / r2])

    J = np.empty((2, 2))
    J[:, 0] = (F(phi0 + h, u0) - F(phi0 - h, u0)) / (2 * h)
    J[:, 1] = (F(phi0, u0 + h) - F(phi0, u0 - h)) / (2 * h)
    return abs(float(np.linalg.det(J)) - 1.0)
