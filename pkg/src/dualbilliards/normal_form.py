"""Near-boundary expansion of the angular map and its twist condition.

With ``p = 1/r`` and ``z = p(phi) - p_A`` the distance of an exterior point
from the curve in the ``p`` coordinate, one step of the map reads

    z  = p(phi) - p(phi+delta) cos delta + p'(phi+delta) sin delta
    z' = z + p(phi+2 delta) - p(phi) - 2 p'(phi+delta) sin delta

with ``phi' = phi + 2 delta``.  Expanding in ``delta`` gives
``z = A delta^2 + B delta^3 + O(delta^4)`` with ``A = (p'' + p)/2`` and
``B = 2 A'/3``.
"""

from __future__ import annotations

import math

import numpy as np

from ._roots import newton_bisect
from .angular import generating_function, polar_image
from .curves import SupportCurve
from .errors import NoConvergence

FD_STEP = 1e-4
DELTA_LADDER = (0.1, 0.05, 0.025, 0.0125)
V_LADDER = (0.05, 0.025, 0.0125)


def coeff_A(curve: SupportCurve, phi):
    """``A = (p'' + p) / 2``, half the curvature radius of the dual table."""
    p0, _, p2, _ = curve.p_jet(phi)
    return 0.5 * (p2 + p0)


def _dA_fd(curve: SupportCurve, phi, h: float = FD_STEP):
    return (-coeff_A(curve, phi + 2 * h) + 8 * coeff_A(curve, phi + h)
            - 8 * coeff_A(curve, phi - h) + coeff_A(curve, phi - 2 * h)) / (12 * h)


def coeff_B(curve: SupportCurve, phi):
    """``B = 2 A' / 3``, from ``p'''`` when the curve carries a third
    derivative and from a five-point difference of ``A`` otherwise."""
    if curve.has_r3:
        _, p1, _, p3 = curve.p_jet(phi)
        return (p3 + p1) / 3.0
    return 2.0 * _dA_fd(curve, phi) / 3.0


def z_of_delta(curve: SupportCurve, phi: float, delta):
    p0 = curve.p(phi)
    q0, q1, _, _ = curve.p_jet(phi + delta)
    return p0 - q0 * np.cos(delta) + q1 * np.sin(delta)


def z_prime(curve: SupportCurve, phi: float, delta: float, z: float | None = None) -> float:
    if z is None:
        z = z_of_delta(curve, phi, delta)
    _, q1, _, _ = curve.p_jet(phi + delta)
    return float(z + curve.p(phi + 2 * delta) - curve.p(phi) - 2 * q1 * math.sin(delta))


def z_expansion_residual(curve: SupportCurve, phi: float, delta: float) -> float:
    """``|z(delta) - A delta^2 - B delta^3|``."""
    if delta == 0:
        return 0.0
    A, B = coeff_A(curve, phi), coeff_B(curve, phi)
    return float(abs(z_of_delta(curve, phi, delta) - A * delta**2 - B * delta**3))


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def z_expansion_slope(curve: SupportCurve, phi: float, ladder=DELTA_LADDER) -> float:
    return loglog_slope(ladder, [z_expansion_residual(curve, phi, d) for d in ladder])


def solve_delta(curve: SupportCurve, phi: float, z: float) -> float:
    """Invert ``z(delta)`` on ``(0, pi)``, where it is increasing since
    ``dz/ddelta = 2 A(phi + delta) sin delta``."""
    if z <= 0:
        raise ValueError("z must be positive")
    hi = math.pi - 1e-9
    if z >= z_of_delta(curve, phi, hi):
        raise NoConvergence(f"z={z:.3g} is beyond the tangent range at phi={phi:.6g}")

    def fun(d):
        return float(z_of_delta(curve, phi, d)) - z

    def dfun(d):
        return float(2.0 * coeff_A(curve, phi + d) * math.sin(d))

    seed = math.sqrt(z / coeff_A(curve, phi))
    lo, up = 0.0, hi
    # tighten the bracket around the Newton seed when possible
    if 0.0 < seed < hi:
        for fac in (0.5, 2.0):
            t = min(seed * fac, hi)
            if fun(t) < 0:
                lo = max(lo, t)
            else:
                up = min(up, t)
    return newton_bisect(fun, dfun, lo, up, fa=fun(lo), fb=fun(up))


def lazutkin_step(curve: SupportCurve, phi: float, v: float):
    """One step in ``(phi, v = sqrt z)``: returns ``(phi', v')``."""
    z = v * v
    delta = solve_delta(curve, phi, z)
    z2 = z_prime(curve, phi, delta, z)
    if z2 < 0:
        raise NoConvergence("image fell inside the curve")
    return phi + 2 * delta, math.sqrt(z2)


def lazutkin_step_check(curve: SupportCurve, phi: float, v: float):
    """``(|phi' - phi - 2v/sqrt(A)|, |v' - v - B v^2 / (2 A^(3/2))|)``."""
    A, B = float(coeff_A(curve, phi)), float(coeff_B(curve, phi))
    phi2, v2 = lazutkin_step(curve, phi, v)
    res1 = abs(phi2 - phi - 2.0 * v / math.sqrt(A))
    res2 = abs(v2 - v - B * v * v / (2.0 * A**1.5))
    return res1, res2


def lazutkin_orders(curve: SupportCurve, phi: float, ladder=V_LADDER):
    """Successive ratios of the two step residuals as ``v`` halves."""
    res = np.array([lazutkin_step_check(curve, phi, v) for v in ladder])
    return res[:-1] / res[1:], res


# --- twist ------------------------------------------------------------------


def twist_value(curve: SupportCurve, phibar, delta):
    """Mixed partial ``d^2 S / dphi1 dphi2 = (p'' + p)(phibar) sin(delta) / 2``."""
    return coeff_A(curve, phibar) * np.sin(delta)


def default_twist_grid(n_phi: int = 256, n_delta: int = 64):
    return (np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False),
            np.linspace(1e-3, math.pi - 1e-3, n_delta))


def twist_profile(curve: SupportCurve, phibar_grid=None, delta_grid=None) -> float:
    """Minimum of the twist over the product grid."""
    if phibar_grid is None or delta_grid is None:
        g_phi, g_delta = default_twist_grid()
        phibar_grid = g_phi if phibar_grid is None else phibar_grid
        delta_grid = g_delta if delta_grid is None else delta_grid
    delta_grid = np.asarray(delta_grid, float)
    if np.any(delta_grid <= 0) or np.any(delta_grid >= math.pi):
        raise ValueError("delta grid must lie in (0, pi)")
    P, D = np.meshgrid(np.asarray(phibar_grid, float), delta_grid, indexing="ij")
    return float(np.min(twist_value(curve, P, D)))


def twist_fd(curve: SupportCurve, phibar: float, delta: float, h: float = 1e-4) -> float:
    """Central second difference of ``S`` in ``(phi1, phi2)``."""
    p1, p2 = phibar - delta, phibar + delta

    def S(a, b):
        return float(generating_function(curve, a, b))

    return (S(p1 + h, p2 + h) - S(p1 + h, p2 - h) - S(p1 - h, p2 + h) + S(p1 - h, p2 - h)) / (4 * h * h)


def twist_fd_check(curve: SupportCurve, nodes: int = 20, seed: int = 0, h: float = 1e-4) -> float:
    """Largest relative error between the closed-form twist and its finite
    difference at random ``(phibar, delta)`` nodes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(nodes):
        t = rng.uniform(0, 2 * math.pi)
        d = rng.uniform(0.05, math.pi - 0.05)
        exact = float(twist_value(curve, t, d))
        worst = max(worst, abs(twist_fd(curve, t, d, h) - exact) / abs(exact))
    return worst


def momentum_check(curve: SupportCurve, phi1: float, r1: float, h: float = 1e-5):
    """Relative errors of ``-dS/dphi1 = 1/r1`` and ``dS/dphi2 = 1/r2`` at the
    orbit step from ``(phi1, r1)``; ``r2`` keeps its sign."""
    phi2, r2, _, _ = polar_image(curve, phi1, r1)

    def S(a, b):
        return float(generating_function(curve, a, b))

    d1 = (S(phi1 + h, phi2) - S(phi1 - h, phi2)) / (2 * h)
    d2 = (S(phi1, phi2 + h) - S(phi1, phi2 - h)) / (2 * h)
    return abs(-d1 * r1 - 1.0), abs(d2 * r2 - 1.0)
