"""Correspondence between the Birkhoff billiard in the table and the angular
billiard of the dual oval, and transport of polynomial integrals across it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebraic import BivariatePoly
from .angular import AngularState, orbit as angular_orbit, step_polar
from .birkhoff import BilliardTable, IntegralPoly, billiard_orbit, birkhoff_map
from .curves import SupportCurve, curve_point
from .errors import OddDegree
from .geometry import OrientedLine, PlanePoint, dual_of_line, dual_of_point

SEGMENT_BAND = 1e-10
NEAR_BOUNDARY_ANGLE = math.pi / 6


def table_from_dual(curve: SupportCurve) -> BilliardTable:
    """Billiard table dual to ``curve``; ``curve`` must be strictly convex."""
    curve.validate()
    return BilliardTable(curve)


def dual_curve_samples(table: BilliardTable, grid=None, h: float = 1e-3) -> np.ndarray:
    """Poles of the tangent lines of the table, i.e. samples of the dual oval.

    Tangent directions come from a fourth-order central difference of the
    sampled boundary, not from the supporting function, so the result is an
    honest double dual.
    """
    if grid is None:
        grid = np.linspace(0.0, 2 * math.pi, 256, endpoint=False)
    grid = np.asarray(grid, dtype=float)
    q = table.point(grid)
    dq = (-table.point(grid + 2 * h) + 8 * table.point(grid + h)
          - 8 * table.point(grid - h) + table.point(grid - 2 * h)) / (12 * h)
    out = []
    for qi, ti in zip(q, dq):
        out.append(dual_of_line(OrientedLine.through(qi, ti)).as_array())
    return np.array(out)


@dataclass(frozen=True)
class DualizedOrbit:
    points: list
    positive: bool

    @property
    def angular_direction(self) -> int:
        """+1 when the angular map advances along the orbit (positive lines),
        -1 when it runs it backwards (negative lines)."""
        return 1 if self.positive else -1


def dualize_orbit(lines) -> DualizedOrbit:
    """Poles of a sequence of oriented lines.

    The angular map sends the pole of ``l_0`` to the pole of ``l_1`` if ``l_0``
    is positive and to the pole of ``l_{-1}`` if it is negative.
    """
    lines = [s.line if hasattr(s, "line") else s for s in lines]
    pts = [dual_of_line(l) for l in lines]
    return DualizedOrbit(pts, lines[0].p > 0)


def orbit_correspondence(curve: SupportCurve, line: OrientedLine, n: int) -> float:
    """Largest distance between the poles of the billiard orbit of ``line``
    and the angular orbit of the pole of ``line``, over ``n`` steps.

    For a negative line the billiard orbit is run backwards.
    """
    table = BilliardTable(curve)
    backward = line.p < 0
    lines = billiard_orbit(table, line, n, backward=backward)
    poles = dualize_orbit(lines).points
    states, _ = angular_orbit(curve, AngularState(poles[0]), n)
    return max(p.distance(s.point) for p, s in zip(poles, states))


def segment_parameter(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> float:
    ab = b - a
    return float((t - a) @ ab / (ab @ ab))


def orientation_rule(curve: SupportCurve, state: AngularState, band: float = SEGMENT_BAND):
    """Check the orientation dichotomy for one exterior point A.

    Returns ``(t_in_segment, keeps_orientation, deviation)``: whether the
    tangency point lies on ``[A, B]``, whether the billiard image of the
    positive pole line of A is the positive pole line of B (rather than its
    reversal), and how far the billiard image is from the predicted line.
    """
    table = BilliardTable(curve)
    image, diag = step_polar(curve, state)
    a_line = dual_of_point(state.point)
    b_line = dual_of_point(image.point)
    c_line = birkhoff_map(table, a_line)
    s = segment_parameter(state.xy, image.xy, diag.tangency.as_array())
    inside = -band <= s <= 1 + band
    same = _line_distance(c_line, b_line)
    flipped = _line_distance(c_line, b_line.reversed())
    keeps = same < flipped
    predicted = b_line if inside else b_line.reversed()
    return inside, keeps, _line_distance(c_line, predicted)


def _line_distance(a: OrientedLine, b: OrientedLine) -> float:
    d = math.remainder(a.phi - b.phi, 2 * math.pi)
    return abs(d) + abs(a.p - b.p)


def incidence_angle(table: BilliardTable, line: OrientedLine) -> float:
    """Angle between the chord and the boundary tangent at its exit point."""
    from .birkhoff import forward_hit_angle
    psi = forward_hit_angle(table, line)
    a = abs(math.remainder(psi - line.phi, 2 * math.pi))
    # angle between unoriented lines, so a reversed chord gives the same value
    return min(a, math.pi - a)


class DualIntegral:
    """``G(x, y) = F(x, y) / (x^2 + y^2)^(n/2)`` with ``F(x, y) = Phi(1, -y, x)``."""

    def __init__(self, F: BivariatePoly, n: int):
        self.F = F
        self.n = n

    def __call__(self, x, y):
        return self.F(x, y) / (x * x + y * y) ** (0.5 * self.n)


def dualize_integral(phi_poly: IntegralPoly) -> DualIntegral:
    """Integral of the angular map induced by an even-degree billiard integral."""
    n = phi_poly.degree
    if n % 2:
        raise OddDegree(f"integral degree {n} is odd")
    terms = []
    for (i, j, k), c in phi_poly.terms.items():
        # sigma -> 1, v_x -> -y, v_y -> x
        terms.append([k, j, c * (-1.0) ** j])
    return DualIntegral(BivariatePoly.from_terms(terms), n)


def ellipse_integral(a: float, b: float) -> IntegralPoly:
    """Quadratic integral of the table ``a^2 x^2 + b^2 y^2 = 1`` vanishing on
    its tangent vectors: ``v_x^2 / b^2 + v_y^2 / a^2 - sigma^2``."""
    return IntegralPoly({(0, 2, 0): 1 / b**2, (0, 0, 2): 1 / a**2, (2, 0, 0): -1.0})


def ellipse_angular_integral(a: float, b: float, origin=(0.0, 0.0)):
    """Integral of the angular map of the ellipse ``x^2/a^2 + y^2/b^2 = 1`` about
    an arbitrary interior point ``origin``, as a function of O-centred
    coordinates."""
    x0, y0 = origin

    def G(x, y):
        X, Y = x + x0, y + y0
        return (X * X / a**2 + Y * Y / b**2 - 1.0) / (x * x + y * y)

    return G


def double_dual_error(curve: SupportCurve, grid=None) -> float:
    """Largest distance between samples of the double dual and the curve."""
    if grid is None:
        grid = np.linspace(0.0, 2 * math.pi, 256, endpoint=False)
    pts = dual_curve_samples(BilliardTable(curve), grid)
    return float(np.max(np.linalg.norm(pts - curve_point(curve, np.asarray(grid)), axis=1)))


