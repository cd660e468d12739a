from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualbilliards.birkhoff import (BilliardTable, IntegralPoly, billiard_orbit, birkhoff_map,
                                    eval_integral, forward_hit_angle, homogenize_integral,
                                    inverse_birkhoff_map, reflect, subtract_energy,
                                    tangential_values)
from dualbilliards.curves import make_circle, make_ellipse
from dualbilliards.duality import ellipse_integral
from dualbilliards.errors import NoIntersection, OrbitError, ParityMismatch
from dualbilliards.geometry import OrientedLine

TABLE = BilliardTable(make_ellipse(2.0, 1.0))


def _chord(phi, frac):
    return OrientedLine(phi, frac * float(TABLE.support(phi)))


def test_table_is_dual_ellipse():
    # dual of x^2/4 + y^2 = 1 is 4x^2 + y^2 = 1
    q = TABLE.point(np.linspace(0, 2 * math.pi, 100))
    assert np.allclose(4 * q[:, 0] ** 2 + q[:, 1] ** 2, 1.0, atol=1e-13)


@given(st.floats(0, 2 * math.pi), st.floats(-0.95, 0.95))
def test_hit_point_is_on_line_and_boundary(phi, frac):
    line = _chord(phi, frac)
    psi = forward_hit_angle(TABLE, line)
    q = TABLE.point(psi)
    assert line.contains(q, tol=1e-12)
    assert 4 * q[0] ** 2 + q[1] ** 2 == pytest.approx(1.0, abs=1e-12)
    # the exit point is ahead of the entry point along the direction of travel
    entry = TABLE.point(forward_hit_angle(TABLE, line.reversed()))
    assert (q - entry) @ line.direction > 0


@given(st.floats(0, 2 * math.pi), st.floats(0.0, 1.0))
def test_circle_conserves_distance(phi, frac):
    table = BilliardTable(make_circle(1.0))
    line = OrientedLine(phi, 0.99 * frac)
    out = birkhoff_map(table, line)
    assert out.p == pytest.approx(line.p, abs=1e-12)
    # exit at normal angle phi + acos(p), so the normal advances by 2 acos(p)
    assert abs(math.remainder(out.phi - line.phi - 2 * math.acos(line.p), 2 * math.pi)) < 1e-9


@settings(max_examples=100)
@given(st.floats(0, 2 * math.pi), st.floats(-0.95, 0.95))
def test_inverse_map(phi, frac):
    line = _chord(phi, frac)
    back = inverse_birkhoff_map(TABLE, birkhoff_map(TABLE, line))
    assert back.isclose(line, angle_tol=1e-10, dist_tol=1e-10)


def test_reflection_law():
    line = _chord(0.4, 0.5)
    st_ = reflect(TABLE, line)
    psi = forward_hit_angle(TABLE, line)
    n = np.array([math.cos(psi), math.sin(psi)])
    v, w = line.direction, st_.line.direction
    assert v @ n == pytest.approx(-(w @ n), abs=1e-12)
    tvec = np.array([-n[1], n[0]])
    assert v @ tvec == pytest.approx(w @ tvec, abs=1e-12)
    assert st_.line.contains(st_.hit.as_array(), tol=1e-12)


def test_ellipse_integral_is_conserved():
    phi_poly = ellipse_integral(2.0, 1.0)
    for phi, frac in [(0.1, 0.9), (1.0, 0.3), (2.5, -0.7)]:
        states = billiard_orbit(TABLE, _chord(phi, frac), 300)
        vals = np.array([eval_integral(phi_poly, s.line) for s in states])
        assert np.max(np.abs(vals - vals[0])) < 1e-10


def test_ellipse_integral_vanishes_on_tangents():
    assert tangential_values(ellipse_integral(2.0, 1.0), TABLE) < 1e-13


def test_integral_poly_validation():
    with pytest.raises(ValueError):
        IntegralPoly({(1, 0, 0): 1.0, (0, 2, 0): 1.0})
    odd = IntegralPoly.from_list([[1, 0, 0, 1.0], [0, 1, 0, 2.0]])
    assert odd.degree == 1 and odd.is_homogeneous()
    with pytest.raises(ParityMismatch):
        homogenize_integral([[1, 0, 0, 1.0]], 2)


def test_homogenize_integral_lifts_by_speed():
    raw = [[2, 0, 0, -1.0], [0, 0, 0, 3.0]]
    phi_poly = homogenize_integral(raw, 2)
    assert phi_poly.is_homogeneous()
    # on |v| = 1 the lift equals the raw polynomial
    for t in np.linspace(0, 6, 7):
        vx, vy = math.cos(t), math.sin(t)
        assert phi_poly(0.4, vx, vy) == pytest.approx(-0.16 + 3.0)
    shifted = subtract_energy(phi_poly, 3.0)
    assert shifted(0.4, 0.6, 0.8) == pytest.approx(-0.16)


def test_missed_table_and_tangent_line():
    with pytest.raises(NoIntersection):
        forward_hit_angle(TABLE, OrientedLine(0.0, 5.0))
    with pytest.raises(NoIntersection):
        forward_hit_angle(TABLE, TABLE.tangent_line(0.3))


def test_orbit_error_carries_step():
    with pytest.raises(OrbitError) as info:
        billiard_orbit(TABLE, OrientedLine(0.0, 5.0), 3)
    assert info.value.step == 0 and isinstance(info.value.cause, NoIntersection)


def test_backward_orbit_inverts_forward():
    fwd = billiard_orbit(TABLE, _chord(0.3, 0.8), 20)
    bwd = billiard_orbit(TABLE, fwd[-1].line, 20, backward=True)
    assert bwd[-1].line.isclose(fwd[0].line, angle_tol=1e-9, dist_tol=1e-9)
