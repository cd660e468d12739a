from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualbilliards.algebraic import (BivariatePoly, H_operator, HomogeneousPoly3, ImplicitCurveModel,
                                     dehomogenize, find_inflections, find_real_flexes_and_singular,
                                     find_singular_points, hessian3, hessian_relation_rhs,
                                     homogenize, radial_seed, trace_curve)
from dualbilliards.errors import DegreeTooLow, SingularEncountered
from dualbilliards.geometry import PlanePoint

from conftest import ellipse_poly, trace_of

coef = st.floats(-3.0, 3.0, allow_nan=False)
small_poly = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coef), min_size=1, max_size=6)
X, Y = BivariatePoly.x(), BivariatePoly.y()


def _naive(terms, x, y):
    return sum(c * x**i * y**j for i, j, c in terms)


@given(small_poly, st.floats(-2, 2), st.floats(-2, 2))
def test_evaluation_matches_monomial_sum(terms, x, y):
    f = BivariatePoly.from_terms(terms)
    assert f(x, y) == pytest.approx(_naive(terms, x, y), abs=1e-9)


@given(small_poly, small_poly, st.floats(-2, 2), st.floats(-2, 2))
def test_ring_operations(t1, t2, x, y):
    f, g = BivariatePoly.from_terms(t1), BivariatePoly.from_terms(t2)
    a, b = _naive(t1, x, y), _naive(t2, x, y)
    assert (f * g)(x, y) == pytest.approx(a * b, abs=1e-8)
    assert (f + g)(x, y) == pytest.approx(a + b, abs=1e-9)
    assert (f - g)(x, y) == pytest.approx(a - b, abs=1e-9)
    assert (f**2)(x, y) == pytest.approx(a * a, abs=1e-8)


def test_terms_round_trip_and_degree():
    f = BivariatePoly.from_terms([[2, 1, 3.0], [0, 0, -1.0], [0, 3, 0.5]])
    assert BivariatePoly.from_terms(f.to_terms()).allclose(f)
    assert f.degree == 3
    assert BivariatePoly.zero().degree == -1


def test_partials_against_differences():
    f = BivariatePoly.from_terms([[3, 1, 1.0], [1, 2, -2.0], [0, 0, 0.5]])
    x, y, h = 0.7, -0.4, 1e-6
    assert f.partial(1, 0)(x, y) == pytest.approx((f(x + h, y) - f(x - h, y)) / (2 * h), rel=1e-8)
    assert f.partial(0, 1)(x, y) == pytest.approx((f(x, y + h) - f(x, y - h)) / (2 * h), rel=1e-8)
    assert f.partial(1, 1)(x, y) == pytest.approx(3 * x**2 - 4 * y, rel=1e-12)


def test_H_operator_of_circle():
    f = X * X + Y * Y - 4.0
    assert H_operator(f).allclose((X * X + Y * Y) * 8.0)


def test_H_operator_of_ellipse():
    a, b = 2.0, 1.0
    f = ellipse_poly(a, b)
    oracle = (X * X / a**2 + Y * Y / b**2) * (8 / (a * b) ** 2)
    assert H_operator(f).allclose(oracle)


def test_H_product_rule_on_curve(ellipse_trace):
    f = ellipse_poly(2.0, 1.0)
    g = BivariatePoly.from_terms([[0, 0, 2.0], [1, 0, 0.3], [1, 1, -0.2], [0, 2, 0.1]])
    P = ellipse_trace.points
    lhs = H_operator(f * g)(P[:, 0], P[:, 1])
    rhs = g(P[:, 0], P[:, 1]) ** 3 * H_operator(f)(P[:, 0], P[:, 1])
    assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) < 1e-8


def test_homogenize_round_trip():
    f = BivariatePoly.from_terms([[3, 0, 1.0], [1, 1, 2.0], [0, 0, -1.0]])
    F = homogenize(f)
    assert F.degree == 3
    x, y, z = 0.3, -1.2, 0.7
    assert F(x, y, z) == pytest.approx(z**3 * f(x / z, y / z), rel=1e-12)
    assert dehomogenize(F).allclose(f)


def test_hessian_of_xyz_and_ellipse():
    xyz = HomogeneousPoly3(np.array([[0, 0], [0, 1.0]]), 3)
    H = hessian3(xyz)
    assert H(0.3, 0.5, 0.7) == pytest.approx(2 * 0.3 * 0.5 * 0.7)
    a, b = 2.0, 1.0
    He = hessian3(homogenize(ellipse_poly(a, b)))
    assert He(0.1, 0.2, 0.3) == pytest.approx(-8 / (a * b) ** 2)
    with pytest.raises(DegreeTooLow):
        hessian3(homogenize(X + Y))


@settings(max_examples=50)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_hessian_relation(d, seed):
    rng = np.random.default_rng(seed)
    terms = [[i, j, rng.normal()] for i in range(d + 1) for j in range(d + 1 - i)]
    F = homogenize(BivariatePoly.from_terms(terms), d)
    x, y = rng.uniform(-1, 1, 2)
    z = rng.uniform(0.5, 1.5)
    lhs = hessian3(F)(x, y, z)
    rhs = hessian_relation_rhs(F, x, y, z)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


def test_trace_circle_length_and_closure():
    R = 1.5
    tr = trace_of(X * X + Y * Y - R * R)
    assert tr.closed
    assert tr.length == pytest.approx(2 * math.pi * R, rel=1e-4)
    assert np.allclose(np.hypot(tr.points[:, 0], tr.points[:, 1]), R, atol=1e-12)
    area = 0.5 * np.sum(tr.points[:, 0] * np.roll(tr.points[:, 1], -1)
                        - np.roll(tr.points[:, 0], -1) * tr.points[:, 1])
    assert area > 0


def test_trace_ellipse_length(ellipse_trace):
    from scipy.integrate import quad
    oracle = quad(lambda t: math.hypot(2 * math.sin(t), math.cos(t)), 0, 2 * math.pi)[0]
    assert ellipse_trace.length == pytest.approx(oracle, rel=1e-5)


def test_fermat_inflections(fermat_trace):
    f = BivariatePoly.from_terms([[4, 0, 1.0], [0, 4, 1.0], [0, 0, -1.0]])
    found = find_inflections(f, fermat_trace)
    pts = sorted((round(w.x), round(w.y)) for w in found)
    assert pts == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    for w in found:
        assert min(math.hypot(w.x - a, w.y - b) for a, b in pts) < 1e-8


def test_ellipse_has_no_special_points(ellipse_trace):
    assert find_real_flexes_and_singular(ellipse_poly(2.0, 1.0), ellipse_trace) == []


def test_nodal_cubic_singular_point():
    f = Y * Y - X * X * (X + 1.0)
    found = find_singular_points(f, (-2.0, 2.0, -2.0, 2.0))
    assert len(found) == 1
    assert math.hypot(found[0].x, found[0].y) < 1e-8
    assert found[0].kind == "singular"


def test_cubic_inflection_sign_change():
    # y = x^3 - x near the origin, bounded by a large oval: x^3 - x - y has a flex at 0
    f = Y - X * X * X + X
    from dualbilliards.algebraic import CurveTrace
    xs = np.linspace(-0.5, 0.5, 101)
    pts = np.stack([xs, xs**3 - xs], axis=1)
    tr = CurveTrace(pts, np.r_[0, np.cumsum(np.hypot(*np.diff(pts, axis=0).T))], False, 0.01)
    found = find_inflections(f, tr)
    assert len(found) == 1 and math.hypot(found[0].x, found[0].y) < 1e-10


def test_model_rejects_singular_seed():
    with pytest.raises((SingularEncountered, ValueError)):
        ImplicitCurveModel(Y * Y - X * X * (X + 1.0), PlanePoint(0.0, 0.0))


def test_radial_seed():
    p = radial_seed(ellipse_poly(2.0, 1.0), angle=0.0)
    assert (p.x, p.y) == pytest.approx((2.0, 0.0))
