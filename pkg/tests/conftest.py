from __future__ import annotations

import math

import numpy as np
import pytest

from dualbilliards.algebraic import BivariatePoly, ImplicitCurveModel, radial_seed, trace_curve
from dualbilliards.curves import make_circle, make_ellipse, make_offset_circle


def ellipse_poly(a: float, b: float) -> BivariatePoly:
    return BivariatePoly.from_terms([[2, 0, 1 / a**2], [0, 2, 1 / b**2], [0, 0, -1.0]])


def fermat_poly() -> BivariatePoly:
    return BivariatePoly.from_terms([[4, 0, 1.0], [0, 4, 1.0], [0, 0, -1.0]])


def convex_quartic() -> BivariatePoly:
    return BivariatePoly.from_terms([[4, 0, 1.0], [0, 4, 1.0], [2, 2, 0.5], [1, 0, 0.3], [0, 0, -1.0]])


def trace_of(f: BivariatePoly, step: float = 1e-2):
    return trace_curve(ImplicitCurveModel(f, radial_seed(f)), step=step)


def exterior_states(curve, n: int, rng, lo: float = 1.05, hi: float = 3.0):
    from dualbilliards.angular import AngularState
    out = []
    for _ in range(n):
        phi = rng.uniform(0, 2 * math.pi)
        r = float(curve.r(phi)) * rng.uniform(lo, hi)
        out.append(AngularState.from_polar(phi, r))
    return out


@pytest.fixture(scope="session")
def ellipse():
    return make_ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def circle():
    return make_circle(1.0)


@pytest.fixture(scope="session")
def offset_circle():
    return make_offset_circle(1.0, 0.5)


@pytest.fixture(scope="session")
def ellipse_trace():
    return trace_of(ellipse_poly(2.0, 1.0))


@pytest.fixture(scope="session")
def fermat_trace():
    return trace_of(fermat_poly())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
