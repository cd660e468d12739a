"""Points, oriented lines and polar duality with respect to the unit circle at O.

An oriented line is stored as ``(phi, p)``: ``phi`` is the angle of the unit
normal ``n = (cos phi, sin phi)``, and the direction of travel is
``v = (-sin phi, cos phi)`` so that ``(n, v)`` is a positive basis.  The line
is ``{x : <n, x> = p}`` and ``p`` equals the angular momentum
``sigma(v) = x v_y - y v_x`` of its unit direction, so positive lines have
``p > 0``.  Every oriented line has exactly one such encoding once ``phi`` is
reduced to ``[0, 2*pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDual, ZeroMomentum

TWO_PI = 2.0 * math.pi
DEGENERACY_TOL = 1e-9
ANGLE_TOL = 1e-12


def normalize_angle(phi: float) -> float:
    """Reduce an angle to ``[0, 2*pi)``."""
    out = math.fmod(phi, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    if out >= TWO_PI:  # fmod of values just below 0 can round up to 2*pi
        out = 0.0
    return out


def angle_diff(a: float, b: float) -> float:
    """Signed difference ``a - b`` reduced to ``(-pi, pi]``."""
    d = math.fmod(a - b, TWO_PI)
    if d > math.pi:
        d -= TWO_PI
    elif d <= -math.pi:
        d += TWO_PI
    return d


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    @classmethod
    def polar(cls, phi: float, r: float) -> PlanePoint:
        return cls(r * math.cos(phi), r * math.sin(phi))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def angle(self) -> float:
        return normalize_angle(math.atan2(self.y, self.x))

    def distance(self, other: PlanePoint) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class OrientedLine:
    phi: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.p)):
            raise ValueError(f"non-finite line ({self.phi}, {self.p})")
        object.__setattr__(self, "phi", normalize_angle(float(self.phi)))
        object.__setattr__(self, "p", float(self.p))

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi)])

    @property
    def direction(self) -> np.ndarray:
        return np.array([-math.sin(self.phi), math.cos(self.phi)])

    @property
    def foot(self) -> np.ndarray:
        """Closest point of the line to O."""
        return self.p * self.normal

    @classmethod
    def through(cls, point, direction) -> OrientedLine:
        """Line through ``point`` travelled along ``direction``."""
        vx, vy = direction
        s = math.hypot(vx, vy)
        if s == 0.0:
            raise ValueError("zero direction vector")
        vx, vy = vx / s, vy / s
        x, y = point
        return cls(math.atan2(-vx, vy), x * vy - y * vx)

    def reversed(self) -> OrientedLine:
        return OrientedLine(self.phi + math.pi, -self.p)

    def is_positive(self) -> bool:
        return self.p > 0.0

    def contains(self, point, tol: float = 1e-10) -> bool:
        x, y = point
        return abs(math.cos(self.phi) * x + math.sin(self.phi) * y - self.p) <= tol

    def isclose(self, other: OrientedLine, angle_tol: float = ANGLE_TOL,
                dist_tol: float = 1e-12) -> bool:
        return (abs(angle_diff(self.phi, other.phi)) <= angle_tol
                and abs(self.p - other.p) <= dist_tol)


def dual_of_line(line: OrientedLine, tol: float = DEGENERACY_TOL) -> PlanePoint:
    """Pole ``n / p`` of a line not passing through O.

    The pole depends only on the unoriented line, so negative lines give the
    same point as their reversal.
    """
    if abs(line.p) <= tol:
        raise DegenerateDual(f"line passes through O (p={line.p:.3e})")
    return PlanePoint(math.cos(line.phi) / line.p, math.sin(line.phi) / line.p)


def dual_of_point(point: PlanePoint, tol: float = DEGENERACY_TOL) -> OrientedLine:
    """Polar line of ``point``, oriented positively."""
    rho = point.norm
    if rho <= tol:
        raise DegenerateDual(f"point too close to O (|P|={rho:.3e})")
    return OrientedLine(math.atan2(point.y, point.x), 1.0 / rho)


def momentum(point, direction) -> float:
    """Angular momentum ``x v_y - y v_x`` of ``direction`` attached at ``point``."""
    return point[0] * direction[1] - point[1] * direction[0]


def momentum_sign(line: OrientedLine, direction, foot=None,
                  tol: float = DEGENERACY_TOL) -> int:
    """Sign of the momentum of ``direction`` taken along ``line``.

    ``foot`` is any point of the line (defaults to the closest point to O);
    the result does not depend on it.
    """
    if abs(line.p) <= tol:
        raise ZeroMomentum("line passes through O")
    if foot is None:
        foot = line.foot
    sigma = momentum(foot, direction)
    if abs(sigma) <= tol * math.hypot(*direction):
        raise ZeroMomentum("direction is not tangent to the line")
    return 1 if sigma > 0 else -1
