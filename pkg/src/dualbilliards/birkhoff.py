"""Birkhoff billiard map on oriented lines and polynomial integrals in
``(sigma, v_x, v_y)``.

The table is the oval dual to a ``SupportCurve``: with ``p = 1/r`` its
supporting function, the boundary point with outward normal angle ``psi`` is
``p(psi) n(psi) + p'(psi) n_perp(psi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ._roots import newton_bisect
from .curves import SupportCurve
from .errors import (BilliardError, NoIntersection, OrbitError, ParityMismatch,
                     TangentialChord)
from .geometry import OrientedLine, PlanePoint

TANGENTIAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BilliardTable:
    """Convex table dual to ``curve`` about O."""

    curve: SupportCurve

    @property
    def name(self) -> str:
        return f"dual of {self.curve.name}"

    def support(self, psi):
        return self.curve.p(psi)

    def point(self, psi) -> np.ndarray:
        p0, p1, _, _ = self.curve.p_jet(psi)
        c, s = np.cos(psi), np.sin(psi)
        return np.stack([p0 * c - p1 * s, p0 * s + p1 * c], axis=-1)

    def unit_tangent(self, psi) -> np.ndarray:
        return np.stack([-np.sin(psi), np.cos(psi)], axis=-1)

    def tangent_line(self, psi: float) -> OrientedLine:
        """Positively oriented tangent line with outward normal angle ``psi``."""
        return OrientedLine(psi, float(self.support(psi)))


@dataclass(frozen=True)
class BilliardLineState:
    line: OrientedLine
    hit: Optional[PlanePoint] = None


def forward_hit_angle(table: BilliardTable, line: OrientedLine) -> float:
    """Normal angle of the boundary point where the oriented line exits the table."""
    phi, p = line.phi, line.p

    def h(psi):
        p0, p1, _, _ = table.curve.p_jet(psi)
        d = psi - phi
        return p0 * math.cos(d) - p1 * math.sin(d) - p

    def dh(psi):
        p0, _, p2, _ = table.curve.p_jet(psi)
        return -(p0 + p2) * math.sin(psi - phi)

    ha, hb = h(phi), h(phi + math.pi)
    if not (ha > 0 > hb):
        raise NoIntersection(f"line (phi={phi:.6g}, p={p:.6g}) misses the table")
    return newton_bisect(h, dh, phi, phi + math.pi, fa=ha, fb=hb)


def reflect(table: BilliardTable, state: BilliardLineState | OrientedLine) -> BilliardLineState:
    """Advance to the next boundary hit and reflect."""
    line = state.line if isinstance(state, BilliardLineState) else state
    psi = forward_hit_angle(table, line)
    sin_incidence = math.sin(psi - line.phi)
    if abs(sin_incidence) < TANGENTIAL_TOL:
        raise TangentialChord(f"grazing incidence (sin theta = {sin_incidence:.3e})")
    q = table.point(psi)
    n = np.array([math.cos(psi), math.sin(psi)])
    v = line.direction
    v_out = v - 2.0 * (v @ n) * n
    return BilliardLineState(OrientedLine.through(q, v_out), PlanePoint(float(q[0]), float(q[1])))


def birkhoff_map(table: BilliardTable, line: OrientedLine) -> OrientedLine:
    return reflect(table, line).line


def inverse_birkhoff_map(table: BilliardTable, line: OrientedLine) -> OrientedLine:
    return reflect(table, line.reversed()).line.reversed()


def billiard_orbit(table: BilliardTable, line: OrientedLine, n: int,
                   backward: bool = False) -> list[BilliardLineState]:
    """``n + 1`` states starting from ``line`` (iterating the inverse map if
    ``backward``).  Failures raise ``OrbitError`` with the step index.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    states = [BilliardLineState(line)]
    for k in range(n):
        try:
            cur = states[-1].line
            if backward:
                nxt = reflect(table, cur.reversed())
                nxt = BilliardLineState(nxt.line.reversed(), nxt.hit)
            else:
                nxt = reflect(table, cur)
        except BilliardError as exc:
            raise OrbitError(exc, k, partial=states) from exc
        states.append(nxt)
    return states


# --- polynomial integrals ----------------------------------------------------


class IntegralPoly:
    """Homogeneous polynomial ``sum c * sigma^i v_x^j v_y^k``.

    ``terms`` maps exponent triples ``(i, j, k)`` to coefficients.
    """

    __slots__ = ("terms", "degree")

    def __init__(self, terms: Mapping, degree: int | None = None):
        clean = {}
        for key, c in dict(terms).items():
            i, j, k = (int(e) for e in key)
            if min(i, j, k) < 0:
                raise ValueError("negative exponent")
            if c != 0:
                clean[(i, j, k)] = clean.get((i, j, k), 0.0) + float(c)
        degrees = {sum(k) for k in clean}
        if degree is None:
            if len(degrees) > 1:
                raise ValueError(f"polynomial is not homogeneous (degrees {sorted(degrees)})")
            degree = degrees.pop() if degrees else 0
        elif degrees - {degree}:
            raise ValueError(f"monomials of degree {sorted(degrees - {degree})} in a degree-{degree} polynomial")
        self.terms = clean
        self.degree = int(degree)

    @classmethod
    def from_list(cls, rows, degree: int | None = None) -> IntegralPoly:
        """From ``[i, j, k, c]`` rows meaning ``c * sigma^i v_x^j v_y^k``."""
        terms: dict = {}
        for i, j, k, c in rows:
            key = (int(i), int(j), int(k))
            terms[key] = terms.get(key, 0.0) + float(c)
        return cls(terms, degree)

    def to_list(self) -> list[list]:
        return [[i, j, k, c] for (i, j, k), c in sorted(self.terms.items())]

    def __call__(self, sigma, vx, vy):
        out = 0.0
        for (i, j, k), c in self.terms.items():
            out = out + c * sigma**i * vx**j * vy**k
        return out

    def __sub__(self, other: IntegralPoly) -> IntegralPoly:
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0.0) - c
        return IntegralPoly(terms, self.degree)

    def is_homogeneous(self, rng=None, trials: int = 5) -> bool:
        rng = np.random.default_rng(0) if rng is None else rng
        for _ in range(trials):
            s, a, b = rng.normal(size=3)
            t = rng.uniform(0.5, 2.0)
            lhs = self(t * s, t * a, t * b)
            rhs = t**self.degree * self(s, a, b)
            if abs(lhs - rhs) > 1e-10 * max(1.0, abs(rhs)):
                return False
        return True

    def __repr__(self):
        return f"IntegralPoly(degree={self.degree}, terms={self.to_list()})"


def eval_integral(phi_poly: IntegralPoly, line: OrientedLine) -> float:
    """Value on the unit velocity along ``line``: ``Phi(p, -sin phi, cos phi)``."""
    return float(phi_poly(line.p, -math.sin(line.phi), math.cos(line.phi)))


def homogenize_integral(raw, n: int) -> IntegralPoly:
    """Lift a mixed-degree polynomial to degree ``n`` by multiplying each
    monomial of degree ``n - 2j`` by ``(v_x^2 + v_y^2)^j``.

    ``raw`` maps ``(i, j, k)`` exponents of ``sigma, v_x, v_y`` to coefficients
    (or is a list of ``[i, j, k, c]`` rows).
    """
    if not isinstance(raw, Mapping):
        raw = {(int(i), int(j), int(k)): float(c) for i, j, k, c in raw}
    out: dict = {}
    for (i, j, k), c in raw.items():
        deg = i + j + k
        if deg > n or (n - deg) % 2:
            raise ParityMismatch(f"monomial of degree {deg} cannot be lifted to degree {n}")
        m = (n - deg) // 2
        for t in range(m + 1):
            binom = math.comb(m, t)
            key = (i, j + 2 * t, k + 2 * (m - t))
            out[key] = out.get(key, 0.0) + c * binom
    return IntegralPoly(out, n)


def tangential_samples(phi_poly: IntegralPoly, table: BilliardTable, grid) -> np.ndarray:
    """``Phi(q, tau(q))`` along the boundary, unit tangents positively oriented."""
    grid = np.asarray(grid, dtype=float)
    q = table.point(grid)
    tau = table.unit_tangent(grid)
    sigma = q[:, 0] * tau[:, 1] - q[:, 1] * tau[:, 0]
    return np.asarray(phi_poly(sigma, tau[:, 0], tau[:, 1]), dtype=float) * np.ones(len(grid))


def tangential_values(phi_poly: IntegralPoly, table: BilliardTable, grid=None) -> float:
    """Maximum of ``|Phi(q, tau(q))|`` over the boundary grid."""
    if grid is None:
        grid = np.linspace(0.0, 2 * math.pi, 1024, endpoint=False)
    return float(np.max(np.abs(tangential_samples(phi_poly, table, grid))))


def subtract_energy(phi_poly: IntegralPoly, c: float) -> IntegralPoly:
    """``Phi - c |v|^n`` for even ``n``."""
    n = phi_poly.degree
    if n % 2:
        raise ParityMismatch("energy shift needs an even degree")
    return phi_poly - homogenize_integral({(0, 0, 0): c}, n)
