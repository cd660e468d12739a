"""Real bivariate polynomials, homogenization, curvature operators and
numerical tracing of real algebraic ovals.

Coefficients are dense: ``coeffs[i, j]`` multiplies ``x**i * y**j``.  For
the homogeneous three-variable polynomial of degree ``d`` the same grid is
used with the power of ``z`` implied as ``d - i - j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d

from .errors import BudgetExceeded, DegreeTooLow, SingularEncountered
from .geometry import PlanePoint

CURVE_TOL = 1e-10
SINGULAR_GRAD_TOL = 1e-8


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.atleast_2d(np.asarray(c, dtype=float))
    nz = np.argwhere(c != 0.0)
    if nz.size == 0:
        return np.zeros((1, 1))
    return c[: nz[:, 0].max() + 1, : nz[:, 1].max() + 1].copy()


def _pad_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])))
    out[: a.shape[0], : a.shape[1]] += a
    out[: b.shape[0], : b.shape[1]] += b
    return out


class BivariatePoly:
    """Polynomial in ``x, y`` with real coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = _trim(coeffs)
        self.coeffs.flags.writeable = False

    @classmethod
    def from_terms(cls, terms: Iterable) -> BivariatePoly:
        """Build from ``[i, j, c]`` triples meaning ``c * x**i * y**j``."""
        terms = [(int(i), int(j), float(c)) for i, j, c in terms]
        if any(i < 0 or j < 0 for i, j, _ in terms):
            raise ValueError("negative exponent in polynomial literal")
        if not terms:
            return cls.zero()
        ni = max(t[0] for t in terms) + 1
        nj = max(t[1] for t in terms) + 1
        c = np.zeros((ni, nj))
        for i, j, v in terms:
            c[i, j] += v
        return cls(c)

    @classmethod
    def zero(cls) -> BivariatePoly:
        return cls(np.zeros((1, 1)))

    @classmethod
    def constant(cls, value: float) -> BivariatePoly:
        return cls(np.array([[float(value)]]))

    @classmethod
    def x(cls) -> BivariatePoly:
        return cls(np.array([[0.0], [1.0]]))

    @classmethod
    def y(cls) -> BivariatePoly:
        return cls(np.array([[0.0, 1.0]]))

    def to_terms(self) -> list[list]:
        return [[int(i), int(j), float(self.coeffs[i, j])]
                for i, j in np.argwhere(self.coeffs != 0.0)]

    @property
    def degree(self) -> int:
        nz = np.argwhere(self.coeffs != 0.0)
        if nz.size == 0:
            return -1
        return int(nz.sum(axis=1).max())

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, x, y):
        return npoly.polyval2d(x, y, self.coeffs)

    def partial(self, i: int = 0, j: int = 0) -> BivariatePoly:
        """Derivative ``d^(i+j) / dx^i dy^j``."""
        c = self.coeffs
        if i >= c.shape[0] or j >= c.shape[1]:
            return BivariatePoly.zero()
        if i:
            c = npoly.polyder(c, m=i, axis=0)
        if j:
            c = npoly.polyder(c, m=j, axis=1)
        return BivariatePoly(c)

    def gradient(self, x, y):
        return self.partial(1, 0)(x, y), self.partial(0, 1)(x, y)

    def _coerce(self, other) -> BivariatePoly:
        if isinstance(other, BivariatePoly):
            return other
        if np.isscalar(other):
            return BivariatePoly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return BivariatePoly(_pad_add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly(-self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return BivariatePoly(self.coeffs * float(other))
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return BivariatePoly(convolve2d(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return BivariatePoly(self.coeffs / float(scalar))

    def __pow__(self, n: int):
        if n < 0 or int(n) != n:
            raise ValueError("only non-negative integer powers")
        out = BivariatePoly.constant(1.0)
        base = self
        n = int(n)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def allclose(self, other: BivariatePoly, atol: float = 1e-12) -> bool:
        diff = (self - other).coeffs
        return bool(np.all(np.abs(diff) <= atol))

    def coefficient_scale(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if not self.is_zero() else 0.0

    def __repr__(self):
        terms = " + ".join(f"{c:g}*x^{i}*y^{j}" for i, j, c in self.to_terms())
        return f"BivariatePoly({terms or '0'})"


class HomogeneousPoly3:
    """Homogeneous polynomial in ``x, y, z`` of fixed total degree."""

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs, degree: int):
        c = _trim(coeffs)
        degree = int(degree)
        if degree < 0:
            raise ValueError("degree must be non-negative")
        i, j = np.indices(c.shape)
        if np.any(c[i + j > degree]):
            raise ValueError(f"monomial exceeds degree {degree}")
        self.coeffs = c
        self.coeffs.flags.writeable = False
        self.degree = degree

    def __call__(self, x, y, z):
        x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
        out = np.zeros(x.shape)
        for i, j in np.argwhere(self.coeffs != 0.0):
            out = out + self.coeffs[i, j] * x**i * y**j * z ** (self.degree - i - j)
        return out if out.ndim else float(out)

    def partial(self, var: str) -> HomogeneousPoly3:
        if self.degree == 0:
            return HomogeneousPoly3(np.zeros((1, 1)), 0)
        c = self.coeffs
        if var == "x":
            new = npoly.polyder(c, axis=0) if c.shape[0] > 1 else np.zeros((1, 1))
        elif var == "y":
            new = npoly.polyder(c, axis=1) if c.shape[1] > 1 else np.zeros((1, 1))
        elif var == "z":
            i, j = np.indices(c.shape)
            new = c * (self.degree - i - j)
        else:
            raise ValueError(f"unknown variable {var!r}")
        return HomogeneousPoly3(new, self.degree - 1)

    def __mul__(self, other):
        if np.isscalar(other):
            return HomogeneousPoly3(self.coeffs * float(other), self.degree)
        return HomogeneousPoly3(convolve2d(self.coeffs, other.coeffs),
                                self.degree + other.degree)

    __rmul__ = __mul__

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("cannot add homogeneous polynomials of different degree")
        return HomogeneousPoly3(_pad_add(self.coeffs, other.coeffs), self.degree)

    def __neg__(self):
        return HomogeneousPoly3(-self.coeffs, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def dehomogenize(self) -> BivariatePoly:
        """Restriction to the chart ``z = 1``."""
        return BivariatePoly(self.coeffs)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __repr__(self):
        return f"HomogeneousPoly3(degree={self.degree}, terms={BivariatePoly(self.coeffs).to_terms()})"


def partials(f: BivariatePoly, i: int, j: int) -> BivariatePoly:
    return f.partial(i, j)


def H_operator(f: BivariatePoly) -> BivariatePoly:
    """``f_xx f_y^2 - 2 f_xy f_x f_y + f_yy f_x^2``.

    On ``{f = 0}`` this is ``|grad f|^3`` times the signed curvature, so its
    zeros on a smooth real branch are the inflection points.
    """
    fx, fy = f.partial(1, 0), f.partial(0, 1)
    fxx, fxy, fyy = f.partial(2, 0), f.partial(1, 1), f.partial(0, 2)
    return fxx * fy * fy - 2.0 * fxy * fx * fy + fyy * fx * fx


def homogenize(f: BivariatePoly, degree: int | None = None) -> HomogeneousPoly3:
    d = f.degree if degree is None else degree
    return HomogeneousPoly3(f.coeffs, max(d, 0))


def dehomogenize(F: HomogeneousPoly3) -> BivariatePoly:
    return F.dehomogenize()


def hessian3(F: HomogeneousPoly3) -> HomogeneousPoly3:
    """Determinant of the 3x3 matrix of second partials of ``F``."""
    if F.degree < 2:
        raise DegreeTooLow(f"Hessian needs degree >= 2, got {F.degree}")
    fx, fy, fz = F.partial("x"), F.partial("y"), F.partial("z")
    a, b, c = fx.partial("x"), fx.partial("y"), fx.partial("z")
    e, g = fy.partial("y"), fy.partial("z")
    i = fz.partial("z")
    return a * (e * i - g * g) - b * (b * i - g * c) + c * (b * g - e * c)


def hessian_relation_rhs(F: HomogeneousPoly3, x, y, z):
    """Right-hand side of the classical identity expressing ``Hess(F)`` on
    the chart through ``F``, its ``x, y`` second partials and ``H(F)`` with ``z``
    frozen as a parameter.
    """
    d = F.degree
    fx, fy = F.partial("x"), F.partial("y")
    fxx, fxy, fyy = fx.partial("x"), fx.partial("y"), fy.partial("y")
    vx, vy = fx(x, y, z), fy(x, y, z)
    vxx, vxy, vyy = fxx(x, y, z), fxy(x, y, z), fyy(x, y, z)
    h = vxx * vy**2 - 2.0 * vxy * vx * vy + vyy * vx**2
    return (d - 1) ** 2 / z**2 * (d / (d - 1) * F(x, y, z) * (vxx * vyy - vxy**2) - h)


# --- tracing -----------------------------------------------------------------


@dataclass(frozen=True)
class ImplicitCurveModel:
    poly: BivariatePoly
    seed: PlanePoint
    ccw: bool = True

    def __post_init__(self):
        gx, gy = self.poly.gradient(self.seed.x, self.seed.y)
        if math.hypot(gx, gy) < SINGULAR_GRAD_TOL:
            raise SingularEncountered("gradient vanishes at the seed point")


@dataclass(frozen=True, eq=False)
class CurveTrace:
    """Ordered samples on ``{f = 0}``; ``closed`` traces do not repeat the start."""

    points: np.ndarray
    arclength: np.ndarray
    closed: bool
    step: float

    @property
    def length(self) -> float:
        """Total chord length, including the closing chord for closed traces."""
        total = float(self.arclength[-1])
        if self.closed:
            total += float(np.linalg.norm(self.points[0] - self.points[-1]))
        return total

    def bbox(self, inflate: float = 0.0):
        lo, hi = self.points.min(axis=0), self.points.max(axis=0)
        pad = inflate * (hi - lo)
        return (lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1])

    def segments(self):
        n = len(self.points)
        last = n if self.closed else n - 1
        for k in range(last):
            yield k, (k + 1) % n


class _Projector:
    """Newton corrector moving a point onto ``{f = 0}`` along the gradient."""

    def __init__(self, f: BivariatePoly, tol: float = 1e-12, maxiter: int = 40):
        self.f = f
        self.fx, self.fy = f.partial(1, 0), f.partial(0, 1)
        self.tol = tol
        self.maxiter = maxiter

    def grad(self, p):
        return np.array([self.fx(p[0], p[1]), self.fy(p[0], p[1])])

    def __call__(self, p):
        p = np.array(p, dtype=float)
        for _ in range(self.maxiter):
            v = self.f(p[0], p[1])
            if abs(v) <= self.tol:
                return p, True
            g = self.grad(p)
            gg = g @ g
            if gg < SINGULAR_GRAD_TOL**2:
                raise SingularEncountered(f"|grad f| < {SINGULAR_GRAD_TOL} near ({p[0]:.6g}, {p[1]:.6g})")
            p = p - v * g / gg
        return p, abs(self.f(p[0], p[1])) <= CURVE_TOL


def trace_curve(model: ImplicitCurveModel, step: float = 1e-2, max_points: int = 200_000,
                require_closed: bool = True) -> CurveTrace:
    """Predictor-corrector trace of the branch of ``{f = 0}`` through the seed.

    Consecutive samples are at most ``step`` apart.  Tracing stops when the
    branch closes up; otherwise ``BudgetExceeded`` is raised after
    ``max_points`` samples, unless ``require_closed`` is false, in which case
    the open trace is returned.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    proj = _Projector(model.poly)
    start, ok = proj((model.seed.x, model.seed.y))
    if not ok:
        raise SingularEncountered("could not project the seed onto the curve")

    def tangent(p, ref=None):
        g = proj.grad(p)
        n = math.hypot(g[0], g[1])
        if n < SINGULAR_GRAD_TOL:
            raise SingularEncountered(f"|grad f| < {SINGULAR_GRAD_TOL} at ({p[0]:.6g}, {p[1]:.6g})")
        t = np.array([-g[1], g[0]]) / n
        if ref is not None and t @ ref < 0:
            t = -t
        return t

    pts = [start]
    t = tangent(start)
    arc = [0.0]
    closed = False
    h_min = step * 1e-6
    while len(pts) < max_points:
        x = pts[-1]
        h = 0.95 * step
        while True:
            y, ok = proj(x + h * t)
            dist = float(np.linalg.norm(y - x))
            if ok and dist <= step:
                t_new = tangent(y, t)
                if t_new @ t > math.cos(math.radians(20.0)):
                    break
            h *= 0.5
            if h < h_min:
                raise SingularEncountered(f"step collapsed near ({x[0]:.6g}, {x[1]:.6g})")
        pts.append(y)
        arc.append(arc[-1] + dist)
        t = t_new
        if arc[-1] > 3.0 * step and np.linalg.norm(y - start) <= step:
            if np.linalg.norm(y - start) < 0.05 * step:
                pts.pop()
                arc.pop()
            closed = True
            break
    else:
        if require_closed:
            raise BudgetExceeded(f"curve did not close within {max_points} points")

    points = np.array(pts)
    arclength = np.array(arc)
    if closed and model.ccw is not None:
        xs, ys = points[:, 0], points[:, 1]
        area = 0.5 * np.sum(xs * np.roll(ys, -1) - np.roll(xs, -1) * ys)
        if (area > 0) != bool(model.ccw):
            points = np.vstack([points[:1], points[:0:-1]])
            seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
            arclength = np.concatenate([[0.0], np.cumsum(seg)])
    return CurveTrace(points=points, arclength=arclength, closed=closed, step=step)


# --- inflections and singular points ---------------------------------------


@dataclass(frozen=True)
class SpecialPoint:
    x: float
    y: float
    kind: str  # "inflection" or "singular"

    @property
    def point(self) -> PlanePoint:
        return PlanePoint(self.x, self.y)


def _bisect_on_curve(proj, fn, a, b, fa, tol=1e-13, maxiter=200):
    """Bisection for a sign change of ``fn`` along the arc between ``a`` and ``b``."""
    pa, pb = np.array(a, float), np.array(b, float)
    for _ in range(maxiter):
        if np.linalg.norm(pb - pa) <= tol:
            break
        mid, _ = proj(0.5 * (pa + pb))
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            pa, fa = mid, fm
        else:
            pb = mid
    return 0.5 * (pa + pb) if np.linalg.norm(pb - pa) > 0 else pa


def _cluster(points: list[tuple[np.ndarray, str]], radius: float = 1e-6) -> list[SpecialPoint]:
    out: list[SpecialPoint] = []
    for p, kind in points:
        if any(o.kind == kind and math.hypot(o.x - p[0], o.y - p[1]) <= radius for o in out):
            continue
        out.append(SpecialPoint(float(p[0]), float(p[1]), kind))
    return out


def find_inflections(f: BivariatePoly, trace: CurveTrace, h_tol: float = 1e-8) -> list[SpecialPoint]:
    """Real inflection points on a traced branch.

    Simple zeros of ``H(f)`` show up as sign changes along the trace.  Zeros
    of even order (undulation points, where the curvature vanishes without
    changing sign) are caught as sign changes of the tangential derivative of
    ``H(f)`` where ``H(f)`` itself is small; they are kept only if ``H(f)``
    vanishes there to ``h_tol`` relative to its scale on the trace.
    """
    proj = _Projector(f)
    Hf = H_operator(f)
    Hx, Hy = Hf.partial(1, 0), Hf.partial(0, 1)
    fx, fy = f.partial(1, 0), f.partial(0, 1)
    P = trace.points
    Hvals = Hf(P[:, 0], P[:, 1])
    scale = max(1.0, float(np.max(np.abs(Hvals))))

    def tangential(p):
        gx, gy = fx(p[0], p[1]), fy(p[0], p[1])
        return Hx(p[0], p[1]) * (-gy) + Hy(p[0], p[1]) * gx

    Dvals = Hx(P[:, 0], P[:, 1]) * (-fy(P[:, 0], P[:, 1])) + Hy(P[:, 0], P[:, 1]) * fx(P[:, 0], P[:, 1])

    def h_at(p):
        return Hf(p[0], p[1])

    found = []
    for a, b in trace.segments():
        if Hvals[a] == 0.0:
            found.append((P[a], "inflection"))
            continue
        if Hvals[a] * Hvals[b] < 0:
            found.append((_bisect_on_curve(proj, h_at, P[a], P[b], Hvals[a]), "inflection"))
        elif Dvals[a] * Dvals[b] < 0 and min(abs(Hvals[a]), abs(Hvals[b])) < 1e-2 * scale:
            q = _bisect_on_curve(proj, tangential, P[a], P[b], Dvals[a])
            if abs(Hf(q[0], q[1])) <= h_tol * scale:
                found.append((q, "inflection"))
    return _cluster(found)


def find_singular_points(f: BivariatePoly, bbox, grid: int = 64, tol: float = 1e-9,
                         maxiter: int = 60) -> list[SpecialPoint]:
    """Real solutions of ``f = f_x = f_y = 0`` reached by Gauss-Newton from a
    uniform ``grid x grid`` set of seeds over ``bbox = (xmin, xmax, ymin, ymax)``.
    """
    fx, fy = f.partial(1, 0), f.partial(0, 1)
    fxx, fxy, fyy = f.partial(2, 0), f.partial(1, 1), f.partial(0, 2)
    xs = np.linspace(bbox[0], bbox[1], grid)
    ys = np.linspace(bbox[2], bbox[3], grid)
    X, Y = (a.ravel() for a in np.meshgrid(xs, ys))
    for _ in range(maxiter):
        r = np.stack([f(X, Y), fx(X, Y), fy(X, Y)], axis=-1)
        a, b, c = fx(X, Y), fxx(X, Y), fxy(X, Y)
        d, e = fy(X, Y), fyy(X, Y)
        J = np.stack([np.stack([a, d], -1), np.stack([b, c], -1), np.stack([c, e], -1)], axis=1)
        JT = np.transpose(J, (0, 2, 1))
        A = JT @ J
        A = A + 1e-14 * (np.trace(A, axis1=1, axis2=2)[:, None, None] + 1e-300) * np.eye(2)
        g = np.einsum("nij,nj->ni", JT, r)
        try:
            delta = np.linalg.solve(A, -g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = np.zeros_like(g)
        delta = np.nan_to_num(delta)
        X, Y = X + delta[:, 0], Y + delta[:, 1]
        keep = np.isfinite(X) & np.isfinite(Y) & (np.abs(X) < 1e8) & (np.abs(Y) < 1e8)
        X, Y = X[keep], Y[keep]
    scale = max(1.0, f.coefficient_scale())
    found = []
    for x, y in zip(X, Y):
        mag = max(1.0, abs(x), abs(y)) ** max(f.degree, 0)
        if max(abs(f(x, y)), abs(fx(x, y)), abs(fy(x, y))) <= tol * scale * mag:
            found.append((np.array([x, y]), "singular"))
    return _cluster(found)


def find_real_flexes_and_singular(f: BivariatePoly, trace: CurveTrace | None = None,
                                  bbox=None, grid: int = 64) -> list[SpecialPoint]:
    """Inflection points on the traced branch plus real singular points in the
    trace's bounding box inflated by 25% (or in ``bbox`` if given).
    """
    if trace is None and bbox is None:
        raise ValueError("need a trace or a bounding box")
    out: list[SpecialPoint] = []
    if trace is not None:
        out.extend(find_inflections(f, trace))
        if bbox is None:
            bbox = trace.bbox(inflate=0.25)
    out.extend(find_singular_points(f, bbox, grid=grid))
    return out


def radial_seed(f: BivariatePoly, angle: float = 0.0, rmax: float = 1e3) -> PlanePoint:
    """First point of ``{f = 0}`` on the ray from O at ``angle``."""
    c, s = math.cos(angle), math.sin(angle)
    # f(r c, r s) as a polynomial in r
    coeffs = np.zeros(max(f.degree, 0) + 1)
    for i, j, v in f.to_terms():
        coeffs[i + j] += v * c**i * s**j
    roots = npoly.polyroots(coeffs) if f.degree > 0 else np.array([])
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 and 1e-12 < r.real < rmax)
    if not real:
        raise ValueError(f"no point of the curve on the ray at angle {angle}")
    return PlanePoint(real[0] * c, real[0] * s)
