"""Star-shaped convex ovals given by their polar position function ``r(phi)``
about the interior point O.

The reciprocal ``p = 1/r`` is the supporting function of the dual oval, so the
same object drives both the angular map (through ``r``) and the billiard table
(through ``p``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .algebraic import BivariatePoly, ImplicitCurveModel
from .errors import CenterOutside, InvalidAxes, NonConvex
from .geometry import PlanePoint

GRID_SIZE = 4096

Jet = tuple  # (value, d1, d2, d3); d3 may be None


def power_jet(g: Jet, s: float) -> Jet:
    """Derivatives up to third order of ``g**s`` from those of ``g``."""
    u, u1, u2, u3 = g
    h0 = u**s
    h1 = s * u ** (s - 1)
    h2 = s * (s - 1) * u ** (s - 2)
    h3 = s * (s - 1) * (s - 2) * u ** (s - 3)
    d1 = h1 * u1
    d2 = h2 * u1**2 + h1 * u2
    d3 = None if u3 is None else h3 * u1**3 + 3 * h2 * u1 * u2 + h1 * u3
    return h0, d1, d2, d3


@dataclass(frozen=True, eq=False)
class SupportCurve:
    """Oval ``Gamma(phi) = r(phi) e^{i phi}`` about O.

    ``jet(phi)`` returns ``(r, r', r'', r''')`` with numpy broadcasting; the
    third derivative may be ``None`` when it is not available analytically.
    ``origin`` records where O sits in the user's plane coordinates.
    """

    jet: Callable
    name: str = "curve"
    origin: tuple = (0.0, 0.0)
    params: dict = field(default_factory=dict)

    def r(self, phi):
        return self.jet(phi)[0]

    def r1(self, phi):
        return self.jet(phi)[1]

    def r2(self, phi):
        return self.jet(phi)[2]

    def r3(self, phi):
        return self.jet(phi)[3]

    @property
    def has_r3(self) -> bool:
        return self.jet(0.0)[3] is not None

    def p_jet(self, phi) -> Jet:
        """Supporting function ``p = 1/r`` of the dual oval and its derivatives."""
        return power_jet(self.jet(phi), -1.0)

    def p(self, phi):
        return 1.0 / self.jet(phi)[0]

    def curvature_radius_dual(self, phi):
        """``(p'' + p)``, the radius of curvature of the dual oval."""
        p0, _, p2, _ = self.p_jet(phi)
        return p0 + p2

    def validate(self, grid: int = GRID_SIZE, strict: bool = True) -> None:
        """Grid surrogate for positivity, periodicity and strict convexity.

        With ``strict=False`` the curvature conditions are only required to be
        non-negative (ovals with flattening points such as Fermat curves).
        """
        phi = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
        r, r1, r2, _ = self.jet(phi)
        r = np.broadcast_to(r, phi.shape)
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise NonConvex(f"{self.name}: r(phi) must be positive and finite")
        if abs(float(self.r(0.0)) - float(self.r(2 * math.pi))) > 1e-12 * max(1.0, float(self.r(0.0))):
            raise NonConvex(f"{self.name}: r is not 2*pi periodic")
        conv = r**2 + 2 * r1**2 - r * r2
        rad = self.curvature_radius_dual(phi)
        floor = 0.0 if strict else -1e-9 * float(np.max(np.abs(conv)))
        if np.any(conv <= floor) or np.any(rad <= (0.0 if strict else -1e-9)):
            k = int(np.argmin(rad))
            raise NonConvex(f"{self.name}: convexity fails near phi={phi[k]:.6f}")


def curve_point(curve: SupportCurve, phi) -> np.ndarray:
    """``Gamma(phi)`` in O-centred coordinates; shape ``(..., 2)``."""
    r = curve.r(phi)
    return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)


def tangent_vector(curve: SupportCurve, phi) -> np.ndarray:
    """``d Gamma / d phi = (r' + i r) e^{i phi}`` as real components."""
    r, r1, _, _ = curve.jet(phi)
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([r1 * c - r * s, r1 * s + r * c], axis=-1)


def to_plane(curve: SupportCurve, points) -> np.ndarray:
    return np.asarray(points) + np.asarray(curve.origin, dtype=float)


def make_ellipse(a: float, b: float) -> SupportCurve:
    """Ellipse ``x^2/a^2 + y^2/b^2 = 1`` with O at its centre."""
    if not (a > 0 and b > 0):
        raise InvalidAxes(f"semi-axes must be positive, got a={a}, b={b}")
    alpha = 0.5 * (1 / a**2 + 1 / b**2)
    beta = 0.5 * (1 / a**2 - 1 / b**2)

    def jet(phi):
        phi = np.asarray(phi, dtype=float)
        c2, s2 = np.cos(2 * phi), np.sin(2 * phi)
        u = (alpha + beta * c2, -2 * beta * s2, -4 * beta * c2, 8 * beta * s2)
        return power_jet(u, -0.5)

    curve = SupportCurve(jet, name=f"ellipse(a={a:g}, b={b:g})", params={"kind": "ellipse", "a": a, "b": b})
    curve.validate()
    return curve


def make_circle(R: float) -> SupportCurve:
    return make_ellipse(R, R)


def make_offset_circle(R: float, x0: float) -> SupportCurve:
    """Circle ``x^2 + y^2 = R^2`` seen from ``O = (x0, 0)``."""
    if not R > 0:
        raise InvalidAxes(f"radius must be positive, got {R}")
    if abs(x0) >= R:
        raise CenterOutside(f"|x0|={abs(x0)} must be below R={R}")

    def jet(phi):
        phi = np.asarray(phi, dtype=float)
        c, s = np.cos(phi), np.sin(phi)
        c2, s2 = np.cos(2 * phi), np.sin(2 * phi)
        w = (R**2 - 0.5 * x0**2 * (1 - c2), -x0**2 * s2, -2 * x0**2 * c2, 4 * x0**2 * s2)
        q0, q1, q2, q3 = power_jet(w, 0.5)
        return (-x0 * c + q0, x0 * s + q1, x0 * c + q2, -x0 * s + q3)

    curve = SupportCurve(jet, name=f"offset_circle(R={R:g}, x0={x0:g})", origin=(x0, 0.0),
                         params={"kind": "offset_circle", "R": R, "x0": x0})
    curve.validate()
    return curve


def make_trig_poly(cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = ()) -> SupportCurve:
    """Oval whose dual has supporting function
    ``p(phi) = sum_k cos_coeffs[k] cos(k phi) + sin_coeffs[k] sin(k phi)``.
    """
    a = np.asarray(cos_coeffs, dtype=float)
    b = np.zeros(len(a)) if len(sin_coeffs) == 0 else np.asarray(sin_coeffs, dtype=float)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    k = np.arange(n, dtype=float)

    def jet(phi):
        phi = np.asarray(phi, dtype=float)
        kp = np.multiply.outer(phi, k)
        c, s = np.cos(kp), np.sin(kp)
        p0 = c @ a + s @ b
        p1 = (-s * k) @ a + (c * k) @ b
        p2 = (-c * k**2) @ a + (-s * k**2) @ b
        p3 = (s * k**3) @ a + (-c * k**3) @ b
        return power_jet((p0, p1, p2, p3), -1.0)

    curve = SupportCurve(jet, name="trig_poly", params={"kind": "trig_poly", "cos": a.tolist(), "sin": b.tolist()})
    curve.validate()
    return curve


def _radial_coeffs(f: BivariatePoly, phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    out = np.zeros(max(f.degree, 0) + 1)
    for i, j, v in f.to_terms():
        out[i + j] += v * c**i * s**j
    return out


def support_from_implicit(f: BivariatePoly, strict: bool = False) -> SupportCurve:
    """Polar position function of the oval ``{f = 0}`` around O.

    ``r(phi)`` is the smallest positive root of ``f(r cos phi, r sin phi)``;
    its first two derivatives follow from implicit differentiation.  No third
    derivative is provided.
    """
    fx, fy = f.partial(1, 0), f.partial(0, 1)
    fxx, fxy, fyy = f.partial(2, 0), f.partial(1, 1), f.partial(0, 2)

    def radius(phi):
        roots = npoly.polyroots(_radial_coeffs(f, phi))
        real = [z.real for z in roots if abs(z.imag) < 1e-7 and z.real > 0]
        if not real:
            raise NonConvex(f"ray at phi={phi} misses the curve")
        r = min(real)
        c, s = math.cos(phi), math.sin(phi)
        for _ in range(3):
            x, y = r * c, r * s
            d = fx(x, y) * c + fy(x, y) * s
            if d == 0:
                break
            r -= f(x, y) / d
        return r

    def jet(phi):
        phi_arr = np.asarray(phi, dtype=float)
        flat = phi_arr.ravel()
        r = np.array([radius(float(t)) for t in flat]).reshape(phi_arr.shape)
        c, s = np.cos(phi_arr), np.sin(phi_arr)
        x, y = r * c, r * s
        gx, gy = fx(x, y), fy(x, y)
        hxx, hxy, hyy = fxx(x, y), fxy(x, y), fyy(x, y)
        # G(r, phi) = f(r cos phi, r sin phi)
        Gr = gx * c + gy * s
        Gp = r * (-gx * s + gy * c)
        Grr = hxx * c * c + 2 * hxy * c * s + hyy * s * s
        Grp = (-hxx * r * s + hxy * r * c) * c - gx * s + (-hxy * r * s + hyy * r * c) * s + gy * c
        Gpp = r * (-(-hxx * r * s + hxy * r * c) * s - gx * c
                   + (-hxy * r * s + hyy * r * c) * c - gy * s)
        r1 = -Gp / Gr
        r2 = -(Grr * r1**2 + 2 * Grp * r1 + Gpp) / Gr
        if r.ndim == 0:
            r, r1, r2 = float(r), float(r1), float(r2)
        return r, r1, r2, None

    curve = SupportCurve(jet, name="implicit", params={"kind": "implicit", "poly": f.to_terms()})
    curve.validate(grid=1024, strict=strict)
    return curve


def curve_from_dict(spec: dict) -> SupportCurve:
    """Build a curve from its JSON description (see README for the schema)."""
    kind = spec.get("kind")
    if kind == "ellipse":
        return make_ellipse(float(spec["a"]), float(spec["b"]))
    if kind == "circle":
        return make_circle(float(spec["R"]))
    if kind == "offset_circle":
        return make_offset_circle(float(spec["R"]), float(spec["x0"]))
    if kind == "trig_poly":
        return make_trig_poly(spec["cos"], spec.get("sin", ()))
    if kind == "implicit":
        return support_from_implicit(BivariatePoly.from_terms(spec["poly"]),
                                     strict=bool(spec.get("strict", False)))
    raise ValueError(f"unknown curve kind {kind!r}")


def load_curve(source: str) -> SupportCurve:
    """Curve from a JSON file path or an inline JSON string."""
    return curve_from_dict(_load_json(source))


def implicit_model_from_dict(spec: dict) -> Optional[ImplicitCurveModel]:
    if spec.get("kind") != "implicit":
        return None
    f = BivariatePoly.from_terms(spec["poly"])
    seed = spec.get("seed")
    if seed is None:
        from .algebraic import radial_seed
        seed_pt = radial_seed(f)
    else:
        seed_pt = PlanePoint(float(seed[0]), float(seed[1]))
    return ImplicitCurveModel(f, seed_pt, bool(spec.get("ccw", True)))


def _load_json(source: str):
    text = source.strip()
    if text.startswith(("{", "[")):
        return json.loads(text)
    with open(source) as fh:
        return json.load(fh)
