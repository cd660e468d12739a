"""Angular billiards, Birkhoff billiards and the polar duality between them."""

from .algebraic import (BivariatePoly, CurveTrace, HomogeneousPoly3, ImplicitCurveModel,
                        SpecialPoint, H_operator, find_real_flexes_and_singular, hessian3,
                        homogenize, trace_curve)
from .angular import AngularState, StepDiagnostics, angular_map, orbit, step_geometric, step_polar
from .birkhoff import BilliardLineState, BilliardTable, IntegralPoly, billiard_orbit, birkhoff_map
from .curves import (SupportCurve, load_curve, make_circle, make_ellipse, make_offset_circle,
                     make_trig_poly, support_from_implicit)
from .duality import dualize_integral, dualize_orbit, orbit_correspondence
from .errors import BilliardError, OrbitError
from .geometry import OrientedLine, PlanePoint, dual_of_line, dual_of_point
from .integrability import Certificate, IntegralData, certify

__version__ = "0.1.0"

__all__ = [
    "AngularState", "BilliardError", "BilliardLineState", "BilliardTable", "BivariatePoly",
    "Certificate", "CurveTrace", "H_operator", "HomogeneousPoly3", "ImplicitCurveModel",
    "IntegralData", "IntegralPoly", "OrbitError", "OrientedLine", "PlanePoint", "SpecialPoint",
    "StepDiagnostics", "SupportCurve", "angular_map", "billiard_orbit", "birkhoff_map",
    "certify", "dual_of_line", "dual_of_point", "dualize_integral", "dualize_orbit",
    "find_real_flexes_and_singular", "hessian3", "homogenize", "load_curve", "make_circle",
    "make_ellipse", "make_offset_circle", "make_trig_poly", "orbit", "orbit_correspondence",
    "step_geometric", "step_polar", "support_from_implicit", "trace_curve",
]
