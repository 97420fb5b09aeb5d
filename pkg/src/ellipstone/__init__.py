"""Exact and numerical tools around harmonic functions on ellipsoids."""

__version__ = "0.1.0"

from .errors import EllipstoneError, NumericalFailure  # noqa: E402
from .geometry import Ellipsoid, confocal, elliptic_lambda, focal_ellipsoid, parse_ellipsoid  # noqa: E402
from .polyalg import MultiPoly, parse_poly  # noqa: E402
from .dirichlet import solve_dirichlet, verify_solution  # noqa: E402
from .moments import ball_mean, ellipsoid_mean, maclaurin_check  # noqa: E402

__all__ = [
    "EllipstoneError",
    "NumericalFailure",
    "Ellipsoid",
    "confocal",
    "elliptic_lambda",
    "focal_ellipsoid",
    "parse_ellipsoid",
    "MultiPoly",
    "parse_poly",
    "solve_dirichlet",
    "verify_solution",
    "ball_mean",
    "ellipsoid_mean",
    "maclaurin_check",
]
