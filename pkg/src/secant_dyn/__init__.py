"""Secant-map dynamics near multiple roots: polynomials, orbits, focal points, basins."""

from .basin import BasinGrid, ParityReport, Window, parity_experiment, render_basin, write_image
from .focal import (CurveSpec, Divergent, FocalKind, FocalPoint, LandingMap, Schedule, SingularCurvature,
                    curvature_to_landing, focal_points, landing_to_curvature, mixed_focal_landing,
                    numeric_curve_limit)
from .kernels import BACKEND
from .polycore import Polynomial, PolynomialError, RootSpec, parse_polynomial
from .secmap import BASIN_LIMITS, Limits, OrbitResult, PlanePoint, Status, iterate_orbit, secant_step

__version__ = "0.1.0"
