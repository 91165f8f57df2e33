"""Fuzzy finite element eigenvalue studies for a bare equilateral-triangle reactor.

One-group diffusion on linear triangular elements, with diffusion and
absorption coefficients given as triangular fuzzy numbers and propagated
through alpha-cuts.
"""

from .eig import EigenResult, NotConverged, dense_eig_all, smallest_eig
from .fem import Coefficients, apply_dirichlet, assemble, solve_fixed_source
from .fuzzy import FuzzyResult, TriangularFuzzyNumber, alpha_cut, from_samples, to_polyline
from .interval import Interval, mod_arith, std_arith
from .mesh import Mesh, base_fan6, build_family, refine2, refine4
from .uq import (
    StudyConfig,
    UncertainCoefficients,
    convergence_study,
    crisp_lambda,
    fuzzy_lambda,
    interval_lambda,
)

__version__ = "0.1.0"

__all__ = [
    "Coefficients",
    "EigenResult",
    "FuzzyResult",
    "Interval",
    "Mesh",
    "NotConverged",
    "StudyConfig",
    "TriangularFuzzyNumber",
    "UncertainCoefficients",
    "alpha_cut",
    "apply_dirichlet",
    "assemble",
    "base_fan6",
    "build_family",
    "convergence_study",
    "crisp_lambda",
    "dense_eig_all",
    "from_samples",
    "fuzzy_lambda",
    "interval_lambda",
    "mod_arith",
    "refine2",
    "refine4",
    "smallest_eig",
    "solve_fixed_source",
    "std_arith",
    "to_polyline",
]
