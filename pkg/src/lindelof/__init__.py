"""Analytic continuation and asymptotics of sum_n phi(n) (-z)^n via the Lindelof integral."""

from .coeff_functions import (Algebraic, CoefficientFunction, Essential, Pole, PoleLattice,
                              evaluate, from_json, gamma_plus_one_eq_minus_one_roots,
                              make_builtin, parse_phi)
from .differences import (DifferenceRequest, differences_asymptotic, differences_exact,
                          euler_transform_check, madsen_pmf, madsen_pmf_asymptotic)
from .errors import (CatalogIncompleteError, ConvergenceError, DomainError, HypothesisError,
                     LindelofError, PoleError, PrecisionCapError, SectorError,
                     UnanchoredExactnessError, UnsupportedParameterError)
from .expansions import (Expansion, ExpansionTerm, algebraic_expansion, evaluate_expansion,
                         polar_expansion, residue_terms)
from .holonomy import ExponentSet, Verdict, classify
from .integral import Continuation, QuadratureConfig, continue_gf, direct_sum
from .numerics import DEFAULT, PrecisionContext
from .saddle_boundary import (approx_infinity, approx_minus_one, laplace_constants,
                              saddle_constants, saddle_expansion, two_saddle_constants)

__version__ = "0.1.0"

__all__ = [
    "Algebraic", "CatalogIncompleteError", "CoefficientFunction", "Continuation",
    "ConvergenceError", "DEFAULT", "DifferenceRequest", "DomainError", "Essential",
    "Expansion", "ExpansionTerm", "ExponentSet", "HypothesisError", "LindelofError", "Pole",
    "PoleError", "PoleLattice", "PrecisionCapError", "PrecisionContext", "QuadratureConfig",
    "SectorError", "UnanchoredExactnessError", "UnsupportedParameterError", "Verdict",
    "algebraic_expansion", "approx_infinity", "approx_minus_one", "classify", "continue_gf",
    "differences_asymptotic", "differences_exact", "direct_sum", "euler_transform_check",
    "evaluate", "evaluate_expansion", "from_json", "gamma_plus_one_eq_minus_one_roots",
    "laplace_constants", "madsen_pmf", "madsen_pmf_asymptotic", "make_builtin", "parse_phi",
    "polar_expansion", "residue_terms", "saddle_constants", "saddle_expansion",
    "two_saddle_constants",
]
