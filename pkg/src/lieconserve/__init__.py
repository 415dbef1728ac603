"""Symbolic and numeric tools for first-order evolution equations.

Classifies equations u_t + f(t, x, u, u_x) = 0 by self- and
quasi-self-adjointness, checks Lie point symmetry generators against the
determining equations, builds the associated conserved vectors, and
certifies conservation laws both symbolically and along exact
characteristics solutions.
"""

from . import expr
from .adjointness import (AdjointnessVerdict, InconclusiveClassification,
                          NOT_QUASI_SELF_ADJOINT, QUASI_SELF_ADJOINT,
                          SELF_ADJOINT, SubstitutionReport, classify,
                          verify_substitution)
from .characteristics import (CharacteristicSolution, CharacteristicsError,
                              ConservationReport, InitialProfile,
                              conserved_integral, gaussian_profile,
                              polynomial_profile, shock_time, sine_profile,
                              spline_bump_profile, verify_law)
from .conservation import (ConservedVector, DivergenceReport,
                           NotSelfAdjointError, build_vector_general,
                           build_vector_self, burgers_claw_catalog,
                           divergence_residual)
from .jet_calculus import (EvolutionSpec, SpecError, UnsupportedDepthError,
                           adjoint_of, bind_adjoint_field,
                           on_solution_reduce, total_derivative,
                           variational_derivative)
from .symmetry import (Generator, burgers_catalog,
                       determining_residual_generic,
                       determining_residual_pair, prolongation_residual,
                       scale_generator)

__version__ = "0.1.0"

__all__ = [
    "expr", "__version__",
    "AdjointnessVerdict", "InconclusiveClassification",
    "NOT_QUASI_SELF_ADJOINT", "QUASI_SELF_ADJOINT", "SELF_ADJOINT",
    "SubstitutionReport", "classify", "verify_substitution",
    "CharacteristicSolution", "CharacteristicsError", "ConservationReport",
    "InitialProfile", "conserved_integral", "gaussian_profile",
    "polynomial_profile", "shock_time", "sine_profile",
    "spline_bump_profile", "verify_law",
    "ConservedVector", "DivergenceReport", "NotSelfAdjointError",
    "build_vector_general", "build_vector_self", "burgers_claw_catalog",
    "divergence_residual",
    "EvolutionSpec", "SpecError", "UnsupportedDepthError", "adjoint_of",
    "bind_adjoint_field", "on_solution_reduce", "total_derivative",
    "variational_derivative",
    "Generator", "burgers_catalog", "determining_residual_generic",
    "determining_residual_pair", "prolongation_residual", "scale_generator",
]
