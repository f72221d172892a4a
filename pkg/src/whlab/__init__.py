"""Wiener-Hopf factorisation laboratory for lattice random walks."""

from .errors import (
    DomainError,
    EvaluationError,
    FactorisationError,
    InvalidLawError,
    NotAScaledFactorError,
    ParameterError,
    PrecisionError,
    PreconditionError,
    WHLabError,
)
from .lattice import (
    DefectiveLaw,
    StepLaw,
    SubordinatorExponent,
    char_exponent,
    char_function,
    embed_compound_poisson,
    evaluate_exponent,
    minimal_span,
)
from .renewal import RenewalSequence, renewal_limit_check, renewal_sequence, subordinator_potential
from .spectral import (
    Factorisation,
    LaurentPolynomial,
    RootSplit,
    assemble_factors,
    find_and_classify_roots,
    spectral_factorise,
    to_polynomial,
)
from .spitzer import (
    convolution_powers,
    spitzer_ascending_factor,
    spitzer_descending_factor,
)

__version__ = "0.1.0"
