"""Exception hierarchy shared by every whlab module."""


class WHLabError(Exception):
    """Base class for all whlab errors."""


class InvalidLawError(WHLabError, ValueError):
    """A probability law violates its type invariants."""


class DomainError(WHLabError, ValueError):
    """A transform was evaluated outside its admissible domain."""


class ParameterError(WHLabError, ValueError):
    """A numerical parameter (killing, horizon, grid size...) is out of range."""


class FactorisationError(WHLabError, ArithmeticError):
    """The spectral split could not be carried out consistently."""


class NotAScaledFactorError(WHLabError, ValueError):
    """A factor pair is not a positive rescaling of a probabilistic pair."""


class PreconditionError(WHLabError, ValueError):
    """A lemma check was requested outside the regime where it applies."""


class PrecisionError(WHLabError, ArithmeticError):
    """A truncated sequence is too short for the requested accuracy."""


class EvaluationError(WHLabError, ArithmeticError):
    """A ratio of factors hit a zero denominator on the evaluation grid."""
