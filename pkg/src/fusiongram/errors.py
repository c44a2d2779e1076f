"""Exception hierarchy shared by every module of the package."""


class FusionError(Exception):
    """Base class for all errors raised by fusiongram."""


class AllZero(FusionError):
    """A spanning set has numerical rank zero."""


class NotHermitian(FusionError):
    pass


class DimensionMismatch(FusionError):
    pass


class SpaceMismatch(FusionError):
    """A direct-sum vector was applied to an operator on a different space."""


class NotAFrame(FusionError):
    """The family has lower frame bound zero (it does not span the ambient space)."""


class LocalBasisMismatch(FusionError):
    pass


class HypothesisViolated(FusionError):
    """A precondition of a theorem-level routine does not hold for the input."""


class NotDual(HypothesisViolated):
    pass


class BadExponent(FusionError):
    pass


class PurbViolated(FusionError):
    """Supplied perturbation constants fail the perturbation inequality on a probe."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class DivergenceDetected(FusionError):
    def __init__(self, msg, contraction):
        super().__init__(msg)
        self.contraction = contraction


class GenerationFailed(FusionError):
    pass


class ParseError(FusionError):
    """Malformed interchange document; carries 1-based line and column."""

    def __init__(self, reason, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.reason = reason
        self.line = line
        self.column = column
