"""Exception and warning types shared across the package."""


class ContractionLabError(ValueError):
    """Base class for all input and numerical errors raised here."""


class NegativeEntry(ContractionLabError):
    pass


class RowSumViolation(ContractionLabError):
    pass


class NonSquare(ContractionLabError):
    pass


class NonFinite(ContractionLabError):
    pass


class NonUniqueStationary(ContractionLabError):
    pass


class ZeroPushedMass(ContractionLabError):
    """A state receives zero mass under mu K, so densities are undefined."""


class ZeroMass(ContractionLabError):
    """A reference measure has a zero-mass state where positivity is needed."""


class DisconnectedGraph(ContractionLabError):
    pass


class BracketFailure(ContractionLabError):
    """A one-dimensional minimisation found no interior minimum."""


class AbsoluteContinuityViolation(ContractionLabError):
    pass


class NotStationary(ContractionLabError):
    pass


class NotDoublyStochastic(ContractionLabError):
    pass


class LambdaOutOfRange(ContractionLabError):
    pass


class DeltaTooSmall(ContractionLabError):
    pass


class NotReached(ContractionLabError):
    def __init__(self, max_t):
        super().__init__(f"mixing threshold not reached within {max_t} steps")
        self.max_t = max_t


class PostconditionViolation(AssertionError):
    """A bound came out below the exact quantity it is meant to dominate."""


class DegenerateInfimum(UserWarning):
    """The infimum defining rho is only approached as t -> infinity (f constant)."""


class DegenerateDivergence(UserWarning):
    """D(nu || mu) = 0, so the KL bound degenerates to 0."""
