"""Exception hierarchy shared by all modules."""


class RadialPlapError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(RadialPlapError, ValueError):
    """A numeric argument lies outside its admissible range."""


class PreconditionError(RadialPlapError, ValueError):
    """An operation was called on data that violates its stated precondition."""


class DerivativeUnavailable(RadialPlapError):
    """An opaque function carries no derivative information."""


class NonIntegrable(RadialPlapError):
    """A required integral diverges."""


class InverseUndefined(RadialPlapError):
    """The primitive of the source term is not monotone, so it has no inverse."""


class WeightInadmissible(RadialPlapError):
    """A weight violates the integrability conditions it must satisfy."""


class WitnessUnavailable(RadialPlapError):
    """No symbolic equality witness can be built for an opaque weight."""


class ConstructionRejected(RadialPlapError):
    """A counterexample construction fails one of its sign or size conditions."""


class DegenerateCoefficient(RadialPlapError):
    """The leading coefficient of the ODE vanishes at an interior point."""
