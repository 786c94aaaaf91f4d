"""Exception types shared across the library."""


class ConvoyError(Exception):
    """Base class for all library errors."""


class NonFiniteInput(ConvoyError):
    pass


class TooFewWaypoints(ConvoyError):
    pass


class NonMonotoneAbscissae(ConvoyError):
    pass


class OutOfDomain(ConvoyError):
    pass


class SteepHeading(ConvoyError):
    """Commanded heading too close to the local-frame Y axis; rotate the frame first."""


class DegenerateGeometry(ConvoyError):
    pass


class InvalidDt(ConvoyError):
    pass


class InvalidGains(ConvoyError):
    pass


class HeadingSingularity(ConvoyError):
    """cos(x3* + e3) too small for the control law to be well posed."""


class TanSingularity(ConvoyError):
    """cos(x3*) too small for the reference-heading tangent to be well posed."""


class InvalidWeights(ConvoyError):
    pass


class InvalidRegion(ConvoyError):
    pass


class ScenarioError(ConvoyError):
    """Malformed or inconsistent scenario definition."""


class PathExhausted(ConvoyError):
    """Leader reference ran off the end of the path and no replan arrived."""


class SingularityAbort(ConvoyError):
    """Control singularity persisted for several consecutive steps."""


class EmptyTrace(ConvoyError):
    pass
