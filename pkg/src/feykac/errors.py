"""Exception types shared across the toolkit."""


class FeykacError(Exception):
    """Base class for all toolkit errors."""


class CatalogError(FeykacError, KeyError):
    """Unknown catalog entry or malformed catalog spec string."""


class ParameterError(FeykacError, ValueError):
    """A numeric or structural parameter violates an operation's contract."""


class DomainError(FeykacError, ValueError):
    """An argument lies outside the mathematical domain (e.g. t <= 0)."""


class DimensionGuardError(FeykacError, ValueError):
    """Tensor-quadrature dimension guard exceeded."""


class SmallTimeGuardError(FeykacError, ValueError):
    """The small-time representation was requested beyond its configured horizon."""


class IntegrandBoundError(FeykacError, RuntimeError):
    """A sampled path integrand violated its proven a-priori bound."""


class InstabilityError(FeykacError, RuntimeError):
    """Diagnostic: the finite-difference solution grew beyond its decay bound."""
