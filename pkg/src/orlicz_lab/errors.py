"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the map being evaluated."""


class UnboundedInverseError(ValueError):
    """A generalized inverse was requested for a value the function never reaches."""


class PreconditionError(ValueError):
    """A documented precondition failed a numerical check."""


class InvalidInputError(ValueError):
    """Malformed or non-finite input."""


class OracleScopeError(ValueError):
    """An exhaustive oracle was asked to run on an instance larger than its cap."""


class ConfigError(InvalidInputError):
    """A configuration file failed to parse or names an unknown key."""
