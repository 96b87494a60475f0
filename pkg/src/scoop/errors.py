"""Exception hierarchy shared by all modules."""


class ScoopError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ScoopError, ValueError):
    """An argument is out of range or inconsistent with another argument."""


class GenerationError(ScoopError):
    """A random instance could not be produced within the retry budget."""


class ParseError(ScoopError, ValueError):
    """Serialized input is malformed or violates an instance invariant."""


class CapacityError(ScoopError):
    """The requested computation exceeds a configured size cap."""


class ContractError(ScoopError):
    """A precondition of an algorithm is violated or a result is undefined."""
