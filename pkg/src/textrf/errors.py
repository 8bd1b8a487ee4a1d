"""Exception types shared across the toolkit."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class DomainError(ValueError):
    """A mathematically valid-looking input falls outside a function's domain
    (e.g. an arcsine argument beyond [-1, 1])."""


class CacheFormatError(ValueError):
    """An embedding-cache file fails schema validation; the message names the
    offending label and vector index where applicable."""
