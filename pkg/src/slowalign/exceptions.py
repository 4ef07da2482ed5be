"""Exception types shared across the engine."""


class SlowAlignError(Exception):
    """Base class for engine errors."""


class NotPositiveDefinite(SlowAlignError):
    """Cholesky factorization failed even after jitter escalation."""


class DegenerateSnapshot(SlowAlignError):
    """Feature snapshot has no variance, similarity is undefined."""


class BadFormat(SlowAlignError):
    """A binary file does not conform to its declared layout."""
