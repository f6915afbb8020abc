"""Exception types shared across the library."""


class SpideroptError(Exception):
    """Base class for library errors."""


class ConfigError(SpideroptError, ValueError):
    """Invalid or inconsistent solver/experiment configuration."""


class EpochViolationError(SpideroptError, RuntimeError):
    """spider_step called when a mod-q refresh is due."""


class DomainError(SpideroptError, ValueError):
    """Input outside the operation's domain (e.g. boundary point for entropy kernel)."""


class UnsupportedCombinationError(SpideroptError, ValueError):
    """A (kernel, regularizer) pair with no supported update rule."""


class DatasetParseError(SpideroptError, ValueError):
    """Malformed data file; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class SolverAbort(SpideroptError, RuntimeError):
    """Solver hit a non-finite iterate; carries the iteration index."""

    def __init__(self, message, k):
        super().__init__(f"{message} (iteration k={k})")
        self.k = k
