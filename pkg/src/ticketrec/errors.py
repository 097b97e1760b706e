"""Exception hierarchy shared across the package."""


class TicketrecError(Exception):
    """Base class for all errors raised by this package."""


class DataError(TicketrecError):
    """Invalid or inconsistent input data (bad ticket file, bad CSV, unknown id)."""


class ConfigError(TicketrecError):
    """Invalid configuration: bad redaction pattern, bad technique parameters."""


class ProviderError(TicketrecError):
    """An external embedding provider failed after exhausting retries."""

    def __init__(self, message: str, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable


class ContractViolation(TicketrecError):
    """A provider returned data that does not match its declared contract."""


class EvaluationError(TicketrecError):
    """A technique failed while being evaluated; the message names the query."""

