"""Exception types shared across the package."""

from __future__ import annotations


class CopyforgeError(Exception):
    """Base class for all package errors."""


class ParseFailure(CopyforgeError):
    """Raw model output could not be parsed into the expected copy structure."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ProviderError(CopyforgeError):
    """Base class for completion-provider failures."""


class ProviderTimeout(ProviderError):
    """Provider did not answer within the configured attempts."""


class ProviderRejected(ProviderError):
    """Provider answered with a non-success status."""

    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"provider rejected request with status {status}: {detail}")
        self.status = status


class TranscriptExhausted(ProviderError):
    """Mock transcript has no entry left that matches the request."""


class TranscriptMismatch(ProviderError):
    """Strict mock transcript's next entry does not match the request."""


class JudgeFormatError(CopyforgeError):
    """Judge response contains no extractable answer block."""


class JudgeUnavailable(ProviderError):
    """The judge's underlying provider failed after retries."""


class UnknownReasonCode(CopyforgeError):
    """A feedback reason code is not registered in the taxonomy."""

    def __init__(self, code: str):
        super().__init__(f"reason code not registered in taxonomy: {code!r}")
        self.code = code


class SequenceViolation(CopyforgeError):
    """An event append would violate the per-copy lineage state machine."""


class StorageFailure(CopyforgeError):
    """The event log could not be durably written or read."""


class NotFound(CopyforgeError):
    """Requested copy or job does not exist."""


class EmptyInput(CopyforgeError):
    """An aggregate was requested over an empty collection."""


class InvalidScenario(CopyforgeError):
    """A bandit simulation scenario fails its preconditions."""
