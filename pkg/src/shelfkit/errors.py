"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(Exception):
    """Bad or incomplete run configuration (CLI exit code 1)."""


class DataError(Exception):
    """Malformed input data or broken referential integrity (CLI exit code 2)."""


class LlmResponseError(DataError):
    """An LLM response that could not be parsed into descriptors.

    Keeps the raw response text around so batch jobs can log it.
    """

    def __init__(self, message: str, raw: str) -> None:
        super().__init__(message)
        self.raw = raw


class ExtractionError(Exception):
    """Extraction failed for one item after exhausting retries."""

    def __init__(self, item_id: str, reason: str) -> None:
        super().__init__(f"extraction failed for item {item_id!r}: {reason}")
        self.item_id = item_id
        self.reason = reason
