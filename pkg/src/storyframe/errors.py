"""Exception types shared across the package."""

from __future__ import annotations


class StoryFrameError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# Canonical JSON parsing


class MalformedJson(StoryFrameError):
    """The input is not well-formed JSON at all."""


class FrameParseError(StoryFrameError):
    """The document is valid JSON but violates the frame schema.

    Carries every violation found, each with a JSON path, so callers can
    report all problems at once instead of fixing them one by one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.path}: {v.reason}" for v in self.violations[:8])
        more = "" if len(self.violations) <= 8 else f" (+{len(self.violations) - 8} more)"
        super().__init__(f"{len(self.violations)} violation(s): {lines}{more}")


# ---------------------------------------------------------------------------
# Frame building


class InvalidAttribute(StoryFrameError):
    pass


class UnknownId(StoryFrameError):
    def __init__(self, ref_id: str):
        self.ref_id = ref_id
        super().__init__(f"unknown id: {ref_id}")


class NotAttached(StoryFrameError):
    def __init__(self, entity_id: str, event_id: str):
        self.entity_id = entity_id
        self.event_id = event_id
        super().__init__(f"{entity_id} is not a participant of {event_id}")


class SelfRelationship(StoryFrameError):
    pass


class CycleDetected(StoryFrameError):
    pass


class BranchDetected(StoryFrameError):
    pass


class ValidationFailed(StoryFrameError):
    """A commit or pipeline result failed structural validation."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


# ---------------------------------------------------------------------------
# Prompting and LLM pipeline


class EmptySection(StoryFrameError):
    pass


class TemplateError(StoryFrameError):
    pass


class RepairExhausted(StoryFrameError):
    def __init__(self, schema_id: str, attempts: int):
        self.schema_id = schema_id
        self.attempts = attempts
        super().__init__(f"could not repair {schema_id!r} output after {attempts} attempt(s)")


class LlmUnavailable(StoryFrameError):
    pass


class EmptyGeneration(StoryFrameError):
    pass


# ---------------------------------------------------------------------------
# LLM client


class LlmClientError(StoryFrameError):
    pass


class Timeout(LlmClientError):
    pass


class RateLimited(LlmClientError):
    pass


class HttpError(LlmClientError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"HTTP {status}" + (f": {detail}" if detail else ""))


class InvalidResponse(LlmClientError):
    pass


# ---------------------------------------------------------------------------
# Metrics and dataset


class FeatureDisabled(StoryFrameError):
    pass


class EmptyCorpus(StoryFrameError):
    pass


class InvalidPair(StoryFrameError):
    pass


# ---------------------------------------------------------------------------
# Persistence


class CorruptSession(StoryFrameError):
    pass
