"""Model-based story scoring.

A story is scored against its frame on seven fixed dimensions, each an
integer 1 to 5, by ``n_runs`` independent judge calls; the reported value per
dimension is the mean of the raw runs rounded to two decimals. A reply that
is not a clean seven-key integer scorecard is sent back for repair. With
several judge backends configured, runs rotate through them round-robin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .canonical import to_canonical_json
from .errors import LlmClientError, LlmUnavailable
from .llm import ChatClient, user_request
from .model import StoryFrame
from .pipeline import DEFAULT_MAX_REPAIRS, TranscriptEntry, _ask_json
from .prompting import build_tidd_prompt, render_prompt

DIMENSIONS = (
    "functionality",
    "technicality",
    "innovativeness",
    "readability",
    "thoughtfulness",
    "emotional_authenticity",
    "clarity_of_perspective",
)

DEFAULT_RUNS = 3


@dataclass(frozen=True)
class EvaluationReport:
    dimensions: dict[str, float]
    raw_runs: tuple[dict[str, int], ...]
    n_runs: int
    suggestion: str | None = None

    def mean_score(self) -> float:
        return sum(self.dimensions.values()) / len(self.dimensions)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimensions": dict(self.dimensions),
            "raw_runs": [dict(run) for run in self.raw_runs],
            "n_runs": self.n_runs,
            "suggestion": self.suggestion,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "EvaluationReport":
        return cls(
            dimensions={k: float(v) for k, v in doc["dimensions"].items()},
            raw_runs=tuple({k: int(v) for k, v in run.items()} for run in doc["raw_runs"]),
            n_runs=int(doc["n_runs"]),
            suggestion=doc.get("suggestion"),
        )


def judge_story(
    story: str,
    frame: StoryFrame,
    clients: ChatClient | Sequence[ChatClient],
    n_runs: int = DEFAULT_RUNS,
    max_repairs: int = DEFAULT_MAX_REPAIRS,
    request_suggestion: bool = True,
    transcript: list[TranscriptEntry] | None = None,
) -> EvaluationReport:
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    pool: list[ChatClient] = list(clients) if isinstance(clients, (list, tuple)) else [clients]
    if not pool:
        raise ValueError("at least one judge client is required")
    frame_json = to_canonical_json(frame).decode("utf-8")
    prompt = render_prompt(build_tidd_prompt("judge_rubric.tidd", frame=frame_json, story=story))
    log: list[TranscriptEntry] = transcript if transcript is not None else []

    raw_runs: list[dict[str, int]] = []
    for i in range(n_runs):
        client = pool[i % len(pool)]
        payload = _ask_json(client, prompt, _validate_scores, max_repairs, log, f"judge[{i}]")
        raw_runs.append({dim: int(payload[dim]) for dim in DIMENSIONS})

    dimensions = {
        dim: round(sum(run[dim] for run in raw_runs) / n_runs, 2) for dim in DIMENSIONS
    }
    suggestion: str | None = None
    if request_suggestion:
        suggestion_prompt = render_prompt(build_tidd_prompt("suggestion.tidd", frame=frame_json, story=story))
        try:
            reply = pool[0].complete(user_request(suggestion_prompt))
        except LlmClientError as exc:
            raise LlmUnavailable(str(exc)) from exc
        suggestion = reply.content.strip()
        log.append(
            TranscriptEntry(step="suggestion", kind="request", prompt=suggestion_prompt, response=reply.content)
        )
    return EvaluationReport(
        dimensions=dimensions,
        raw_runs=tuple(raw_runs),
        n_runs=n_runs,
        suggestion=suggestion,
    )


def _validate_scores(payload: Any) -> list[str]:
    if not isinstance(payload, dict):
        return [f"$: expected object, got {type(payload).__name__}"]
    problems = []
    for dim in DIMENSIONS:
        if dim not in payload:
            problems.append(f"$.{dim}: missing dimension {dim!r}")
            continue
        value = payload[dim]
        if isinstance(value, bool) or not isinstance(value, int):
            problems.append(f"$.{dim}: score must be an integer, got {value!r}")
        elif not 1 <= value <= 5:
            problems.append(f"$.{dim}: score must be between 1 and 5, got {value}")
    for key in payload:
        if key not in DIMENSIONS:
            problems.append(f"$.{key}: unexpected key {key!r}")
    return problems
