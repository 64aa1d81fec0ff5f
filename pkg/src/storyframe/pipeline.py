"""Story-to-frame parsing and frame-to-story generation.

Parsing strategies:

* ``zero_shot``: one plain request for the whole frame.
* ``tidd_ec``: one structured-template request for the whole frame.
* ``tidd_ec_cot``: the same, with an explicit think-first instruction.
* ``tidd_ec_chain``: four requests in fixed order (entities, events,
  outline, relationships), each carrying every prior step's result.

Every reply goes through the same repair loop: pull the first JSON value out
of the text, validate it, and on failure re-prompt with the exact problems,
up to ``max_repairs`` times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from .canonical import document_to_frame, to_canonical_json, validate_partial_document
from .errors import (
    EmptyGeneration,
    EmptySection,
    FrameParseError,
    LlmClientError,
    LlmUnavailable,
    MalformedJson,
    RepairExhausted,
)
from .llm import ChatClient, user_request
from .model import UNITS, StoryFrame
from .prompting import build_text_prompt, build_tidd_prompt, render_prompt


class Strategy(str, Enum):
    ZERO_SHOT = "zero_shot"
    TIDD_EC = "tidd_ec"
    TIDD_EC_COT = "tidd_ec_cot"
    TIDD_EC_CHAIN = "tidd_ec_chain"


CHAIN_STEPS = ("entities", "events", "outline", "relationships")

_STEP_TEMPLATES = {
    "entities": "parse_entities.tidd",
    "events": "parse_events.tidd",
    "outline": "parse_outline.tidd",
    "relationships": "parse_relationships.tidd",
}

_COT_INSTRUCTION = (
    "Think the story through step by step in plain text first, then give the final JSON object by itself."
)

DEFAULT_MAX_REPAIRS = 3


@dataclass(frozen=True)
class TranscriptEntry:
    step: str
    kind: str  # "request" | "repair"
    prompt: str
    response: str


@dataclass
class ChainState:
    story_text: str
    step_results: dict[str, Any] = field(default_factory=dict)
    transcript: list[TranscriptEntry] = field(default_factory=list)


@dataclass(frozen=True)
class GenerationResult:
    story: str
    prompt: str
    transcript: tuple[TranscriptEntry, ...]


def extract_json(text: str) -> Any:
    """First JSON object or array in the text; tolerates fences and prose."""
    stripped = text.strip()
    if stripped.startswith("```") and stripped.endswith("```"):
        first_newline = stripped.find("\n")
        if first_newline != -1:
            stripped = stripped[first_newline + 1 : -3].strip()
    decoder = json.JSONDecoder()
    for i, ch in enumerate(stripped):
        if ch in "{[":
            try:
                value, _ = decoder.raw_decode(stripped, i)
                return value
            except json.JSONDecodeError:
                continue
    raise MalformedJson("no JSON value found in the reply")


def run_parse_chain(
    story: str,
    client: ChatClient,
    strategy: Strategy | str = Strategy.TIDD_EC_CHAIN,
    max_repairs: int = DEFAULT_MAX_REPAIRS,
) -> tuple[StoryFrame, ChainState]:
    """Parse a story into a validated frame using the given strategy."""
    strategy = Strategy(strategy)
    if not story.strip():
        raise EmptySection("story text is empty")
    state = ChainState(story_text=story)
    if strategy is Strategy.TIDD_EC_CHAIN:
        accumulated: dict[str, Any] = {}
        for step in CHAIN_STEPS:
            values = {"story": story}
            if step != "entities":
                values["prior"] = json.dumps(accumulated, indent=2, ensure_ascii=False)
            prompt = render_prompt(build_tidd_prompt(_STEP_TEMPLATES[step], **values))
            payload = _ask_json(client, prompt, _step_validator(step, accumulated), max_repairs, state.transcript, step)
            accumulated[step] = payload[step]
        doc = {unit: accumulated[unit] for unit in UNITS}
        state.step_results = {step: accumulated[step] for step in CHAIN_STEPS}
        return document_to_frame(doc), state

    if strategy is Strategy.ZERO_SHOT:
        prompt = build_text_prompt("zero_shot.txt", story=story)
    else:
        tidd = build_tidd_prompt("parse_full.tidd", story=story)
        if strategy is Strategy.TIDD_EC_COT:
            tidd = tidd.with_instruction(_COT_INSTRUCTION)
        prompt = render_prompt(tidd)
    payload = _ask_json(client, prompt, _full_validator, max_repairs, state.transcript, "frame")
    state.step_results = {"frame": payload}
    return document_to_frame(payload), state


def generate_story(client: ChatClient, frame: StoryFrame, **request_args: Any) -> GenerationResult:
    frame_json = to_canonical_json(frame).decode("utf-8")
    prompt = render_prompt(build_tidd_prompt("generate_story.tidd", frame=frame_json))
    return _generate(client, prompt, "generate", request_args)


def regenerate_story(
    client: ChatClient,
    frame: StoryFrame,
    previous_story: str,
    suggestion: str = "",
    **request_args: Any,
) -> GenerationResult:
    frame_json = to_canonical_json(frame).decode("utf-8")
    base = render_prompt(build_tidd_prompt("generate_story.tidd", frame=frame_json))
    note = f"\n\nRevision note:\n{suggestion.strip()}" if suggestion.strip() else ""
    revision = build_text_prompt("revision.txt", previous_story=previous_story, note=note)
    return _generate(client, base + "\n" + revision, "regenerate", request_args)


def _generate(client: ChatClient, prompt: str, step: str, request_args: dict[str, Any]) -> GenerationResult:
    content = _complete(client, prompt, request_args)
    story = content.strip()
    if not story:
        raise EmptyGeneration("the model returned an empty story")
    entry = TranscriptEntry(step=step, kind="request", prompt=prompt, response=content)
    return GenerationResult(story=story, prompt=prompt, transcript=(entry,))


# ---------------------------------------------------------------------------
# Repair loop


def _complete(client: ChatClient, prompt: str, request_args: dict[str, Any] | None = None) -> str:
    try:
        return client.complete(user_request(prompt, **(request_args or {}))).content
    except LlmClientError as exc:
        raise LlmUnavailable(str(exc)) from exc


def _ask_json(
    client: ChatClient,
    prompt: str,
    validate: Callable[[Any], list[str]],
    max_repairs: int,
    transcript: list[TranscriptEntry],
    step: str,
) -> Any:
    response = _complete(client, prompt)
    transcript.append(TranscriptEntry(step=step, kind="request", prompt=prompt, response=response))
    repairs = 0
    while True:
        problems: list[str]
        try:
            payload = extract_json(response)
        except MalformedJson as exc:
            payload = None
            problems = [str(exc)]
        else:
            problems = validate(payload)
        if not problems:
            return payload
        if repairs >= max_repairs:
            raise RepairExhausted(step, repairs + 1)
        repairs += 1
        repair = _repair_prompt(prompt, problems)
        response = _complete(client, repair)
        transcript.append(TranscriptEntry(step=step, kind="repair", prompt=repair, response=response))


def _repair_prompt(original: str, problems: list[str]) -> str:
    listed = "\n".join(f"- {p}" for p in problems[:12])
    return (
        "The previous reply could not be used.\n\n"
        f"Problems:\n{listed}\n\n"
        "Answer the original request again, fixing every problem. "
        "Reply with only the corrected JSON object.\n\n"
        f"Original request:\n{original}"
    )


def _step_validator(step: str, accumulated: dict[str, Any]) -> Callable[[Any], list[str]]:
    def validate(payload: Any) -> list[str]:
        if not isinstance(payload, dict):
            return [f"$: expected object, got {type(payload).__name__}"]
        if step not in payload:
            return [f"$.{step}: missing key {step!r}"]
        extra = [key for key in payload if key != step]
        if extra:
            return [f"$.{key}: unexpected key {key!r}" for key in extra]
        trial = dict(accumulated)
        trial[step] = payload[step]
        return [f"{v.path}: {v.reason}" for v in validate_partial_document(trial)]

    return validate


def _full_validator(payload: Any) -> list[str]:
    try:
        document_to_frame(payload)
    except FrameParseError as exc:
        return [f"{v.path}: {v.reason}" for v in exc.violations]
    return []
