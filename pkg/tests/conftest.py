"""Shared fixtures: frame factories and scripted chat backends."""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import pytest

from storyframe import FrameBuilder, MockChatClient, frame_to_document
from storyframe.judge import DIMENSIONS

DATA_DIR = Path(__file__).resolve().parent / "data"
GOLDEN_PATH = DATA_DIR / "picture_composition.json"
CORPUS_PATH = DATA_DIR / "corpus20.txt"

# Criteria covered by tests/test_acceptance.py, in report order.
ACCEPTANCE_CRITERIA = (
    "metric_oracles",
    "schema_graph_suite",
    "pipeline_determinism",
    "dataset_arithmetic",
    "strategy_harness",
    "judge_aggregation",
    "service_end_to_end",
)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion, printed after the run."""
    lines = []
    for name in ACCEPTANCE_CRITERIA:
        needle = f"test_acceptance.py::test_{name}"
        status = None
        for outcome in ("passed", "failed", "error"):
            for report in terminalreporter.stats.get(outcome, []):
                if needle in getattr(report, "nodeid", ""):
                    status = "PASS" if outcome == "passed" else "FAIL"
        if status is not None:
            lines.append(f"ACCEPTANCE {name}: {status}")
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)

# Phrases unique to each prompt template, used by responders to tell
# request kinds apart without peeking at library internals.
STEP_MARKERS = {
    "entities": "list every character or acting force",
    "events": "list the story's events",
    "outline": "Summarize the story as an outline",
    "relationships": "relate to and act on each other",
}
FULL_PARSE_MARKER = "holding a full story frame"
ZERO_SHOT_MARKER = "single JSON object with four parts"
GENERATE_MARKER = "Write a complete short story"
REVISION_MARKER = "Rewrite the story from the same frame."
JUDGE_MARKER = "Score the story below"
SUGGESTION_MARKER = "one concrete suggestion"


def extract_story(prompt: str) -> str:
    """Pull the story text back out of a rendered prompt."""
    tail = prompt[prompt.index("Story:\n") + len("Story:\n"):]
    marker = "\n\nAlready extracted:"
    if marker in tail:
        tail = tail[: tail.index(marker)]
    return tail.strip()


def build_small_frame():
    """Two entities, two chained events, one relationship. Always valid."""
    b = FrameBuilder()
    b.create_entity("Iris", "gardener", "coax the orchard back", ["patient", "stubborn"])
    b.create_entity("Tom", "neighbor", "repay an old favor", ["gruff"])
    e1 = b.create_event("spring dawn", "orchard", "Iris finds the old well dry.", "high")
    e2 = b.create_event("that evening", "fence line", "Tom offers his pump without being asked.", "medium")
    b.attach_entity("entity_1", e1)
    b.attach_entity("entity_1", e2)
    b.attach_entity("entity_2", e2)
    b.link_events(e1, e2)
    b.connect_relationship(["entity_2"], ["entity_1"], "gratitude", "helps", "medium", "distance thaws", e2)
    b.assign_stage(e1, "beginning")
    b.assign_stage(e2, "ending")
    b.set_outline("The Dry Well", "A dry well mends a fence.")
    return b.commit()


# One stage plan per event count; always monotone along the chain.
STAGE_PLANS = {
    1: ("beginning",),
    2: ("beginning", "ending"),
    3: ("beginning", "climax", "ending"),
    4: ("beginning", "middle", "climax", "ending"),
}


def make_varied_frame(k: int):
    """Deterministic valid frame whose shape varies with ``k``."""
    b = FrameBuilder()
    n_ent = 1 + k % 3
    n_ev = 1 + (k + 1) % 4
    for i in range(n_ent):
        b.create_entity(
            f"Person {k}.{i + 1}",
            f"figure {i + 1}",
            f"see task {i + 1} through",
            [f"trait{i + 1}", "steady"],
        )
    prev = None
    for j in range(n_ev):
        eid = b.create_event(
            f"day {j + 1}",
            f"place {j + 1}",
            f"Beat {j + 1} of tale {k}.",
            ("low", "medium", "high")[j % 3],
        )
        for i in range(n_ent):
            b.attach_entity(f"entity_{i + 1}", eid)
        if prev is not None:
            b.link_events(prev, eid)
        prev = eid
    if n_ent >= 2:
        b.connect_relationship(
            ["entity_1"], ["entity_2"], "warm", "helps", "medium", "steadily closer", "event_1"
        )
    else:
        b.connect_relationship(
            ["entity_1"], ["entity_1"], "resolute", "reflects", "low", "turns inward", "event_1"
        )
    for stage, j in zip(STAGE_PLANS[n_ev], range(n_ev)):
        b.assign_stage(f"event_{j + 1}", stage)
    b.set_outline(f"Tale {k}", f"A small tale numbered {k}.")
    return b.commit()


def chain_replies(doc: dict) -> list[str]:
    """Scripted replies for one parse chain run over ``doc``."""
    return [
        json.dumps({"entities": doc["entities"]}),
        json.dumps({"events": doc["events"]}),
        json.dumps({"outline": doc["outline"]}),
        json.dumps({"relationships": doc["relationships"]}),
    ]


def scorecard(value: int = 4, **overrides: int) -> dict[str, int]:
    scores = {dim: value for dim in DIMENSIONS}
    scores.update(overrides)
    return scores


def scorecard_json(value: int = 4, **overrides: int) -> str:
    return json.dumps(scorecard(value, **overrides))


class CorpusHarness:
    """Deterministic world model behind the mock backend for corpus runs.

    Every fixture story gets a fixed frame, a fixed generated retelling,
    and judge scores derived from a hash of the scored text.
    """

    def __init__(self) -> None:
        self.stories = [line for line in CORPUS_PATH.read_text(encoding="utf-8").splitlines() if line.strip()]
        self.frames = {}
        self.docs = {}
        for k, story in enumerate(self.stories, start=1):
            frame = make_varied_frame(k)
            self.frames[story] = frame
            self.docs[story] = frame_to_document(frame)

    def generated_for(self, k: int) -> str:
        return f"Retold tale {k}: {self.stories[k - 1]}"

    def scores_for(self, story: str) -> dict[str, int]:
        digest = hashlib.sha256(story.encode("utf-8")).digest()
        return {dim: 1 + digest[i] % 5 for i, dim in enumerate(DIMENSIONS)}

    def responder(self, request) -> str:
        prompt = request.messages[-1].content
        if JUDGE_MARKER in prompt:
            return json.dumps(self.scores_for(extract_story(prompt)))
        if SUGGESTION_MARKER in prompt:
            return "Tighten the middle."
        if GENERATE_MARKER in prompt or REVISION_MARKER in prompt:
            found = re.search(r'"title": "Tale (\d+)"', prompt)
            if not found:
                raise AssertionError("frame prompt without a recognizable title")
            return self.generated_for(int(found.group(1)))
        story = extract_story(prompt)
        doc = self.docs[story]
        for step, marker in STEP_MARKERS.items():
            if marker in prompt:
                return json.dumps({step: doc[step]})
        if FULL_PARSE_MARKER in prompt or ZERO_SHOT_MARKER in prompt:
            return json.dumps(doc)
        raise AssertionError(f"unrecognized prompt: {prompt[:80]!r}")

    def client(self) -> MockChatClient:
        return MockChatClient(responder=self.responder)


@pytest.fixture(scope="session")
def corpus_harness() -> CorpusHarness:
    return CorpusHarness()


@pytest.fixture
def small_frame():
    return build_small_frame()


@pytest.fixture
def small_doc(small_frame):
    return frame_to_document(small_frame)


@pytest.fixture
def golden_doc():
    return json.loads(GOLDEN_PATH.read_text(encoding="utf-8"))


@pytest.fixture
def golden_bytes():
    return GOLDEN_PATH.read_bytes()
