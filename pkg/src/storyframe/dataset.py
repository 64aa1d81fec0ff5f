"""Preference-pair dataset construction.

For each source story: parse it into a frame, generate a new story from that
frame, judge both stories, and keep the higher-scoring one as ``chosen`` with
the other as ``rejected`` (ties prefer the source story). Pairs stream to
JSONL in input order, failures are logged rather than fatal, and a manifest
records counts, settings, and distribution statistics. Ablation rewrites a
pair set with one frame unit stripped and the generation prompt rebuilt from
the reduced frame.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .canonical import document_to_bytes, from_canonical_json, strip_unit_document, to_canonical_json
from .errors import EmptyCorpus, InvalidPair, StoryFrameError
from .judge import judge_story
from .llm import ChatClient
from .metrics.textnorm import tokenize
from .pipeline import Strategy, generate_story, run_parse_chain
from .prompting import build_tidd_prompt, render_prompt

DEFAULT_SPLIT_RATIO = 0.9


@dataclass(frozen=True)
class PreferencePair:
    pair_id: str
    source_digest: str
    frame_json: str
    prompt: str
    chosen: str
    rejected: str
    chosen_scores: dict[str, float]
    rejected_scores: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "pair_id": self.pair_id,
            "source_digest": self.source_digest,
            "frame_json": self.frame_json,
            "prompt": self.prompt,
            "chosen": self.chosen,
            "rejected": self.rejected,
            "chosen_scores": dict(self.chosen_scores),
            "rejected_scores": dict(self.rejected_scores),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "PreferencePair":
        return cls(
            pair_id=doc["pair_id"],
            source_digest=doc["source_digest"],
            frame_json=doc["frame_json"],
            prompt=doc["prompt"],
            chosen=doc["chosen"],
            rejected=doc["rejected"],
            chosen_scores={k: float(v) for k, v in doc["chosen_scores"].items()},
            rejected_scores={k: float(v) for k, v in doc["rejected_scores"].items()},
        )


def ingest_corpus(path: str | Path, record_sep: str = "line") -> list[str]:
    """Read source stories from a text file, deduplicated, order preserved.

    ``record_sep`` is "line" (one story per line) or "blank" (stories are
    blocks separated by blank lines).
    """
    text = Path(path).read_text(encoding="utf-8")
    if record_sep == "line":
        records = [line.strip() for line in text.splitlines()]
    elif record_sep == "blank":
        records = [" ".join(block.split()) for block in text.split("\n\n")]
    else:
        raise ValueError(f"record_sep must be 'line' or 'blank', got {record_sep!r}")
    stories: list[str] = []
    seen: set[str] = set()
    for record in records:
        if not record:
            continue
        digest = hashlib.sha256(record.encode("utf-8")).hexdigest()
        if digest in seen:
            continue
        seen.add(digest)
        stories.append(record)
    if not stories:
        raise EmptyCorpus(f"no stories found in {path}")
    return stories


def build_pair(
    story: str,
    parse_client: ChatClient,
    gen_client: ChatClient,
    judge_clients: ChatClient | Sequence[ChatClient],
    strategy: Strategy | str = Strategy.TIDD_EC_CHAIN,
    n_judge_runs: int = 3,
    max_repairs: int = 3,
) -> PreferencePair:
    frame, _state = run_parse_chain(story, parse_client, strategy=strategy, max_repairs=max_repairs)
    generation = generate_story(gen_client, frame)
    original_report = judge_story(
        story, frame, judge_clients, n_runs=n_judge_runs, max_repairs=max_repairs, request_suggestion=False
    )
    generated_report = judge_story(
        generation.story, frame, judge_clients, n_runs=n_judge_runs, max_repairs=max_repairs,
        request_suggestion=False,
    )
    if story == generation.story:
        raise InvalidPair("generated story is identical to the source story")
    # Ties keep the source story on the chosen side.
    if generated_report.mean_score() > original_report.mean_score():
        chosen, chosen_scores = generation.story, generated_report
        rejected, rejected_scores = story, original_report
    else:
        chosen, chosen_scores = story, original_report
        rejected, rejected_scores = generation.story, generated_report
    digest = hashlib.sha256(story.encode("utf-8")).hexdigest()
    return PreferencePair(
        pair_id=f"pair_{digest[:16]}",
        source_digest=digest,
        frame_json=to_canonical_json(frame).decode("utf-8"),
        prompt=generation.prompt,
        chosen=chosen,
        rejected=rejected,
        chosen_scores=dict(chosen_scores.dimensions),
        rejected_scores=dict(rejected_scores.dimensions),
    )


@dataclass(frozen=True)
class DatasetBuildResult:
    pairs_path: Path
    failures_path: Path
    manifest_path: Path
    n_pairs: int
    n_failures: int


def build_dataset(
    stories: Sequence[str],
    out_dir: str | Path,
    parse_client: ChatClient,
    gen_client: ChatClient,
    judge_clients: ChatClient | Sequence[ChatClient],
    strategy: Strategy | str = Strategy.TIDD_EC_CHAIN,
    n_judge_runs: int = 3,
    max_repairs: int = 3,
) -> DatasetBuildResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pairs_path = out / "pairs.jsonl"
    failures_path = out / "failures.jsonl"
    manifest_path = out / "manifest.json"

    pairs: list[PreferencePair] = []
    failures: list[dict[str, Any]] = []
    for index, story in enumerate(stories):
        try:
            pairs.append(
                build_pair(
                    story,
                    parse_client,
                    gen_client,
                    judge_clients,
                    strategy=strategy,
                    n_judge_runs=n_judge_runs,
                    max_repairs=max_repairs,
                )
            )
        except StoryFrameError as exc:
            failures.append(
                {
                    "index": index,
                    "source_digest": hashlib.sha256(story.encode("utf-8")).hexdigest(),
                    "error": type(exc).__name__,
                    "detail": str(exc),
                }
            )
    write_pairs(pairs_path, pairs)
    _write_jsonl(failures_path, failures)
    manifest = {
        "n_input_stories": len(stories),
        "n_pairs": len(pairs),
        "n_failures": len(failures),
        "strategy": str(Strategy(strategy).value),
        "n_judge_runs": n_judge_runs,
        "max_repairs": max_repairs,
        "stats": dataset_stats(pairs),
    }
    manifest_path.write_bytes((json.dumps(manifest, indent=2, ensure_ascii=False) + "\n").encode("utf-8"))
    return DatasetBuildResult(
        pairs_path=pairs_path,
        failures_path=failures_path,
        manifest_path=manifest_path,
        n_pairs=len(pairs),
        n_failures=len(failures),
    )


def write_pairs(path: str | Path, pairs: Iterable[PreferencePair]) -> None:
    _write_jsonl(path, (pair.to_dict() for pair in pairs))


def read_pairs(path: str | Path) -> list[PreferencePair]:
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                pairs.append(PreferencePair.from_dict(json.loads(line)))
    return pairs


def _write_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def ablate_pair(pair: PreferencePair, unit: str) -> PreferencePair:
    """The same pair with one frame unit stripped and the prompt rebuilt."""
    doc = json.loads(pair.frame_json)
    reduced = strip_unit_document(doc, unit)
    reduced_json = document_to_bytes(reduced).decode("utf-8")
    from_canonical_json(reduced_json, ablated=unit)  # the reduced frame must stay valid
    prompt = render_prompt(build_tidd_prompt("generate_story.tidd", frame=reduced_json))
    return PreferencePair(
        pair_id=pair.pair_id,
        source_digest=pair.source_digest,
        frame_json=reduced_json,
        prompt=prompt,
        chosen=pair.chosen,
        rejected=pair.rejected,
        chosen_scores=dict(pair.chosen_scores),
        rejected_scores=dict(pair.rejected_scores),
    )


def ablate_dataset(pairs: Iterable[PreferencePair], unit: str) -> list[PreferencePair]:
    return [ablate_pair(pair, unit) for pair in pairs]


def split_dataset(
    pairs: Sequence[PreferencePair],
    ratio: float = DEFAULT_SPLIT_RATIO,
    seed: int = 0,
) -> tuple[list[PreferencePair], list[PreferencePair]]:
    """Shuffle deterministically and split; train size is round(ratio * N)."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be between 0 and 1 exclusive, got {ratio}")
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    n_train = round(ratio * len(shuffled))
    return shuffled[:n_train], shuffled[n_train:]


def dataset_stats(pairs: Sequence[PreferencePair]) -> dict[str, Any]:
    from .judge import DIMENSIONS

    emotional: dict[str, int] = {}
    action: dict[str, int] = {}
    strength: dict[str, int] = {}
    importance: dict[str, int] = {}
    histograms: dict[str, dict[str, int]] = {dim: {str(b): 0 for b in range(1, 6)} for dim in DIMENSIONS}
    chosen_lengths: list[int] = []
    rejected_lengths: list[int] = []

    for pair in pairs:
        frame = from_canonical_json(pair.frame_json)
        for rel in frame.relationships:
            emotional[rel.emotional_type] = emotional.get(rel.emotional_type, 0) + 1
            action[rel.action_type] = action.get(rel.action_type, 0) + 1
            strength[rel.relationship_strength] = strength.get(rel.relationship_strength, 0) + 1
        for ev in frame.events:
            importance[ev.event_importance] = importance.get(ev.event_importance, 0) + 1
        for dim in DIMENSIONS:
            score = pair.chosen_scores.get(dim)
            if score is not None:
                bin_ = str(min(5, max(1, round(score))))
                histograms[dim][bin_] += 1
        chosen_lengths.append(len(tokenize(pair.chosen)))
        rejected_lengths.append(len(tokenize(pair.rejected)))

    return {
        "n_pairs": len(pairs),
        "relationship_emotional_type": dict(sorted(emotional.items())),
        "relationship_action_type": dict(sorted(action.items())),
        "relationship_strength": dict(sorted(strength.items())),
        "event_importance": dict(sorted(importance.items())),
        "chosen_score_histograms": histograms,
        "story_length": {
            "chosen": _length_summary(chosen_lengths),
            "rejected": _length_summary(rejected_lengths),
        },
    }


def _length_summary(lengths: list[int]) -> dict[str, float]:
    if not lengths:
        return {"min": 0, "mean": 0.0, "max": 0}
    return {
        "min": min(lengths),
        "mean": round(sum(lengths) / len(lengths), 2),
        "max": max(lengths),
    }
