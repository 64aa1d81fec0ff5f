"""Preference-pair construction, corpus ingestion, split, ablation, stats."""

from __future__ import annotations

import hashlib
import json

import pytest

from conftest import CORPUS_PATH, chain_replies, scorecard_json
from storyframe import (
    MockChatClient,
    PreferencePair,
    ablate_dataset,
    build_dataset,
    build_pair,
    dataset_stats,
    from_canonical_json,
    ingest_corpus,
    split_dataset,
)
from storyframe.dataset import read_pairs, write_pairs, ablate_pair
from storyframe.errors import EmptyCorpus, InvalidPair, RepairExhausted

STORY = "A quiet harbor town wakes to find every boat facing the wrong way."
GENERATED = "By noon the tide had turned every hull back, and nobody spoke of it."


def pair_clients(small_doc, source_scores: int = 3, generated_scores: int = 4):
    """Scripted clients for one build_pair call."""
    parse = MockChatClient(script=chain_replies(small_doc))
    gen = MockChatClient(script=[GENERATED])
    judge = MockChatClient(
        script=[scorecard_json(source_scores)] * 3 + [scorecard_json(generated_scores)] * 3
    )
    return parse, gen, judge


class TestIngestCorpus:
    def test_line_records(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("one story\ntwo story\n\nthree story\n", encoding="utf-8")
        assert ingest_corpus(path) == ["one story", "two story", "three story"]

    def test_blank_separated_blocks(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("first line\nsame story\n\nsecond story\n", encoding="utf-8")
        assert ingest_corpus(path, record_sep="blank") == ["first line same story", "second story"]

    def test_duplicates_dropped_order_kept(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("a\nb\na\nc\nb\n", encoding="utf-8")
        assert ingest_corpus(path) == ["a", "b", "c"]

    def test_empty_corpus(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("\n\n  \n", encoding="utf-8")
        with pytest.raises(EmptyCorpus):
            ingest_corpus(path)

    def test_bad_separator(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("a\n", encoding="utf-8")
        with pytest.raises(ValueError):
            ingest_corpus(path, record_sep="comma")

    def test_fixture_corpus_loads(self):
        stories = ingest_corpus(CORPUS_PATH)
        assert len(stories) == 20


class TestBuildPair:
    def test_source_wins(self, small_doc):
        parse, gen, judge = pair_clients(small_doc, source_scores=4, generated_scores=3)
        pair = build_pair(STORY, parse, gen, judge)
        assert pair.chosen == STORY
        assert pair.rejected == GENERATED
        assert pair.chosen_scores["readability"] == 4.0
        assert pair.rejected_scores["readability"] == 3.0

    def test_generated_wins(self, small_doc):
        parse, gen, judge = pair_clients(small_doc, source_scores=2, generated_scores=5)
        pair = build_pair(STORY, parse, gen, judge)
        assert pair.chosen == GENERATED
        assert pair.rejected == STORY

    def test_tie_prefers_source(self, small_doc):
        parse, gen, judge = pair_clients(small_doc, source_scores=3, generated_scores=3)
        pair = build_pair(STORY, parse, gen, judge)
        assert pair.chosen == STORY

    def test_pair_id_from_story_digest(self, small_doc):
        parse, gen, judge = pair_clients(small_doc)
        pair = build_pair(STORY, parse, gen, judge)
        digest = hashlib.sha256(STORY.encode("utf-8")).hexdigest()
        assert pair.source_digest == digest
        assert pair.pair_id == f"pair_{digest[:16]}"

    def test_frame_json_is_canonical(self, small_doc):
        parse, gen, judge = pair_clients(small_doc)
        pair = build_pair(STORY, parse, gen, judge)
        frame = from_canonical_json(pair.frame_json)
        assert json.loads(pair.frame_json) == small_doc
        assert pair.frame_json.endswith("\n")
        assert frame.outline.title == small_doc["outline"]["title"]

    def test_prompt_is_the_generation_prompt(self, small_doc):
        parse, gen, judge = pair_clients(small_doc)
        pair = build_pair(STORY, parse, gen, judge)
        assert pair.prompt == gen.requests[0].messages[-1].content

    def test_call_order_parse_generate_judge_source_judge_generated(self, small_doc):
        order: list[str] = []
        replies = chain_replies(small_doc)

        def parsing(request):
            order.append("parse")
            return replies[order.count("parse") - 1]

        def generating(request):
            order.append("gen")
            return GENERATED

        def judging(request):
            prompt = request.messages[-1].content
            order.append("judge_gen" if GENERATED in prompt else "judge_src")
            return scorecard_json(3)

        build_pair(
            STORY,
            MockChatClient(responder=parsing),
            MockChatClient(responder=generating),
            MockChatClient(responder=judging),
        )
        assert order == ["parse"] * 4 + ["gen"] + ["judge_src"] * 3 + ["judge_gen"] * 3

    def test_identical_generation_rejected(self, small_doc):
        parse = MockChatClient(script=chain_replies(small_doc))
        gen = MockChatClient(script=[STORY])  # echoes the source
        judge = MockChatClient(script=[scorecard_json(3)] * 6)
        with pytest.raises(InvalidPair):
            build_pair(STORY, parse, gen, judge)

    def test_no_suggestion_calls_made(self, small_doc):
        parse, gen, judge = pair_clients(small_doc)
        build_pair(STORY, parse, gen, judge)
        assert len(judge.requests) == 6  # 3 + 3, nothing more


class TestBuildDataset:
    def test_corpus_run_with_failures(self, tmp_path, corpus_harness):
        stories = list(corpus_harness.stories[:5]) + ["unknown story the responder cannot map"]

        def respond(request):
            try:
                return corpus_harness.responder(request)
            except (AssertionError, KeyError):
                raise RepairExhausted("entities", 4)

        client = MockChatClient(responder=respond)
        result = build_dataset(stories, tmp_path / "ds", client, client, client)
        assert result.n_pairs == 5
        assert result.n_failures == 1
        pairs = read_pairs(result.pairs_path)
        assert len(pairs) == 5
        failures = [json.loads(line) for line in result.failures_path.read_text().splitlines()]
        assert failures[0]["index"] == 5
        assert failures[0]["error"] == "RepairExhausted"
        manifest = json.loads(result.manifest_path.read_text())
        assert manifest["n_pairs"] == 5
        assert manifest["n_failures"] == 1
        assert manifest["strategy"] == "tidd_ec_chain"
        assert manifest["stats"]["n_pairs"] == 5

    def test_pairs_keep_input_order(self, tmp_path, corpus_harness):
        stories = corpus_harness.stories[:4]
        client = corpus_harness.client()
        result = build_dataset(stories, tmp_path / "ds", client, client, client)
        pairs = read_pairs(result.pairs_path)
        digests = [hashlib.sha256(s.encode("utf-8")).hexdigest() for s in stories]
        assert [p.source_digest for p in pairs] == digests

    def test_chosen_never_scores_below_rejected(self, tmp_path, corpus_harness):
        client = corpus_harness.client()
        result = build_dataset(corpus_harness.stories, tmp_path / "ds", client, client, client)
        assert result.n_failures == 0
        for pair in read_pairs(result.pairs_path):
            chosen_mean = sum(pair.chosen_scores.values()) / len(pair.chosen_scores)
            rejected_mean = sum(pair.rejected_scores.values()) / len(pair.rejected_scores)
            assert chosen_mean >= rejected_mean


class TestReadWrite:
    def test_jsonl_round_trip(self, tmp_path, small_doc):
        parse, gen, judge = pair_clients(small_doc)
        pair = build_pair(STORY, parse, gen, judge)
        path = tmp_path / "pairs.jsonl"
        write_pairs(path, [pair])
        assert read_pairs(path) == [pair]

    def test_from_dict_coerces_scores(self):
        doc = {
            "pair_id": "pair_x",
            "source_digest": "d",
            "frame_json": "{}",
            "prompt": "p",
            "chosen": "a",
            "rejected": "b",
            "chosen_scores": {"readability": 4},
            "rejected_scores": {"readability": "3.5"},
        }
        pair = PreferencePair.from_dict(doc)
        assert pair.chosen_scores["readability"] == 4.0
        assert pair.rejected_scores["readability"] == 3.5


class TestSplit:
    def make_pairs(self, n: int) -> list[PreferencePair]:
        return [
            PreferencePair(
                pair_id=f"pair_{i:016d}",
                source_digest=str(i),
                frame_json="{}",
                prompt="p",
                chosen=f"c{i}",
                rejected=f"r{i}",
                chosen_scores={},
                rejected_scores={},
            )
            for i in range(n)
        ]

    def test_ninety_ten(self):
        train, eval_ = split_dataset(self.make_pairs(100), ratio=0.9, seed=0)
        assert len(train) == 90
        assert len(eval_) == 10

    def test_round_not_floor(self):
        # 0.9 * 9851 = 8865.9 -> 8866
        train, eval_ = split_dataset(self.make_pairs(9851), ratio=0.9, seed=0)
        assert len(train) == 8866
        assert len(eval_) == 985

    def test_deterministic_for_seed(self):
        pairs = self.make_pairs(50)
        first = split_dataset(pairs, seed=7)
        second = split_dataset(pairs, seed=7)
        assert first == second
        third = split_dataset(pairs, seed=8)
        assert first != third

    def test_partition_is_exact(self):
        pairs = self.make_pairs(37)
        train, eval_ = split_dataset(pairs, seed=3)
        ids = sorted(p.pair_id for p in train + eval_)
        assert ids == sorted(p.pair_id for p in pairs)

    def test_input_order_unchanged(self):
        pairs = self.make_pairs(20)
        before = list(pairs)
        split_dataset(pairs, seed=1)
        assert pairs == before

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.5, 1.5])
    def test_ratio_validated(self, ratio):
        with pytest.raises(ValueError):
            split_dataset(self.make_pairs(10), ratio=ratio)


class TestAblation:
    def build(self, small_doc) -> PreferencePair:
        parse, gen, judge = pair_clients(small_doc)
        return build_pair(STORY, parse, gen, judge)

    @pytest.mark.parametrize("unit", ["entities", "events", "relationships", "outline"])
    def test_unit_removed_and_revalidated(self, small_doc, unit):
        pair = self.build(small_doc)
        ablated = ablate_pair(pair, unit)
        doc = json.loads(ablated.frame_json)
        assert unit not in doc
        from_canonical_json(ablated.frame_json, ablated=unit)

    def test_prompt_rebuilt_from_reduced_frame(self, small_doc):
        pair = self.build(small_doc)
        ablated = ablate_pair(pair, "relationships")
        assert ablated.prompt != pair.prompt
        assert '"relationship_id"' not in ablated.prompt
        assert '"event_details"' in ablated.prompt

    def test_stories_and_scores_unchanged(self, small_doc):
        pair = self.build(small_doc)
        ablated = ablate_pair(pair, "events")
        assert ablated.chosen == pair.chosen
        assert ablated.rejected == pair.rejected
        assert ablated.chosen_scores == pair.chosen_scores
        assert ablated.pair_id == pair.pair_id

    def test_ablate_dataset(self, small_doc):
        pair = self.build(small_doc)
        out = ablate_dataset([pair, pair], "outline")
        assert len(out) == 2
        assert all("outline" not in json.loads(p.frame_json) for p in out)


class TestStats:
    def test_stats_over_built_pairs(self, tmp_path, corpus_harness):
        client = corpus_harness.client()
        result = build_dataset(corpus_harness.stories[:8], tmp_path / "ds", client, client, client)
        stats = dataset_stats(read_pairs(result.pairs_path))
        assert stats["n_pairs"] == 8
        assert sum(stats["relationship_strength"].values()) == 8  # one relationship per fixture frame
        assert set(stats["event_importance"]) <= {"low", "medium", "high"}
        for dim, hist in stats["chosen_score_histograms"].items():
            assert sorted(hist) == ["1", "2", "3", "4", "5"]
            assert sum(hist.values()) == 8
        assert stats["story_length"]["chosen"]["min"] > 0
        assert stats["story_length"]["chosen"]["max"] >= stats["story_length"]["chosen"]["min"]

    def test_empty_stats(self):
        stats = dataset_stats([])
        assert stats["n_pairs"] == 0
        assert stats["story_length"]["chosen"] == {"min": 0, "mean": 0.0, "max": 0}
