"""Command-line interface.

Commands cover the full workflow: parse stories into frames, generate and
evaluate stories, build preference datasets (ablate, split, stats), compute
individual metrics, compare parsing strategies against gold frames, and run
the HTTP service. Failures print one machine-readable JSON error object to
stderr and exit non-zero.
"""

from __future__ import annotations

import functools
import json
import statistics
import sys
from pathlib import Path
from typing import Any, Callable

import click

from . import dataset as ds
from .canonical import from_canonical_json, to_canonical_json
from .config import AppConfig, load_config, make_client, make_embed_fn
from .errors import FrameParseError, StoryFrameError
from .judge import judge_story
from .metrics import (
    bert_score,
    json_tree_distance,
    mann_whitney_u,
    meteor_score,
    rouge_l,
)
from .pipeline import Strategy, generate_story, run_parse_chain

_STRATEGY_ORDER = (
    Strategy.ZERO_SHOT,
    Strategy.TIDD_EC,
    Strategy.TIDD_EC_COT,
    Strategy.TIDD_EC_CHAIN,
)


def _fail(exc: Exception) -> None:
    error: dict[str, Any] = {"type": type(exc).__name__, "detail": str(exc)}
    if isinstance(exc, FrameParseError):
        error["violations"] = [{"path": v.path, "reason": v.reason, "code": v.code} for v in exc.violations]
    click.echo(json.dumps({"error": error}, ensure_ascii=False), err=True)
    sys.exit(1)


def _handled(fn: Callable) -> Callable:
    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except StoryFrameError as exc:
            _fail(exc)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            _fail(exc)

    return wrapper


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit(doc: Any) -> None:
    click.echo(json.dumps(doc, indent=2, ensure_ascii=False))


def _config(ctx: click.Context) -> AppConfig:
    return load_config(ctx.obj.get("config_path"))


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="INI configuration file.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Structured story frames: parse, generate, evaluate, build datasets."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@main.command()
@click.option("--input", "input_path", required=True, help="Story text file, or - for stdin.")
@click.option("--output", "output_path", default=None, help="Where to write the frame JSON (default stdout).")
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]), default=Strategy.TIDD_EC_CHAIN.value)
@click.pass_context
@_handled
def parse(ctx: click.Context, input_path: str, output_path: str | None, strategy: str) -> None:
    """Parse a story into a validated story frame."""
    config = _config(ctx)
    client = make_client(config.llm, label="llm")
    story = _read_text(input_path)
    frame, state = run_parse_chain(story, client, strategy=strategy, max_repairs=config.pipeline.max_repairs)
    _write_text(output_path, to_canonical_json(frame).decode("utf-8"))
    if output_path:
        _emit({"ok": True, "output": output_path, "llm_calls": len(state.transcript), "strategy": strategy})


@main.command()
@click.option("--input", "input_path", required=True, help="Frame JSON file.")
@click.option("--output", "output_path", default=None, help="Where to write the story (default stdout).")
@click.pass_context
@_handled
def generate(ctx: click.Context, input_path: str, output_path: str | None) -> None:
    """Generate a story from a frame."""
    config = _config(ctx)
    client = make_client(config.llm, label="llm")
    frame = from_canonical_json(_read_text(input_path))
    result = generate_story(client, frame)
    _write_text(output_path, result.story + "\n")
    if output_path:
        _emit({"ok": True, "output": output_path})


@main.command()
@click.option("--input", "input_path", required=True, help="Story text file.")
@click.option("--frame", "frame_path", required=True, help="Frame JSON the story is judged against.")
@click.option("--judge-runs", type=int, default=None, help="Number of judge runs (default from config).")
@click.pass_context
@_handled
def evaluate(ctx: click.Context, input_path: str, frame_path: str, judge_runs: int | None) -> None:
    """Score a story against its frame on the seven dimensions."""
    config = _config(ctx)
    judges = [make_client(cfg, label="judge") for cfg in config.judges]
    if not judges:
        judges = [make_client(config.llm, label="llm")]
    frame = from_canonical_json(_read_text(frame_path))
    report = judge_story(
        _read_text(input_path),
        frame,
        judges,
        n_runs=judge_runs or config.pipeline.judge_runs,
        max_repairs=config.pipeline.max_repairs,
    )
    _emit(report.to_dict())


@main.command("build-dataset")
@click.option("--input", "input_path", required=True, help="Corpus file of source stories.")
@click.option("--output", "output_dir", required=True, help="Directory for pairs.jsonl, failures.jsonl, manifest.json.")
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]), default=Strategy.TIDD_EC_CHAIN.value)
@click.option("--judge-runs", type=int, default=None)
@click.option("--record-sep", type=click.Choice(["line", "blank"]), default="line")
@click.pass_context
@_handled
def build_dataset(
    ctx: click.Context,
    input_path: str,
    output_dir: str,
    strategy: str,
    judge_runs: int | None,
    record_sep: str,
) -> None:
    """Build a preference-pair dataset from a story corpus."""
    config = _config(ctx)
    llm = make_client(config.llm, label="llm")
    judges = [make_client(cfg, label="judge") for cfg in config.judges] or [llm]
    stories = ds.ingest_corpus(input_path, record_sep=record_sep)
    result = ds.build_dataset(
        stories,
        output_dir,
        parse_client=llm,
        gen_client=llm,
        judge_clients=judges,
        strategy=strategy,
        n_judge_runs=judge_runs or config.pipeline.judge_runs,
        max_repairs=config.pipeline.max_repairs,
    )
    _emit(
        {
            "pairs": str(result.pairs_path),
            "failures": str(result.failures_path),
            "manifest": str(result.manifest_path),
            "n_pairs": result.n_pairs,
            "n_failures": result.n_failures,
        }
    )


@main.command()
@click.option("--input", "input_path", required=True, help="pairs.jsonl to ablate.")
@click.option("--unit", type=click.Choice(["entities", "events", "relationships", "outline"]), required=True)
@click.option("--output", "output_path", required=True, help="Where to write the ablated pairs.")
@_handled
def ablate(input_path: str, unit: str, output_path: str) -> None:
    """Strip one frame unit from every pair and rebuild the prompts."""
    pairs = ds.read_pairs(input_path)
    ablated = ds.ablate_dataset(pairs, unit)
    ds.write_pairs(output_path, ablated)
    _emit({"n_pairs": len(ablated), "unit": unit, "output": output_path})


@main.command()
@click.option("--input", "input_path", required=True, help="pairs.jsonl to split.")
@click.option("--output", "output_dir", required=True, help="Directory for train.jsonl and eval.jsonl.")
@click.option("--ratio", type=float, default=ds.DEFAULT_SPLIT_RATIO, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_handled
def split(input_path: str, output_dir: str, ratio: float, seed: int) -> None:
    """Shuffle deterministically and split pairs into train and eval sets."""
    pairs = ds.read_pairs(input_path)
    train, evaluation = ds.split_dataset(pairs, ratio=ratio, seed=seed)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds.write_pairs(out / "train.jsonl", train)
    ds.write_pairs(out / "eval.jsonl", evaluation)
    _emit({"n_train": len(train), "n_eval": len(evaluation), "ratio": ratio, "seed": seed})


@main.command()
@click.option("--input", "input_path", required=True, help="pairs.jsonl to summarize.")
@_handled
def stats(input_path: str) -> None:
    """Distribution statistics for a pair set."""
    _emit(ds.dataset_stats(ds.read_pairs(input_path)))


@main.group()
def metrics() -> None:
    """Individual text and structure metrics."""


@metrics.command("rouge-l")
@click.option("--candidate", required=True, help="Candidate text file.")
@click.option("--reference", required=True, help="Reference text file.")
@_handled
def metrics_rouge(candidate: str, reference: str) -> None:
    values = rouge_l(_read_text(candidate), _read_text(reference))
    _emit({"metric": "rouge_l", "values": values})


@metrics.command("meteor")
@click.option("--candidate", required=True, help="Candidate text file.")
@click.option("--reference", required=True, help="Reference text file.")
@_handled
def metrics_meteor(candidate: str, reference: str) -> None:
    values = meteor_score(_read_text(candidate), _read_text(reference))
    _emit({"metric": "meteor", "values": values})


@metrics.command("ted")
@click.option("--candidate", required=True, help="Candidate JSON file.")
@click.option("--reference", required=True, help="Reference JSON file.")
@_handled
def metrics_ted(candidate: str, reference: str) -> None:
    distance = json_tree_distance(json.loads(_read_text(candidate)), json.loads(_read_text(reference)))
    _emit({"metric": "tree_edit_distance", "values": {"distance": distance}})


@metrics.command("utest")
@click.option("--a", "a_path", required=True, help="First sample, one number per line.")
@click.option("--b", "b_path", required=True, help="Second sample, one number per line.")
@click.option("--alternative", type=click.Choice(["two-sided", "greater", "less"]), default="two-sided")
@click.option("--method", type=click.Choice(["auto", "exact", "normal"]), default="auto")
@_handled
def metrics_utest(a_path: str, b_path: str, alternative: str, method: str) -> None:
    a = [float(line) for line in _read_text(a_path).split()]
    b = [float(line) for line in _read_text(b_path).split()]
    result = mann_whitney_u(a, b, alternative=alternative, method=method)
    _emit(
        {
            "metric": "mann_whitney_u",
            "values": {
                "u_statistic": result.u_statistic,
                "p_value": result.p_value,
                "method": result.method,
                "degenerate": result.degenerate,
                "n": result.n,
                "m": result.m,
            },
        }
    )


@metrics.command("bertscore")
@click.option("--candidate", required=True, help="Candidate text file.")
@click.option("--reference", required=True, help="Reference text file.")
@click.pass_context
@_handled
def metrics_bertscore(ctx: click.Context, candidate: str, reference: str) -> None:
    config = load_config(ctx.obj.get("config_path"))
    embed = make_embed_fn(config.embed)
    values = bert_score(_read_text(candidate), _read_text(reference), embed)
    _emit({"metric": "bert_score", "values": values})


@main.command("compare-strategies")
@click.option("--input", "input_path", required=True, help="Corpus file of source stories.")
@click.option("--gold", "gold_path", required=True, help="JSONL of gold frame documents, one per story.")
@click.option("--output", "output_path", default=None, help="Where to write the report (default stdout).")
@click.option("--record-sep", type=click.Choice(["line", "blank"]), default="line")
@click.pass_context
@_handled
def compare_strategies(
    ctx: click.Context,
    input_path: str,
    gold_path: str,
    output_path: str | None,
    record_sep: str,
) -> None:
    """Parse every story under each strategy and score distance to gold.

    Strategies run in a fixed order per story (zero_shot, tidd_ec,
    tidd_ec_cot, tidd_ec_chain) so scripted backends can be laid out
    deterministically. The distance is the tree edit distance between the
    parsed frame document and the gold document.
    """
    config = _config(ctx)
    client = make_client(config.llm, label="llm")
    stories = ds.ingest_corpus(input_path, record_sep=record_sep)
    golds = [json.loads(line) for line in _read_text(gold_path).splitlines() if line.strip()]
    if len(golds) != len(stories):
        raise ValueError(f"{len(stories)} stories but {len(golds)} gold frames")
    distances: dict[str, list[int]] = {s.value: [] for s in _STRATEGY_ORDER}
    failures: list[dict[str, Any]] = []
    for index, (story, gold) in enumerate(zip(stories, golds)):
        for strategy in _STRATEGY_ORDER:
            try:
                frame, _ = run_parse_chain(story, client, strategy=strategy,
                                           max_repairs=config.pipeline.max_repairs)
            except StoryFrameError as exc:
                failures.append({"index": index, "strategy": strategy.value,
                                 "error": type(exc).__name__, "detail": str(exc)})
                continue
            parsed_doc = json.loads(to_canonical_json(frame).decode("utf-8"))
            distances[strategy.value].append(json_tree_distance(parsed_doc, gold))
    report = {
        "n_stories": len(stories),
        "strategies": {name: _distance_summary(values) for name, values in distances.items()},
        "failures": failures,
    }
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    _write_text(output_path, text)
    if output_path:
        _emit({"ok": True, "output": output_path})


def _distance_summary(values: list[int]) -> dict[str, Any]:
    if not values:
        return {"n": 0, "distances": [], "median": None, "q1": None, "q3": None}
    ordered = sorted(values)
    if len(ordered) == 1:
        q1 = q3 = float(ordered[0])
    else:
        quartiles = statistics.quantiles(ordered, n=4, method="inclusive")
        q1, q3 = quartiles[0], quartiles[2]
    return {
        "n": len(values),
        "distances": values,
        "median": float(statistics.median(ordered)),
        "q1": float(q1),
        "q3": float(q3),
    }


@main.command()
@click.option("--host", default=None, help="Bind host (default from config).")
@click.option("--port", type=int, default=None, help="Bind port (default from config).")
@click.pass_context
@_handled
def serve(ctx: click.Context, host: str | None, port: int | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = _config(ctx)
    app = create_app(config)
    uvicorn.run(app, host=host or config.service.host, port=port or config.service.port)


if __name__ == "__main__":
    main()
