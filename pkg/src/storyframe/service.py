"""HTTP service exposing frame building, generation, and evaluation.

Sessions are file-backed and edited through typed builder ops. A PATCH is
transactional: ops apply to a working copy and persist only if every op
succeeds. Each frame has a single-writer lock; a second concurrent mutation
gets 409 instead of waiting. Upstream model failures surface as 502 with a
transcript excerpt where one exists.
"""

from __future__ import annotations

import threading
from typing import Any, Sequence

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from .builder import FrameBuilder
from .canonical import document_to_frame, frame_to_document, to_canonical_json
from .config import AppConfig, make_client
from .diagram import build_diagram
from .errors import (
    CorruptSession,
    EmptyGeneration,
    FrameParseError,
    LlmUnavailable,
    RepairExhausted,
    StoryFrameError,
    ValidationFailed,
)
from .judge import EvaluationReport, judge_story
from .llm import ChatClient
from .persistence import SessionStore
from .pipeline import TranscriptEntry, generate_story, regenerate_story

_ALLOWED_OPS = frozenset(
    {
        "create_entity",
        "edit_entity",
        "remove_entity",
        "create_event",
        "edit_event",
        "remove_event",
        "drop_event",
        "attach_entity",
        "detach_entity",
        "connect_relationship",
        "edit_relationship",
        "set_bidirectional",
        "remove_relationship",
        "link_events",
        "unlink_events",
        "assign_stage",
        "unassign_stage",
        "set_outline",
    }
)


def create_app(
    config: AppConfig | None = None,
    llm_client: ChatClient | None = None,
    judge_clients: Sequence[ChatClient] | None = None,
    store: SessionStore | None = None,
) -> FastAPI:
    config = config or AppConfig()
    store = store or SessionStore(config.service.data_dir)
    llm = llm_client if llm_client is not None else make_client(config.llm, label="llm")
    judges: list[ChatClient]
    if judge_clients is not None:
        judges = list(judge_clients)
    else:
        judges = [make_client(cfg, label="judge") for cfg in config.judges]

    app = FastAPI(title="storyframe service")
    app.state.store = store
    app.state.llm = llm
    app.state.judges = judges
    app.state.judge_runs = config.pipeline.judge_runs
    app.state.max_repairs = config.pipeline.max_repairs
    app.state.locks: dict[str, threading.Lock] = {}
    app.state.locks_guard = threading.Lock()
    app.state.id_guard = threading.Lock()

    def frame_lock(frame_id: str) -> threading.Lock:
        with app.state.locks_guard:
            return app.state.locks.setdefault(frame_id, threading.Lock())

    def next_frame_id() -> str:
        with app.state.id_guard:
            taken = store.list_ids()
            numbers = [int(fid.split("_")[1]) for fid in taken if fid.startswith("frame_") and fid.split("_")[1].isdigit()]
            return f"frame_{max(numbers, default=0) + 1}"

    def load_session(frame_id: str) -> dict[str, Any]:
        return store.load(frame_id)

    def validation_dict(builder: FrameBuilder) -> dict[str, Any]:
        report = builder.validate_frame()
        return {
            "ok": report.ok,
            "violations": [
                {"code": code, "message": message, "subjects": list(subjects)}
                for code, message, subjects in report.violations
            ],
        }

    def error_response(status: int, type_: str, detail: str, **extra: Any) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": {"type": type_, "detail": detail, **extra}})

    def busy_response(frame_id: str) -> JSONResponse:
        return error_response(409, "FrameBusy", f"{frame_id} is being modified by another request")

    def not_found(frame_id: str) -> JSONResponse:
        return error_response(404, "UnknownFrame", f"no frame named {frame_id}")

    def upstream_failure(exc: Exception, transcript: list[TranscriptEntry]) -> JSONResponse:
        excerpt = [
            {
                "step": entry.step,
                "kind": entry.kind,
                "prompt_tail": entry.prompt[-400:],
                "response_tail": entry.response[-400:],
            }
            for entry in transcript[-2:]
        ]
        return error_response(502, type(exc).__name__, str(exc), transcript_excerpt=excerpt)

    # -- endpoints -----------------------------------------------------------

    @app.post("/frames", status_code=201)
    def create_frame(body: dict[str, Any] | None = Body(default=None)) -> Any:
        builder = FrameBuilder()
        if body and body.get("frame") is not None:
            try:
                builder = FrameBuilder.from_frame(document_to_frame(body["frame"]))
            except FrameParseError as exc:
                return error_response(
                    400,
                    "FrameParseError",
                    str(exc),
                    violations=[{"path": v.path, "reason": v.reason, "code": v.code} for v in exc.violations],
                )
        frame_id = next_frame_id()
        store.save(frame_id, {"builder": builder.to_state(), "stories": [], "reports": []})
        return {"frame_id": frame_id, "validation": validation_dict(builder)}

    @app.get("/frames/{frame_id}")
    def get_frame(frame_id: str) -> Any:
        try:
            session = load_session(frame_id)
        except KeyError:
            return not_found(frame_id)
        except CorruptSession as exc:
            return error_response(500, "CorruptSession", str(exc))
        builder = FrameBuilder.from_state(session["builder"])
        return {
            "frame_id": frame_id,
            "frame": frame_to_document(builder.draft()),
            "validation": validation_dict(builder),
            "stories": session["stories"],
            "reports": session["reports"],
        }

    @app.patch("/frames/{frame_id}")
    def patch_frame(frame_id: str, body: dict[str, Any] = Body(...)) -> Any:
        ops = body.get("ops")
        if not isinstance(ops, list) or not ops:
            return error_response(400, "BadRequest", "body must carry a non-empty 'ops' array")
        lock = frame_lock(frame_id)
        if not lock.acquire(blocking=False):
            return busy_response(frame_id)
        try:
            try:
                session = load_session(frame_id)
            except KeyError:
                return not_found(frame_id)
            except CorruptSession as exc:
                return error_response(500, "CorruptSession", str(exc))
            builder = FrameBuilder.from_state(session["builder"])
            results: list[dict[str, Any]] = []
            for i, op_spec in enumerate(ops):
                if not isinstance(op_spec, dict) or "op" not in op_spec:
                    return error_response(400, "BadRequest", f"ops[{i}] must be an object with an 'op' name")
                op = op_spec["op"]
                args = op_spec.get("args", {})
                if op not in _ALLOWED_OPS:
                    return error_response(400, "UnknownOp", f"ops[{i}]: no op named {op!r}")
                if not isinstance(args, dict):
                    return error_response(400, "BadRequest", f"ops[{i}].args must be an object")
                try:
                    result = getattr(builder, op)(**args)
                except StoryFrameError as exc:
                    return error_response(400, type(exc).__name__, f"ops[{i}]: {exc}")
                except TypeError as exc:
                    return error_response(400, "BadRequest", f"ops[{i}]: {exc}")
                results.append({"op": op, "result": result})
            session["builder"] = builder.to_state()
            store.save(frame_id, session)
            return {"frame_id": frame_id, "results": results, "validation": validation_dict(builder)}
        finally:
            lock.release()

    @app.post("/frames/{frame_id}/generate")
    def generate(frame_id: str, body: dict[str, Any] | None = Body(default=None)) -> Any:
        return _produce(frame_id, body or {}, regenerate=False)

    @app.post("/frames/{frame_id}/regenerate")
    def regenerate(frame_id: str, body: dict[str, Any] | None = Body(default=None)) -> Any:
        return _produce(frame_id, body or {}, regenerate=True)

    def _produce(frame_id: str, body: dict[str, Any], regenerate: bool) -> Any:
        lock = frame_lock(frame_id)
        if not lock.acquire(blocking=False):
            return busy_response(frame_id)
        try:
            try:
                session = load_session(frame_id)
            except KeyError:
                return not_found(frame_id)
            except CorruptSession as exc:
                return error_response(500, "CorruptSession", str(exc))
            builder = FrameBuilder.from_state(session["builder"])
            try:
                frame = builder.commit()
            except ValidationFailed as exc:
                return error_response(
                    400,
                    "ValidationFailed",
                    "the frame is not valid yet",
                    violations=[
                        {"code": code, "message": message, "subjects": list(subjects)}
                        for code, message, subjects in exc.report.violations
                    ],
                )
            transcript: list[TranscriptEntry] = []
            try:
                if regenerate:
                    if not session["stories"]:
                        return error_response(409, "NothingToRevise", "generate a story before regenerating")
                    previous = session["stories"][-1]["text"]
                    suggestion = body.get("suggestion") or _last_suggestion(session) or ""
                    result = regenerate_story(llm, frame, previous, suggestion=suggestion)
                else:
                    result = generate_story(llm, frame)
                transcript.extend(result.transcript)
                report: EvaluationReport | None = None
                if judges:
                    report = judge_story(
                        result.story,
                        frame,
                        judges,
                        n_runs=app.state.judge_runs,
                        max_repairs=app.state.max_repairs,
                        request_suggestion=True,
                        transcript=transcript,
                    )
            except (LlmUnavailable, RepairExhausted, EmptyGeneration) as exc:
                return upstream_failure(exc, transcript)
            session["stories"].append(
                {"text": result.story, "created_by": "regenerate" if regenerate else "generate"}
            )
            session["reports"].append(report.to_dict() if report is not None else None)
            store.save(frame_id, session)
            version = len(session["stories"]) - 1
            return {
                "frame_id": frame_id,
                "version": version,
                "story": result.story,
                "report": report.to_dict() if report is not None else None,
                "evaluated": report is not None,
            }
        finally:
            lock.release()

    @app.post("/frames/{frame_id}/evaluate")
    def evaluate(frame_id: str, body: dict[str, Any] | None = Body(default=None)) -> Any:
        body = body or {}
        lock = frame_lock(frame_id)
        if not lock.acquire(blocking=False):
            return busy_response(frame_id)
        try:
            try:
                session = load_session(frame_id)
            except KeyError:
                return not_found(frame_id)
            except CorruptSession as exc:
                return error_response(500, "CorruptSession", str(exc))
            if not session["stories"]:
                return error_response(409, "NothingToEvaluate", "generate a story before evaluating")
            if not judges:
                return error_response(502, "LlmUnavailable", "no judge backend is configured")
            version = body.get("version", len(session["stories"]) - 1)
            if not isinstance(version, int) or not 0 <= version < len(session["stories"]):
                return error_response(400, "BadRequest", f"no story version {version!r}")
            builder = FrameBuilder.from_state(session["builder"])
            try:
                frame = builder.commit()
            except ValidationFailed as exc:
                return error_response(
                    400,
                    "ValidationFailed",
                    "the frame is not valid yet",
                    violations=[
                        {"code": code, "message": message, "subjects": list(subjects)}
                        for code, message, subjects in exc.report.violations
                    ],
                )
            transcript: list[TranscriptEntry] = []
            try:
                report = judge_story(
                    session["stories"][version]["text"],
                    frame,
                    judges,
                    n_runs=app.state.judge_runs,
                    max_repairs=app.state.max_repairs,
                    request_suggestion=True,
                    transcript=transcript,
                )
            except (LlmUnavailable, RepairExhausted) as exc:
                return upstream_failure(exc, transcript)
            session["reports"][version] = report.to_dict()
            store.save(frame_id, session)
            return {"frame_id": frame_id, "version": version, "report": report.to_dict()}
        finally:
            lock.release()

    @app.get("/frames/{frame_id}/export")
    def export(frame_id: str) -> Any:
        try:
            session = load_session(frame_id)
        except KeyError:
            return not_found(frame_id)
        except CorruptSession as exc:
            return error_response(500, "CorruptSession", str(exc))
        builder = FrameBuilder.from_state(session["builder"])
        try:
            frame = builder.commit()
        except ValidationFailed as exc:
            return error_response(
                400,
                "ValidationFailed",
                "the frame is not valid yet",
                violations=[
                    {"code": code, "message": message, "subjects": list(subjects)}
                    for code, message, subjects in exc.report.violations
                ],
            )
        if not session["stories"]:
            return error_response(409, "NothingToExport", "generate a story before exporting")
        return {
            "frame_id": frame_id,
            "story": session["stories"][-1]["text"],
            "frame_json": to_canonical_json(frame).decode("utf-8"),
            "diagram": build_diagram(frame),
            "report": session["reports"][-1],
        }

    def _last_suggestion(session: dict[str, Any]) -> str | None:
        for report in reversed(session["reports"]):
            if report and report.get("suggestion"):
                return report["suggestion"]
        return None

    return app
