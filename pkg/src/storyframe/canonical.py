"""Canonical JSON form of a story frame.

One byte format everywhere: UTF-8, two-space indent, keys in the fixed order
below, explicit ``null`` for absent optional values, trailing newline. Equal
frames serialize to equal bytes, which is what the export endpoint, golden
files, and the dataset builder rely on.
"""

from __future__ import annotations

import copy
import json
from typing import Any

from .errors import FrameParseError, MalformedJson
from .model import (
    STAGES,
    UNITS,
    Entity,
    Event,
    Outline,
    Relationship,
    SchemaViolation,
    StoryFrame,
    Violation,
    validate_present_units,
    validate_units,
)

ENTITY_KEYS = ("entity_id", "entity_name", "entity_identity", "entity_motivation", "personality_traits")
EVENT_KEYS = (
    "event_id",
    "event_time",
    "event_location",
    "event_details",
    "event_importance",
    "earlier_event",
    "later_event",
)
RELATIONSHIP_KEYS = (
    "relationship_id",
    "included_entities",
    "source_entities",
    "target_entities",
    "emotional_type",
    "action_type",
    "action_direction",
    "relationship_strength",
    "relationship_evolution",
    "event_id",
)
OUTLINE_KEYS = ("title", "story_description", "story_structure")


def entity_to_dict(ent: Entity) -> dict[str, Any]:
    return {
        "entity_id": ent.entity_id,
        "entity_name": ent.entity_name,
        "entity_identity": ent.entity_identity,
        "entity_motivation": ent.entity_motivation,
        "personality_traits": list(ent.personality_traits),
    }


def event_to_dict(ev: Event) -> dict[str, Any]:
    return {
        "event_id": ev.event_id,
        "event_time": ev.event_time,
        "event_location": ev.event_location,
        "event_details": ev.event_details,
        "event_importance": ev.event_importance,
        "earlier_event": ev.earlier_event,
        "later_event": ev.later_event,
    }


def relationship_to_dict(rel: Relationship) -> dict[str, Any]:
    return {
        "relationship_id": rel.relationship_id,
        "included_entities": list(rel.included_entities),
        "source_entities": list(rel.source_entities),
        "target_entities": list(rel.target_entities),
        "emotional_type": rel.emotional_type,
        "action_type": rel.action_type,
        "action_direction": rel.action_direction,
        "relationship_strength": rel.relationship_strength,
        "relationship_evolution": rel.relationship_evolution,
        "event_id": rel.event_id,
    }


def outline_to_dict(outline: Outline) -> dict[str, Any]:
    return {
        "title": outline.title,
        "story_description": outline.story_description,
        "story_structure": {stage: list(outline.story_structure.get(stage, ())) for stage in STAGES},
    }


def frame_to_document(frame: StoryFrame) -> dict[str, Any]:
    return {
        "entities": [entity_to_dict(e) for e in frame.entities],
        "events": [event_to_dict(e) for e in frame.events],
        "relationships": [relationship_to_dict(r) for r in frame.relationships],
        "outline": outline_to_dict(frame.outline),
    }


def document_to_bytes(doc: dict[str, Any]) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def to_canonical_json(frame: StoryFrame) -> bytes:
    return document_to_bytes(frame_to_document(frame))


# ---------------------------------------------------------------------------
# Parsing


def _typed(path: str, value: Any, kind: type, label: str, violations: list[Violation], default: Any):
    if isinstance(value, kind) and not (kind is str and isinstance(value, bool)):
        return value
    violations.append(SchemaViolation(path, f"expected {label}, got {type(value).__name__}", "BAD_TYPE"))
    return default


def _string(path: str, value: Any, violations: list[Violation]) -> str:
    if isinstance(value, str):
        return value
    violations.append(SchemaViolation(path, f"expected string, got {type(value).__name__}", "BAD_TYPE"))
    return ""


def _opt_string(path: str, value: Any, violations: list[Violation]) -> str | None:
    if value is None or isinstance(value, str):
        return value
    violations.append(SchemaViolation(path, f"expected string or null, got {type(value).__name__}", "BAD_TYPE"))
    return None


def _string_list(path: str, value: Any, violations: list[Violation]) -> tuple[str, ...]:
    if not isinstance(value, list):
        violations.append(SchemaViolation(path, f"expected array, got {type(value).__name__}", "BAD_TYPE"))
        return ()
    out = []
    for i, item in enumerate(value):
        if isinstance(item, str):
            out.append(item)
        else:
            violations.append(
                SchemaViolation(f"{path}[{i}]", f"expected string, got {type(item).__name__}", "BAD_TYPE")
            )
    return tuple(out)


def _check_keys(path: str, obj: dict, allowed: tuple[str, ...], required: tuple[str, ...], violations: list[Violation]):
    for key in obj:
        if key not in allowed:
            violations.append(SchemaViolation(f"{path}.{key}", f"unknown key {key!r}", "UNKNOWN_KEY"))
    for key in required:
        if key not in obj:
            violations.append(SchemaViolation(f"{path}.{key}", f"missing key {key!r}", "MISSING_KEY"))


def _parse_entity(path: str, obj: Any, violations: list[Violation]) -> Entity:
    if not isinstance(obj, dict):
        violations.append(SchemaViolation(path, f"expected object, got {type(obj).__name__}", "BAD_TYPE"))
        return Entity("", "", "", "", ())
    _check_keys(path, obj, ENTITY_KEYS, ENTITY_KEYS, violations)
    return Entity(
        entity_id=_string(f"{path}.entity_id", obj.get("entity_id", ""), violations),
        entity_name=_string(f"{path}.entity_name", obj.get("entity_name", ""), violations),
        entity_identity=_string(f"{path}.entity_identity", obj.get("entity_identity", ""), violations),
        entity_motivation=_string(f"{path}.entity_motivation", obj.get("entity_motivation", ""), violations),
        personality_traits=_string_list(f"{path}.personality_traits", obj.get("personality_traits", []), violations),
    )


def _parse_event(path: str, obj: Any, violations: list[Violation]) -> Event:
    if not isinstance(obj, dict):
        violations.append(SchemaViolation(path, f"expected object, got {type(obj).__name__}", "BAD_TYPE"))
        return Event("", "", "", "", "low")
    required = tuple(k for k in EVENT_KEYS if k not in ("earlier_event", "later_event"))
    _check_keys(path, obj, EVENT_KEYS, required, violations)
    return Event(
        event_id=_string(f"{path}.event_id", obj.get("event_id", ""), violations),
        event_time=_string(f"{path}.event_time", obj.get("event_time", ""), violations),
        event_location=_string(f"{path}.event_location", obj.get("event_location", ""), violations),
        event_details=_string(f"{path}.event_details", obj.get("event_details", ""), violations),
        event_importance=_string(f"{path}.event_importance", obj.get("event_importance", ""), violations),
        earlier_event=_opt_string(f"{path}.earlier_event", obj.get("earlier_event"), violations),
        later_event=_opt_string(f"{path}.later_event", obj.get("later_event"), violations),
    )


def _parse_relationship(path: str, obj: Any, violations: list[Violation]) -> Relationship:
    if not isinstance(obj, dict):
        violations.append(SchemaViolation(path, f"expected object, got {type(obj).__name__}", "BAD_TYPE"))
        return Relationship("", (), (), (), "", "", "unidirectional", "low", "")
    required = tuple(k for k in RELATIONSHIP_KEYS if k != "event_id")
    _check_keys(path, obj, RELATIONSHIP_KEYS, required, violations)
    return Relationship(
        relationship_id=_string(f"{path}.relationship_id", obj.get("relationship_id", ""), violations),
        included_entities=_string_list(f"{path}.included_entities", obj.get("included_entities", []), violations),
        source_entities=_string_list(f"{path}.source_entities", obj.get("source_entities", []), violations),
        target_entities=_string_list(f"{path}.target_entities", obj.get("target_entities", []), violations),
        emotional_type=_string(f"{path}.emotional_type", obj.get("emotional_type", ""), violations),
        action_type=_string(f"{path}.action_type", obj.get("action_type", ""), violations),
        action_direction=_string(f"{path}.action_direction", obj.get("action_direction", ""), violations),
        relationship_strength=_string(f"{path}.relationship_strength", obj.get("relationship_strength", ""), violations),
        relationship_evolution=_string(
            f"{path}.relationship_evolution", obj.get("relationship_evolution", ""), violations
        ),
        event_id=_opt_string(f"{path}.event_id", obj.get("event_id"), violations),
    )


def _parse_outline(path: str, obj: Any, violations: list[Violation], ablated: str | None) -> Outline:
    if not isinstance(obj, dict):
        violations.append(SchemaViolation(path, f"expected object, got {type(obj).__name__}", "BAD_TYPE"))
        return Outline("", "", {stage: () for stage in STAGES})
    _check_keys(path, obj, OUTLINE_KEYS, OUTLINE_KEYS, violations)
    structure_raw = obj.get("story_structure", {})
    structure: dict[str, tuple[str, ...]] = {}
    if not isinstance(structure_raw, dict):
        violations.append(
            SchemaViolation(
                f"{path}.story_structure", f"expected object, got {type(structure_raw).__name__}", "BAD_TYPE"
            )
        )
        structure_raw = {}
    for key in structure_raw:
        if key not in STAGES:
            violations.append(
                SchemaViolation(f"{path}.story_structure.{key}", f"unknown stage {key!r}", "UNKNOWN_KEY")
            )
    for stage in STAGES:
        if stage in structure_raw:
            structure[stage] = _string_list(f"{path}.story_structure.{stage}", structure_raw[stage], violations)
        else:
            structure[stage] = ()
    return Outline(
        title=_string(f"{path}.title", obj.get("title", ""), violations),
        story_description=_string(f"{path}.story_description", obj.get("story_description", ""), violations),
        story_structure=structure,
    )


def document_to_frame(doc: Any, ablated: str | None = None) -> StoryFrame:
    """Build a frame from a parsed JSON document, validating everything.

    Raises :class:`FrameParseError` carrying every violation found. With
    ``ablated`` set, the named unit must be absent and rules that depend on it
    are relaxed.
    """
    violations: list[Violation] = []
    if not isinstance(doc, dict):
        raise FrameParseError([SchemaViolation("$", f"expected object, got {type(doc).__name__}", "BAD_TYPE")])
    expected_units = [u for u in UNITS if u != ablated]
    for key in doc:
        if key not in UNITS:
            violations.append(SchemaViolation(f"$.{key}", f"unknown key {key!r}", "UNKNOWN_KEY"))
        elif key == ablated:
            violations.append(SchemaViolation(f"$.{key}", f"unit {key!r} must be absent here", "UNKNOWN_KEY"))
    for key in expected_units:
        if key not in doc:
            violations.append(SchemaViolation(f"$.{key}", f"missing unit {key!r}", "MISSING_UNIT"))

    entities: tuple[Entity, ...] = ()
    events: tuple[Event, ...] = ()
    relationships: tuple[Relationship, ...] = ()
    outline: Outline | None = None

    if "entities" in doc and ablated != "entities":
        raw = doc["entities"]
        if isinstance(raw, list):
            entities = tuple(_parse_entity(f"$.entities[{i}]", obj, violations) for i, obj in enumerate(raw))
        else:
            violations.append(SchemaViolation("$.entities", f"expected array, got {type(raw).__name__}", "BAD_TYPE"))
    if "events" in doc and ablated != "events":
        raw = doc["events"]
        if isinstance(raw, list):
            events = tuple(_parse_event(f"$.events[{i}]", obj, violations) for i, obj in enumerate(raw))
        else:
            violations.append(SchemaViolation("$.events", f"expected array, got {type(raw).__name__}", "BAD_TYPE"))
    if "relationships" in doc and ablated != "relationships":
        raw = doc["relationships"]
        if isinstance(raw, list):
            relationships = tuple(
                _parse_relationship(f"$.relationships[{i}]", obj, violations) for i, obj in enumerate(raw)
            )
        else:
            violations.append(
                SchemaViolation("$.relationships", f"expected array, got {type(raw).__name__}", "BAD_TYPE")
            )
    if "outline" in doc and ablated != "outline":
        outline = _parse_outline("$.outline", doc["outline"], violations, ablated)

    if violations:
        raise FrameParseError(violations)

    structural = validate_units(entities, events, relationships, outline, ablated=ablated)
    if structural:
        raise FrameParseError(structural)
    if outline is None:
        outline = Outline("", "", {stage: () for stage in STAGES})
    return StoryFrame(entities=entities, events=events, relationships=relationships, outline=outline)


def from_canonical_json(data: bytes | str, ablated: str | None = None) -> StoryFrame:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"not valid UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from None
    return document_to_frame(doc, ablated=ablated)


def validate_partial_document(doc: Any) -> list[Violation]:
    """Violations for a document carrying any subset of the four units.

    Used while a frame is assembled step by step: each unit present is fully
    shape-checked, and cross-reference rules apply only between units that
    are both present. An empty list means the partial document is clean.
    """
    if not isinstance(doc, dict):
        return [SchemaViolation("$", f"expected object, got {type(doc).__name__}", "BAD_TYPE")]
    violations: list[Violation] = []
    for key in doc:
        if key not in UNITS:
            violations.append(SchemaViolation(f"$.{key}", f"unknown key {key!r}", "UNKNOWN_KEY"))

    entities: tuple[Entity, ...] | None = None
    events: tuple[Event, ...] | None = None
    relationships: tuple[Relationship, ...] | None = None
    outline: Outline | None = None

    if "entities" in doc:
        raw = doc["entities"]
        if isinstance(raw, list):
            entities = tuple(_parse_entity(f"$.entities[{i}]", obj, violations) for i, obj in enumerate(raw))
        else:
            violations.append(SchemaViolation("$.entities", f"expected array, got {type(raw).__name__}", "BAD_TYPE"))
    if "events" in doc:
        raw = doc["events"]
        if isinstance(raw, list):
            events = tuple(_parse_event(f"$.events[{i}]", obj, violations) for i, obj in enumerate(raw))
        else:
            violations.append(SchemaViolation("$.events", f"expected array, got {type(raw).__name__}", "BAD_TYPE"))
    if "relationships" in doc:
        raw = doc["relationships"]
        if isinstance(raw, list):
            relationships = tuple(
                _parse_relationship(f"$.relationships[{i}]", obj, violations) for i, obj in enumerate(raw)
            )
        else:
            violations.append(
                SchemaViolation("$.relationships", f"expected array, got {type(raw).__name__}", "BAD_TYPE")
            )
    if "outline" in doc:
        outline = _parse_outline("$.outline", doc["outline"], violations, None)

    if violations:
        return violations
    return validate_present_units(entities=entities, events=events, relationships=relationships, outline=outline)


# ---------------------------------------------------------------------------
# Unit ablation


def strip_unit_document(doc: dict[str, Any], unit: str) -> dict[str, Any]:
    """Remove one unit from a frame document, healing references to it.

    Idempotent: stripping an already-stripped document returns an equal
    document. The result validates under ``ablated=unit``.
    """
    if unit not in UNITS:
        raise ValueError(f"unknown unit {unit!r}")
    out = {k: copy.deepcopy(v) for k, v in doc.items() if k != unit}
    if unit == "events":
        for rel in out.get("relationships", []):
            if isinstance(rel, dict) and rel.get("event_id") is not None:
                rel["event_id"] = None
        outline = out.get("outline")
        if isinstance(outline, dict) and isinstance(outline.get("story_structure"), dict):
            outline["story_structure"] = {stage: [] for stage in STAGES}
    elif unit == "entities":
        for rel in out.get("relationships", []):
            if isinstance(rel, dict):
                rel["included_entities"] = []
                rel["source_entities"] = []
                rel["target_entities"] = []
    return out


def strip_unit(frame: StoryFrame, unit: str) -> dict[str, Any]:
    return strip_unit_document(frame_to_document(frame), unit)
