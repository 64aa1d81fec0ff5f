"""Story frame domain types and structural validation.

A story frame is built from four units: entities, events, relationships, and
an outline. Frames are immutable value objects; all mutation goes through
:class:`storyframe.builder.FrameBuilder`.

Validation here is shared by the canonical JSON parser and the builder: it
collects *every* violation instead of stopping at the first, so callers can
surface a complete report.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

EVENT_IMPORTANCE = ("low", "medium", "high")
RELATIONSHIP_STRENGTH = ("low", "medium", "high")
ACTION_DIRECTIONS = ("self", "unidirectional", "bidirectional")
STAGES = ("beginning", "middle", "climax", "ending")
UNITS = ("entities", "events", "relationships", "outline")

ENTITY_ID_RE = re.compile(r"^entity_[1-9][0-9]*$")
EVENT_ID_RE = re.compile(r"^event_[1-9][0-9]*$")
RELATIONSHIP_ID_RE = re.compile(r"^relationship_[1-9][0-9]*$")


@dataclass(frozen=True)
class SchemaViolation:
    """A value or shape that breaks the frame schema, located by JSON path."""

    path: str
    reason: str
    code: str = "SCHEMA_VIOLATION"
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class DanglingReference:
    """A reference to an id that does not exist in the frame."""

    path: str
    ref_id: str
    code: str = "DANGLING_REFERENCE"

    @property
    def reason(self) -> str:
        return f"reference to unknown id {self.ref_id!r}"

    @property
    def subjects(self) -> tuple[str, ...]:
        return (self.ref_id,)


Violation = SchemaViolation | DanglingReference


@dataclass(frozen=True)
class Entity:
    entity_id: str
    entity_name: str
    entity_identity: str
    entity_motivation: str
    personality_traits: tuple[str, ...]


@dataclass(frozen=True)
class Event:
    event_id: str
    event_time: str
    event_location: str
    event_details: str
    event_importance: str
    earlier_event: str | None = None
    later_event: str | None = None


@dataclass(frozen=True)
class Relationship:
    relationship_id: str
    included_entities: tuple[str, ...]
    source_entities: tuple[str, ...]
    target_entities: tuple[str, ...]
    emotional_type: str
    action_type: str
    action_direction: str
    relationship_strength: str
    relationship_evolution: str
    event_id: str | None = None


@dataclass(frozen=True)
class Outline:
    title: str
    story_description: str
    # stage name -> ordered event ids; always carries all four stages
    story_structure: dict[str, tuple[str, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class StoryFrame:
    entities: tuple[Entity, ...]
    events: tuple[Event, ...]
    relationships: tuple[Relationship, ...]
    outline: Outline


def empty_outline(title: str = "", story_description: str = "") -> Outline:
    return Outline(
        title=title,
        story_description=story_description,
        story_structure={stage: () for stage in STAGES},
    )


# ---------------------------------------------------------------------------
# Structural validation
#
# `ablated` relaxes the rules for documents produced by strip_unit: the named
# unit is gone, so cross-reference and shape rules that can only hold in its
# presence are skipped.


def validate_units(
    entities: tuple[Entity, ...],
    events: tuple[Event, ...],
    relationships: tuple[Relationship, ...],
    outline: Outline | None,
    ablated: str | None = None,
) -> list[Violation]:
    violations: list[Violation] = []
    violations.extend(_check_entity_unit(entities, ablated))
    violations.extend(_check_event_unit(events, ablated))
    entity_ids = {e.entity_id for e in entities}
    event_ids = {e.event_id for e in events}
    violations.extend(_check_relationship_unit(relationships, entity_ids, event_ids, ablated))
    if ablated != "events":
        violations.extend(_check_chain(events))
    if outline is not None:
        chain_pos = _chain_positions(events)
        violations.extend(_check_outline(outline, event_ids, chain_pos, ablated))
    elif ablated != "outline":
        violations.append(SchemaViolation("$.outline", "outline is required", "MISSING_UNIT"))
    return violations


def _check_entity_unit(entities, ablated) -> list[Violation]:
    out: list[Violation] = []
    seen: dict[str, int] = {}
    for i, ent in enumerate(entities):
        path = f"$.entities[{i}]"
        if not ENTITY_ID_RE.match(ent.entity_id):
            out.append(SchemaViolation(f"{path}.entity_id", f"bad entity id {ent.entity_id!r}", "ID_FORMAT"))
        elif ent.entity_id in seen:
            out.append(
                SchemaViolation(
                    f"{path}.entity_id",
                    f"duplicate id {ent.entity_id!r} (first at index {seen[ent.entity_id]})",
                    "DUPLICATE_ID",
                    subjects=(ent.entity_id,),
                )
            )
        else:
            seen[ent.entity_id] = i
        if not ent.entity_name:
            out.append(SchemaViolation(f"{path}.entity_name", "entity_name must be non-empty", "EMPTY_FIELD"))
        if not ent.entity_identity:
            out.append(SchemaViolation(f"{path}.entity_identity", "entity_identity must be non-empty", "EMPTY_FIELD"))
        if len(ent.personality_traits) < 1:
            out.append(
                SchemaViolation(
                    f"{path}.personality_traits",
                    "at least one personality trait is required",
                    "EMPTY_TRAITS",
                )
            )
    return out


def _check_event_unit(events, ablated) -> list[Violation]:
    out: list[Violation] = []
    seen: dict[str, int] = {}
    for i, ev in enumerate(events):
        path = f"$.events[{i}]"
        if not EVENT_ID_RE.match(ev.event_id):
            out.append(SchemaViolation(f"{path}.event_id", f"bad event id {ev.event_id!r}", "ID_FORMAT"))
        elif ev.event_id in seen:
            out.append(
                SchemaViolation(
                    f"{path}.event_id",
                    f"duplicate id {ev.event_id!r} (first at index {seen[ev.event_id]})",
                    "DUPLICATE_ID",
                    subjects=(ev.event_id,),
                )
            )
        else:
            seen[ev.event_id] = i
        if ev.event_importance not in EVENT_IMPORTANCE:
            out.append(
                SchemaViolation(
                    f"{path}.event_importance",
                    f"event_importance must be one of {list(EVENT_IMPORTANCE)}, got {ev.event_importance!r}",
                    "BAD_ENUM",
                )
            )
    return out


def _check_chain(events) -> list[Violation]:
    """Earlier/later pointers must form one consistent acyclic linear chain."""
    out: list[Violation] = []
    by_id = {ev.event_id: ev for ev in events}
    index = {ev.event_id: i for i, ev in enumerate(events)}
    consistent = True
    for i, ev in enumerate(events):
        path = f"$.events[{i}]"
        for attr, ref in (("earlier_event", ev.earlier_event), ("later_event", ev.later_event)):
            if ref is not None and ref not in by_id:
                out.append(DanglingReference(f"{path}.{attr}", ref))
                consistent = False
        if ev.later_event in by_id and by_id[ev.later_event].earlier_event != ev.event_id:
            out.append(
                SchemaViolation(
                    f"{path}.later_event",
                    f"{ev.event_id} lists {ev.later_event} as later, but it does not point back",
                    "CHAIN_INCONSISTENT",
                    subjects=(ev.event_id, ev.later_event),
                )
            )
            consistent = False
        if ev.earlier_event in by_id and by_id[ev.earlier_event].later_event != ev.event_id:
            out.append(
                SchemaViolation(
                    f"{path}.earlier_event",
                    f"{ev.event_id} lists {ev.earlier_event} as earlier, but it does not point forward",
                    "CHAIN_INCONSISTENT",
                    subjects=(ev.event_id, ev.earlier_event),
                )
            )
            consistent = False
        if ev.earlier_event == ev.event_id or ev.later_event == ev.event_id:
            out.append(
                SchemaViolation(f"{path}", f"{ev.event_id} links to itself", "CHAIN_CYCLE", subjects=(ev.event_id,))
            )
            consistent = False
    if not consistent or not events:
        return out

    heads = [ev for ev in events if ev.earlier_event is None]
    if not heads:
        out.append(
            SchemaViolation(
                "$.events",
                "event chain has no first event (cycle)",
                "CHAIN_CYCLE",
                subjects=tuple(sorted(by_id)),
            )
        )
        return out
    if len(heads) > 1:
        out.append(
            SchemaViolation(
                "$.events",
                f"event chain is not a single sequence: {len(heads)} events have no earlier_event",
                "CHAIN_DISCONNECTED",
                subjects=tuple(sorted(h.event_id for h in heads)),
            )
        )
        return out
    reached = []
    seen_ids: set[str] = set()
    cur: Event | None = heads[0]
    while cur is not None:
        if cur.event_id in seen_ids:
            out.append(
                SchemaViolation("$.events", "event chain contains a cycle", "CHAIN_CYCLE", subjects=(cur.event_id,))
            )
            return out
        seen_ids.add(cur.event_id)
        reached.append(cur.event_id)
        cur = by_id[cur.later_event] if cur.later_event else None
    if len(reached) != len(events):
        missing = sorted(set(by_id) - seen_ids, key=lambda eid: index[eid])
        out.append(
            SchemaViolation(
                "$.events",
                f"event chain does not cover all events; unreachable: {missing}",
                "CHAIN_DISCONNECTED",
                subjects=tuple(missing),
            )
        )
    return out


def _chain_positions(events) -> dict[str, int]:
    """Position of each event along the chain; document order as fallback."""
    by_id = {ev.event_id: ev for ev in events}
    heads = [ev for ev in events if ev.earlier_event is None]
    if len(heads) == 1:
        pos: dict[str, int] = {}
        cur: Event | None = heads[0]
        i = 0
        while cur is not None and cur.event_id not in pos:
            pos[cur.event_id] = i
            i += 1
            cur = by_id.get(cur.later_event) if cur.later_event else None
        if len(pos) == len(events):
            return pos
    return {ev.event_id: i for i, ev in enumerate(events)}


def _check_relationship_unit(relationships, entity_ids, event_ids, ablated) -> list[Violation]:
    # entity_ids/event_ids of None mean that unit is not available for
    # cross-checking (partial validation); reference checks are skipped.
    out: list[Violation] = []
    seen: dict[str, int] = {}
    entities_gone = ablated == "entities"
    events_gone = ablated == "events"
    for i, rel in enumerate(relationships):
        path = f"$.relationships[{i}]"
        if not RELATIONSHIP_ID_RE.match(rel.relationship_id):
            out.append(
                SchemaViolation(f"{path}.relationship_id", f"bad relationship id {rel.relationship_id!r}", "ID_FORMAT")
            )
        elif rel.relationship_id in seen:
            out.append(
                SchemaViolation(
                    f"{path}.relationship_id",
                    f"duplicate id {rel.relationship_id!r} (first at index {seen[rel.relationship_id]})",
                    "DUPLICATE_ID",
                    subjects=(rel.relationship_id,),
                )
            )
        else:
            seen[rel.relationship_id] = i
        if rel.action_direction not in ACTION_DIRECTIONS:
            out.append(
                SchemaViolation(
                    f"{path}.action_direction",
                    f"action_direction must be one of {list(ACTION_DIRECTIONS)}, got {rel.action_direction!r}",
                    "BAD_ENUM",
                )
            )
        if rel.relationship_strength not in RELATIONSHIP_STRENGTH:
            out.append(
                SchemaViolation(
                    f"{path}.relationship_strength",
                    f"relationship_strength must be one of {list(RELATIONSHIP_STRENGTH)}, "
                    f"got {rel.relationship_strength!r}",
                    "BAD_ENUM",
                )
            )
        if entity_ids is not None:
            for attr, ids in (
                ("included_entities", rel.included_entities),
                ("source_entities", rel.source_entities),
                ("target_entities", rel.target_entities),
            ):
                for j, eid in enumerate(ids):
                    if eid not in entity_ids:
                        out.append(DanglingReference(f"{path}.{attr}[{j}]", eid))
        if rel.event_id is not None:
            if events_gone:
                out.append(
                    SchemaViolation(f"{path}.event_id", "event reference must be null without events", "STALE_REFERENCE")
                )
            elif event_ids is not None and rel.event_id not in event_ids:
                out.append(DanglingReference(f"{path}.event_id", rel.event_id))
        if entities_gone:
            # Member lists were emptied by the ablation; shape rules cannot hold.
            continue
        if not rel.included_entities:
            out.append(
                SchemaViolation(f"{path}.included_entities", "included_entities must be non-empty", "EMPTY_MEMBERS")
            )
        if not rel.source_entities:
            out.append(SchemaViolation(f"{path}.source_entities", "source_entities must be non-empty", "EMPTY_MEMBERS"))
        if not rel.target_entities:
            out.append(SchemaViolation(f"{path}.target_entities", "target_entities must be non-empty", "EMPTY_MEMBERS"))
        if set(rel.source_entities) | set(rel.target_entities) != set(rel.included_entities):
            out.append(
                SchemaViolation(
                    f"{path}.included_entities",
                    "included_entities must equal the union of source_entities and target_entities",
                    "MEMBER_MISMATCH",
                    subjects=(rel.relationship_id,),
                )
            )
        is_self_shape = (
            len(set(rel.included_entities)) == 1
            and set(rel.source_entities) == set(rel.target_entities) == set(rel.included_entities)
        )
        if rel.action_direction == "self" and not is_self_shape:
            out.append(
                SchemaViolation(
                    f"{path}.action_direction",
                    "self relationships must have exactly one entity as both source and target",
                    "DIRECTION_INVALID",
                    subjects=(rel.relationship_id,),
                )
            )
        if rel.action_direction != "self" and is_self_shape and rel.included_entities:
            out.append(
                SchemaViolation(
                    f"{path}.action_direction",
                    "a single entity acting on itself must use action_direction 'self'",
                    "DIRECTION_INVALID",
                    subjects=(rel.relationship_id,),
                )
            )
    return out


def _check_outline(outline, event_ids, chain_pos, ablated) -> list[Violation]:
    out: list[Violation] = []
    if not outline.title:
        out.append(SchemaViolation("$.outline.title", "title must be non-empty", "EMPTY_FIELD"))
    structure = outline.story_structure
    for stage in STAGES:
        if stage not in structure:
            out.append(
                SchemaViolation(f"$.outline.story_structure.{stage}", f"missing stage {stage!r}", "MISSING_STAGE")
            )
    events_gone = ablated == "events"
    assigned: dict[str, str] = {}
    for stage in STAGES:
        for j, eid in enumerate(structure.get(stage, ())):
            path = f"$.outline.story_structure.{stage}[{j}]"
            if events_gone or (event_ids is not None and eid not in event_ids):
                out.append(DanglingReference(path, eid))
                continue
            if eid in assigned:
                out.append(
                    SchemaViolation(
                        path,
                        f"{eid} already assigned to stage {assigned[eid]!r}",
                        "OUTLINE_DUPLICATE",
                        subjects=(eid,),
                    )
                )
            else:
                assigned[eid] = stage
    if not events_gone and event_ids is not None:
        unassigned = sorted(event_ids - set(assigned), key=lambda eid: chain_pos.get(eid, 0))
        if unassigned:
            out.append(
                SchemaViolation(
                    "$.outline.story_structure",
                    f"events missing from the outline: {unassigned}",
                    "OUTLINE_INCOMPLETE",
                    subjects=tuple(unassigned),
                )
            )
        # Chain order may never contradict stage order.
        stage_index = {stage: i for i, stage in enumerate(STAGES)}
        placed = sorted(assigned, key=lambda eid: chain_pos.get(eid, 0))
        for earlier, later in zip(placed, placed[1:]):
            if stage_index[assigned[earlier]] > stage_index[assigned[later]]:
                out.append(
                    SchemaViolation(
                        "$.outline.story_structure",
                        f"{earlier} precedes {later} in the event chain but is placed in a later stage",
                        "STAGE_ORDER_CONFLICT",
                        subjects=(earlier, later),
                    )
                )
    return out


def validate_frame_units(frame: StoryFrame, ablated: str | None = None) -> list[Violation]:
    return validate_units(frame.entities, frame.events, frame.relationships, frame.outline, ablated)


def validate_present_units(
    entities: tuple[Entity, ...] | None = None,
    events: tuple[Event, ...] | None = None,
    relationships: tuple[Relationship, ...] | None = None,
    outline: Outline | None = None,
) -> list[Violation]:
    """Validate only the units that are present (None = not extracted yet).

    Cross-reference checks run only when both sides are available, so a
    partially assembled frame is judged on what it actually contains.
    """
    out: list[Violation] = []
    if entities is not None:
        out.extend(_check_entity_unit(entities, None))
    if events is not None:
        out.extend(_check_event_unit(events, None))
        out.extend(_check_chain(events))
    if relationships is not None:
        out.extend(
            _check_relationship_unit(
                relationships,
                {e.entity_id for e in entities} if entities is not None else None,
                {e.event_id for e in events} if events is not None else None,
                None,
            )
        )
    if outline is not None:
        out.extend(
            _check_outline(
                outline,
                {e.event_id for e in events} if events is not None else None,
                _chain_positions(events) if events is not None else {},
                None,
            )
        )
    return out
