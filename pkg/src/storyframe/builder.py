"""Interactive, op-by-op construction of story frames.

The builder mirrors what a canvas UI does: entities and events are created
and edited freely, entities are attached to events, relationships connect
attached entities within an event, events are chained into one linear
sequence and assigned to outline stages. Every op either succeeds atomically
or raises without changing state. ``commit`` runs full structural validation
and returns an immutable :class:`StoryFrame`; an invalid working state never
commits.

Ids are assigned densely from 1 in creation order and never reused, so a
frame that has seen removals may legally carry gaps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import (
    BranchDetected,
    CycleDetected,
    InvalidAttribute,
    NotAttached,
    SelfRelationship,
    UnknownId,
    ValidationFailed,
)
from .model import (
    ACTION_DIRECTIONS,
    EVENT_IMPORTANCE,
    RELATIONSHIP_STRENGTH,
    STAGES,
    Entity,
    Event,
    Outline,
    Relationship,
    StoryFrame,
    validate_units,
)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[tuple[str, str, tuple[str, ...]], ...] = ()
    # each violation: (code, message, subject ids)


def _require_text(name: str, value: Any) -> str:
    if not isinstance(value, str) or not value.strip():
        raise InvalidAttribute(f"{name} must be a non-empty string")
    return value


def _require_choice(name: str, value: Any, choices: tuple[str, ...]) -> str:
    if value not in choices:
        raise InvalidAttribute(f"{name} must be one of {list(choices)}, got {value!r}")
    return value


def _dedup(ids: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for i in ids:
        if i not in seen:
            seen.add(i)
            out.append(i)
    return out


def _strip_member(rel: dict[str, Any], entity_id: str) -> bool:
    """Drop one entity from a relationship; False once a side empties.

    A group relationship can collapse onto one entity on both sides, and a
    single entity acting on itself must carry the self direction.
    """
    for key in ("included_entities", "source_entities", "target_entities"):
        rel[key] = [e for e in rel[key] if e != entity_id]
    if not rel["source_entities"] or not rel["target_entities"]:
        return False
    if rel["source_entities"] == rel["target_entities"] and len(rel["source_entities"]) == 1:
        rel["action_direction"] = "self"
    return True


class FrameBuilder:
    """Mutable working copy of a frame plus the graph bookkeeping around it."""

    def __init__(self) -> None:
        self._entities: dict[str, dict[str, Any]] = {}
        self._events: dict[str, dict[str, Any]] = {}
        self._relationships: dict[str, dict[str, Any]] = {}
        self._attached: dict[str, set[str]] = {}  # event_id -> entity ids on its canvas
        self._next: dict[str, str] = {}  # event_id -> later event
        self._prev: dict[str, str] = {}  # event_id -> earlier event
        self._stage_of: dict[str, str] = {}  # event_id -> stage name
        self._title = ""
        self._description = ""
        self._counters = {"entity": 0, "event": 0, "relationship": 0}
        self._event_order: list[str] = []  # creation order, for stable serialization

    # -- entities ----------------------------------------------------------

    def create_entity(self, name: str, identity: str, motivation: str = "", traits: Iterable[str] = ()) -> str:
        _require_text("entity_name", name)
        _require_text("entity_identity", identity)
        trait_list = [t for t in traits if isinstance(t, str) and t.strip()]
        if not trait_list:
            raise InvalidAttribute("at least one personality trait is required")
        self._counters["entity"] += 1
        eid = f"entity_{self._counters['entity']}"
        self._entities[eid] = {
            "entity_id": eid,
            "entity_name": name,
            "entity_identity": identity,
            "entity_motivation": motivation,
            "personality_traits": trait_list,
        }
        return eid

    def edit_entity(self, entity_id: str, **attrs: Any) -> None:
        ent = self._entities.get(entity_id)
        if ent is None:
            raise UnknownId(entity_id)
        for key, value in attrs.items():
            if key in ("entity_name", "entity_identity"):
                ent[key] = _require_text(key, value)
            elif key == "entity_motivation":
                if not isinstance(value, str):
                    raise InvalidAttribute("entity_motivation must be a string")
                ent[key] = value
            elif key == "personality_traits":
                trait_list = [t for t in value if isinstance(t, str) and t.strip()]
                if not trait_list:
                    raise InvalidAttribute("at least one personality trait is required")
                ent[key] = trait_list
            else:
                raise InvalidAttribute(f"unknown entity attribute {key!r}")

    def remove_entity(self, entity_id: str) -> None:
        if entity_id not in self._entities:
            raise UnknownId(entity_id)
        del self._entities[entity_id]
        for members in self._attached.values():
            members.discard(entity_id)
        for rid in list(self._relationships):
            if not _strip_member(self._relationships[rid], entity_id):
                del self._relationships[rid]

    # -- events ------------------------------------------------------------

    def create_event(self, time: str, location: str, details: str, importance: str = "medium") -> str:
        _require_text("event_details", details)
        _require_choice("event_importance", importance, EVENT_IMPORTANCE)
        if not isinstance(time, str) or not isinstance(location, str):
            raise InvalidAttribute("event_time and event_location must be strings")
        self._counters["event"] += 1
        eid = f"event_{self._counters['event']}"
        self._events[eid] = {
            "event_id": eid,
            "event_time": time,
            "event_location": location,
            "event_details": details,
            "event_importance": importance,
        }
        self._attached[eid] = set()
        self._event_order.append(eid)
        return eid

    def edit_event(self, event_id: str, **attrs: Any) -> None:
        ev = self._events.get(event_id)
        if ev is None:
            raise UnknownId(event_id)
        for key, value in attrs.items():
            if key == "event_details":
                ev[key] = _require_text(key, value)
            elif key in ("event_time", "event_location"):
                if not isinstance(value, str):
                    raise InvalidAttribute(f"{key} must be a string")
                ev[key] = value
            elif key == "event_importance":
                ev[key] = _require_choice(key, value, EVENT_IMPORTANCE)
            else:
                raise InvalidAttribute(f"unknown event attribute {key!r}")

    def remove_event(self, event_id: str) -> None:
        if event_id not in self._events:
            raise UnknownId(event_id)
        # Splice the chain around the removed event.
        prev = self._prev.pop(event_id, None)
        nxt = self._next.pop(event_id, None)
        if prev is not None:
            del self._next[prev]
        if nxt is not None:
            del self._prev[nxt]
        if prev is not None and nxt is not None:
            self._next[prev] = nxt
            self._prev[nxt] = prev
        del self._events[event_id]
        del self._attached[event_id]
        self._event_order.remove(event_id)
        self._stage_of.pop(event_id, None)
        for rid in list(self._relationships):
            if self._relationships[rid]["event_id"] == event_id:
                del self._relationships[rid]

    def drop_event(self, event_id: str) -> str:
        # Canvas drop of an existing event is a placement gesture; the graph
        # does not change until the event is linked or staged.
        if event_id not in self._events:
            raise UnknownId(event_id)
        return event_id

    # -- attachment --------------------------------------------------------

    def attach_entity(self, entity_id: str, event_id: str) -> None:
        if entity_id not in self._entities:
            raise UnknownId(entity_id)
        if event_id not in self._events:
            raise UnknownId(event_id)
        self._attached[event_id].add(entity_id)

    def detach_entity(self, entity_id: str, event_id: str) -> None:
        if entity_id not in self._entities:
            raise UnknownId(entity_id)
        if event_id not in self._events:
            raise UnknownId(event_id)
        self._attached[event_id].discard(entity_id)
        for rid in list(self._relationships):
            rel = self._relationships[rid]
            if rel["event_id"] != event_id:
                continue
            if entity_id not in rel["included_entities"]:
                continue
            if not _strip_member(rel, entity_id):
                del self._relationships[rid]

    def attached_entities(self, event_id: str) -> tuple[str, ...]:
        if event_id not in self._events:
            raise UnknownId(event_id)
        return tuple(sorted(self._attached[event_id], key=_id_number))

    # -- relationships -----------------------------------------------------

    def connect_relationship(
        self,
        sources: Iterable[str],
        targets: Iterable[str],
        emotional_type: str,
        action_type: str,
        strength: str = "medium",
        evolution: str = "",
        event_id: str | None = None,
    ) -> str:
        src = _dedup(sources)
        tgt = _dedup(targets)
        if not src or not tgt:
            raise InvalidAttribute("a relationship needs at least one source and one target")
        for eid in src + tgt:
            if eid not in self._entities:
                raise UnknownId(eid)
        _require_text("emotional_type", emotional_type)
        _require_text("action_type", action_type)
        _require_choice("relationship_strength", strength, RELATIONSHIP_STRENGTH)
        if event_id is not None:
            if event_id not in self._events:
                raise UnknownId(event_id)
            for eid in src + tgt:
                if eid not in self._attached[event_id]:
                    raise NotAttached(eid, event_id)
        if set(src) == set(tgt) and len(set(src)) == 1:
            direction = "self"
        else:
            direction = "unidirectional"
        self._counters["relationship"] += 1
        rid = f"relationship_{self._counters['relationship']}"
        self._relationships[rid] = {
            "relationship_id": rid,
            "included_entities": _dedup(src + tgt),
            "source_entities": src,
            "target_entities": tgt,
            "emotional_type": emotional_type,
            "action_type": action_type,
            "action_direction": direction,
            "relationship_strength": strength,
            "relationship_evolution": evolution,
            "event_id": event_id,
        }
        return rid

    def edit_relationship(self, relationship_id: str, **attrs: Any) -> None:
        rel = self._relationships.get(relationship_id)
        if rel is None:
            raise UnknownId(relationship_id)
        for key, value in attrs.items():
            if key in ("emotional_type", "action_type"):
                rel[key] = _require_text(key, value)
            elif key == "relationship_strength":
                rel[key] = _require_choice(key, value, RELATIONSHIP_STRENGTH)
            elif key == "relationship_evolution":
                if not isinstance(value, str):
                    raise InvalidAttribute("relationship_evolution must be a string")
                rel[key] = value
            else:
                raise InvalidAttribute(f"unknown relationship attribute {key!r}")

    def set_bidirectional(self, relationship_id: str, bidirectional: bool = True) -> None:
        rel = self._relationships.get(relationship_id)
        if rel is None:
            raise UnknownId(relationship_id)
        if rel["action_direction"] == "self":
            raise SelfRelationship(f"{relationship_id} connects an entity to itself and has no direction to flip")
        if bidirectional:
            rel["action_direction"] = "bidirectional"
            merged = _dedup(rel["source_entities"] + rel["target_entities"])
            rel["source_entities"] = list(merged)
            rel["target_entities"] = list(merged)
            rel["included_entities"] = list(merged)
        else:
            rel["action_direction"] = "unidirectional"

    def remove_relationship(self, relationship_id: str) -> None:
        if relationship_id not in self._relationships:
            raise UnknownId(relationship_id)
        del self._relationships[relationship_id]

    # -- event chain -------------------------------------------------------

    def link_events(self, earlier: str, later: str) -> None:
        if earlier not in self._events:
            raise UnknownId(earlier)
        if later not in self._events:
            raise UnknownId(later)
        if earlier == later:
            raise CycleDetected(f"{earlier} cannot follow itself")
        if self._next.get(earlier) == later:
            return  # already linked exactly like this
        if earlier in self._next:
            raise BranchDetected(f"{earlier} already has a later event ({self._next[earlier]})")
        if later in self._prev:
            raise BranchDetected(f"{later} already has an earlier event ({self._prev[later]})")
        # Walking forward from `later` must not reach `earlier`.
        cur: str | None = later
        while cur is not None:
            if cur == earlier:
                raise CycleDetected(f"linking {earlier} before {later} would close a cycle")
            cur = self._next.get(cur)
        self._next[earlier] = later
        self._prev[later] = earlier

    def unlink_events(self, earlier: str, later: str) -> None:
        if self._next.get(earlier) != later:
            raise UnknownId(f"{earlier}->{later}")
        del self._next[earlier]
        del self._prev[later]

    def chain(self) -> tuple[str, ...]:
        """Event ids in chain order; creation order for unlinked events."""
        ordered: list[str] = []
        seen: set[str] = set()
        for eid in self._event_order:
            if eid in seen or eid in self._prev:
                continue
            cur: str | None = eid
            while cur is not None and cur not in seen:
                ordered.append(cur)
                seen.add(cur)
                cur = self._next.get(cur)
        # Any event stranded inside a malformed chain still serializes.
        for eid in self._event_order:
            if eid not in seen:
                ordered.append(eid)
                seen.add(eid)
        return tuple(ordered)

    # -- outline -----------------------------------------------------------

    def assign_stage(self, event_id: str, stage: str) -> None:
        if event_id not in self._events:
            raise UnknownId(event_id)
        _require_choice("stage", stage, STAGES)
        self._stage_of[event_id] = stage

    def unassign_stage(self, event_id: str) -> None:
        if event_id not in self._events:
            raise UnknownId(event_id)
        self._stage_of.pop(event_id, None)

    def set_outline(self, title: str, description: str = "") -> None:
        _require_text("title", title)
        if not isinstance(description, str):
            raise InvalidAttribute("story_description must be a string")
        self._title = title
        self._description = description

    # -- assembly ----------------------------------------------------------

    def draft(self) -> StoryFrame:
        """Current working state as a frame, with no validity guarantee."""
        return self._assemble()

    def _assemble(self) -> StoryFrame:
        order = self.chain()
        pos = {eid: i for i, eid in enumerate(order)}
        entities = tuple(
            Entity(
                entity_id=e["entity_id"],
                entity_name=e["entity_name"],
                entity_identity=e["entity_identity"],
                entity_motivation=e["entity_motivation"],
                personality_traits=tuple(e["personality_traits"]),
            )
            for e in sorted(self._entities.values(), key=lambda e: _id_number(e["entity_id"]))
        )
        events = tuple(
            Event(
                event_id=eid,
                event_time=self._events[eid]["event_time"],
                event_location=self._events[eid]["event_location"],
                event_details=self._events[eid]["event_details"],
                event_importance=self._events[eid]["event_importance"],
                earlier_event=self._prev.get(eid),
                later_event=self._next.get(eid),
            )
            for eid in order
        )
        relationships = tuple(
            Relationship(
                relationship_id=r["relationship_id"],
                included_entities=tuple(r["included_entities"]),
                source_entities=tuple(r["source_entities"]),
                target_entities=tuple(r["target_entities"]),
                emotional_type=r["emotional_type"],
                action_type=r["action_type"],
                action_direction=r["action_direction"],
                relationship_strength=r["relationship_strength"],
                relationship_evolution=r["relationship_evolution"],
                event_id=r["event_id"],
            )
            for r in sorted(self._relationships.values(), key=lambda r: _id_number(r["relationship_id"]))
        )
        structure = {
            stage: tuple(eid for eid in order if self._stage_of.get(eid) == stage) for stage in STAGES
        }
        outline = Outline(title=self._title, story_description=self._description, story_structure=structure)
        return StoryFrame(entities=entities, events=events, relationships=relationships, outline=outline)

    def validate_frame(self) -> ValidationReport:
        frame = self._assemble()
        violations = validate_units(frame.entities, frame.events, frame.relationships, frame.outline)
        return ValidationReport(
            ok=not violations,
            violations=tuple((v.code, v.reason, tuple(v.subjects)) for v in violations),
        )

    def commit(self) -> StoryFrame:
        frame = self._assemble()
        violations = validate_units(frame.entities, frame.events, frame.relationships, frame.outline)
        if violations:
            report = ValidationReport(
                ok=False,
                violations=tuple((v.code, v.reason, tuple(v.subjects)) for v in violations),
            )
            raise ValidationFailed(report)
        return frame

    # -- persistence -------------------------------------------------------

    def to_state(self) -> dict[str, Any]:
        return {
            "entities": {k: dict(v, personality_traits=list(v["personality_traits"])) for k, v in self._entities.items()},
            "events": {k: dict(v) for k, v in self._events.items()},
            "relationships": {
                k: dict(
                    v,
                    included_entities=list(v["included_entities"]),
                    source_entities=list(v["source_entities"]),
                    target_entities=list(v["target_entities"]),
                )
                for k, v in self._relationships.items()
            },
            "attached": {k: sorted(v, key=_id_number) for k, v in self._attached.items()},
            "next": dict(self._next),
            "stage_of": dict(self._stage_of),
            "title": self._title,
            "description": self._description,
            "counters": dict(self._counters),
            "event_order": list(self._event_order),
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "FrameBuilder":
        b = cls()
        b._entities = {k: dict(v) for k, v in state["entities"].items()}
        b._events = {k: dict(v) for k, v in state["events"].items()}
        b._relationships = {k: dict(v) for k, v in state["relationships"].items()}
        b._attached = {k: set(v) for k, v in state["attached"].items()}
        b._next = dict(state["next"])
        b._prev = {later: earlier for earlier, later in b._next.items()}
        b._stage_of = dict(state["stage_of"])
        b._title = state["title"]
        b._description = state["description"]
        b._counters = dict(state["counters"])
        b._event_order = list(state["event_order"])
        return b

    @classmethod
    def from_frame(cls, frame: StoryFrame) -> "FrameBuilder":
        """Rehydrate a builder from a committed frame for further editing."""
        b = cls()
        for ent in frame.entities:
            b._entities[ent.entity_id] = {
                "entity_id": ent.entity_id,
                "entity_name": ent.entity_name,
                "entity_identity": ent.entity_identity,
                "entity_motivation": ent.entity_motivation,
                "personality_traits": list(ent.personality_traits),
            }
        for ev in frame.events:
            b._events[ev.event_id] = {
                "event_id": ev.event_id,
                "event_time": ev.event_time,
                "event_location": ev.event_location,
                "event_details": ev.event_details,
                "event_importance": ev.event_importance,
            }
            b._attached[ev.event_id] = set()
            b._event_order.append(ev.event_id)
            if ev.later_event:
                b._next[ev.event_id] = ev.later_event
            if ev.earlier_event:
                b._prev[ev.event_id] = ev.earlier_event
        for rel in frame.relationships:
            b._relationships[rel.relationship_id] = {
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
            if rel.event_id:
                for eid in rel.included_entities:
                    b._attached.setdefault(rel.event_id, set()).add(eid)
        for stage, ids in frame.outline.story_structure.items():
            for eid in ids:
                b._stage_of[eid] = stage
        b._title = frame.outline.title
        b._description = frame.outline.story_description
        for kind, ids in (
            ("entity", frame.entities),
            ("event", frame.events),
            ("relationship", frame.relationships),
        ):
            nums = [_id_number(getattr(u, f"{kind}_id")) for u in ids]
            b._counters[kind] = max(nums, default=0)
        return b


def _id_number(uid: str) -> int:
    try:
        return int(uid.rsplit("_", 1)[1])
    except (IndexError, ValueError):
        return 0
