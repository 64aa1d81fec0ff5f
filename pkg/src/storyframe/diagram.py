"""Render a frame as a node/edge diagram document.

The diagram is what a canvas front end draws: entity nodes, event boxes,
relationship edges (with direction), chain arrows between events, and stage
lanes. Output is plain JSON-compatible data, deterministic for a given frame.
"""

from __future__ import annotations

from typing import Any

from .model import STAGES, StoryFrame


def build_diagram(frame: StoryFrame) -> dict[str, Any]:
    nodes = [
        {
            "id": ent.entity_id,
            "kind": "entity",
            "label": ent.entity_name,
            "sublabel": ent.entity_identity,
        }
        for ent in frame.entities
    ]
    boxes = [
        {
            "id": ev.event_id,
            "kind": "event",
            "label": ev.event_details,
            "time": ev.event_time,
            "location": ev.event_location,
            "importance": ev.event_importance,
            "stage": _stage_of(frame, ev.event_id),
        }
        for ev in frame.events
    ]
    edges: list[dict[str, Any]] = []
    for rel in frame.relationships:
        edges.append(
            {
                "id": rel.relationship_id,
                "kind": "relationship",
                "sources": list(rel.source_entities),
                "targets": list(rel.target_entities),
                "direction": rel.action_direction,
                "label": rel.action_type,
                "emotion": rel.emotional_type,
                "strength": rel.relationship_strength,
                "event": rel.event_id,
            }
        )
    for ev in frame.events:
        if ev.later_event:
            edges.append(
                {
                    "id": f"chain_{ev.event_id}_{ev.later_event}",
                    "kind": "sequence",
                    "sources": [ev.event_id],
                    "targets": [ev.later_event],
                    "direction": "unidirectional",
                    "label": "then",
                }
            )
    lanes = [
        {"stage": stage, "events": list(frame.outline.story_structure.get(stage, ()))} for stage in STAGES
    ]
    return {
        "title": frame.outline.title,
        "nodes": nodes,
        "boxes": boxes,
        "edges": edges,
        "lanes": lanes,
    }


def _stage_of(frame: StoryFrame, event_id: str) -> str | None:
    for stage, ids in frame.outline.story_structure.items():
        if event_id in ids:
            return stage
    return None
