"""
Building a story frame by hand
==============================

A frame holds four units: entities, events, relationships, and an outline.
This script assembles one through the builder, watches validation flip from
failing to clean, and prints the canonical JSON that every other tool in the
package consumes.
"""

from storyframe import FrameBuilder, build_diagram, to_canonical_json

b = FrameBuilder()

# entities get dense ids: entity_1, entity_2, ...
lena = b.create_entity("Lena", "lighthouse keeper", "keep the lamp lit", ["steadfast", "wry"])
marko = b.create_entity("Marko", "fisherman", "bring the catch home", ["superstitious"])
print("created", lena, "and", marko)

# events carry time, location, details, importance
storm = b.create_event("midnight", "the headland", "A storm cuts the power to the lamp.", "high")
rescue = b.create_event("before dawn", "the shallows", "Marko rows out toward the rocks.", "medium")

# an entity must be attached to an event before a relationship can use it there
b.attach_entity(lena, storm)
b.attach_entity(lena, rescue)
b.attach_entity(marko, rescue)

# events form a single chain, earliest first
b.link_events(storm, rescue)

# halfway through, the frame is not yet valid: no stages, no outline
report = b.validate_frame()
print("valid yet?", report.ok)
for code, message, subjects in report.violations:
    print("  violation:", code, "->", message)

# relationships point from sources to targets at one event
rel = b.connect_relationship(
    [lena], [marko],
    emotional_type="worry",
    action_type="signals",
    strength="high",
    evolution="fear gives way to trust",
    event_id=rescue,
)
# both of them act on each other, so flip the direction switch
b.set_bidirectional(rel)

b.assign_stage(storm, "beginning")
b.assign_stage(rescue, "ending")
b.set_outline("The Dark Lamp", "A keeper and a fisherman outlast one storm.")

# commit only succeeds once every check passes
frame = b.commit()
print("valid now?", b.validate_frame().ok)
print("direction of", rel, "is", frame.relationships[0].action_direction)

# canonical JSON is byte-stable: fixed key order, two-space indent
print()
print(to_canonical_json(frame).decode("utf-8"))

# the diagram view feeds canvas renderers: entity nodes, event boxes, edges
diagram = build_diagram(frame)
print(
    "diagram:",
    len(diagram["nodes"]), "entity nodes,",
    len(diagram["boxes"]), "event boxes,",
    len(diagram["edges"]), "edges",
)
