"""
Parsing a story into a frame, then writing it back out
======================================================

The parse chain asks a chat model for one unit at a time (entities, events,
outline, relationships), validating and repairing each reply before moving
on. Every later request carries the units extracted so far. A real backend
would be an OpenAI-compatible HTTP endpoint; here a scripted mock stands in
so the run is reproducible offline.
"""

import json

from storyframe import FrameBuilder, MockChatClient, frame_to_document, generate_story, run_parse_chain, to_canonical_json

story = (
    "At midnight a storm cut the power to the lamp on the headland. "
    "Lena, the keeper, hung a storm lantern in the gallery while Marko "
    "rowed for the shallows. Before dawn he followed her small light home."
)

# the mock replies come from a hand-built frame for that story
gold = FrameBuilder()
gold.create_entity("Lena", "lighthouse keeper", "keep the lamp lit", ["steadfast"])
gold.create_entity("Marko", "fisherman", "bring the catch home", ["superstitious"])
gold.create_event("midnight", "the headland", "A storm cuts the power to the lamp.", "high")
gold.create_event("before dawn", "the shallows", "Marko follows the lantern home.", "medium")
gold.attach_entity("entity_1", "event_1")
gold.attach_entity("entity_1", "event_2")
gold.attach_entity("entity_2", "event_2")
gold.link_events("event_1", "event_2")
gold.connect_relationship(["entity_1"], ["entity_2"], "worry", "guides", strength="high", event_id="event_2")
gold.assign_stage("event_1", "beginning")
gold.assign_stage("event_2", "ending")
gold.set_outline("The Dark Lamp", "A keeper and a fisherman outlast one storm.")
doc = frame_to_document(gold.commit())

# chain order is fixed: entities, events, outline, relationships
client = MockChatClient(script=[
    json.dumps({"entities": doc["entities"]}),
    json.dumps({"events": doc["events"]}),
    json.dumps({"outline": doc["outline"]}),
    json.dumps({"relationships": doc["relationships"]}),
])

frame, state = run_parse_chain(story, client, strategy="tidd_ec_chain")
print("parsed", len(frame.entities), "entities,", len(frame.events), "events")
print("chain steps:", [entry.step for entry in state.transcript])

# later prompts embed the earlier results; the last one saw everything
last_prompt = client.requests[-1].messages[-1].content
print("final request mentions earlier units?", "Already extracted" in last_prompt)

# round trip: the parsed frame serializes exactly like the hand-built one
assert to_canonical_json(frame) == to_canonical_json(gold.commit())
print("byte-identical to the hand-built frame")

# generation goes the other way: frame in, prose out
writer = MockChatClient(script=[
    "The lamp died at midnight. Lena climbed with a lantern; Marko rowed "
    "by its small flame and tied up before dawn."
])
result = generate_story(writer, frame)
print()
print("generated story:", result.story)
print("llm calls for the whole run:", len(client.requests), "parse +", len(writer.requests), "generate")
