"""
From a story corpus to a preference dataset
===========================================

Each source story is parsed into a frame, the frame is turned back into a
new story, both versions are scored by a judge, and the better one becomes
"chosen". The scripted mock below plays every role, so the whole build is
deterministic; swap in HTTP-backed clients for a live run.
"""

import json
import tempfile
from pathlib import Path

from storyframe import (
    FrameBuilder,
    MockChatClient,
    PreferencePair,
    ablate_dataset,
    build_dataset,
    dataset_stats,
    frame_to_document,
    split_dataset,
)

stories = [
    "Lena kept the lamp lit through the storm and Marko rowed home by it.",
    "A surveyor lost her maps in the flood and redrew the valley from memory.",
    "Two rival bakers split one oven during the blackout week.",
]

# one small gold frame per story, varying a few attributes for the stats
frames = []
for k, names in enumerate([("Lena", "keeper"), ("Noor", "surveyor"), ("Pia", "baker")]):
    b = FrameBuilder()
    b.create_entity(names[0], names[1], "see it through", ["stubborn"])
    b.create_entity("Sam", "neighbor", "lend a hand", ["kind", "loud"])
    b.create_event("day one", "town", "The trouble starts.", ["low", "medium", "high"][k])
    b.create_event("day two", "town", "Help arrives from next door.", "medium")
    b.attach_entity("entity_1", "event_1")
    b.attach_entity("entity_1", "event_2")
    b.attach_entity("entity_2", "event_2")
    b.link_events("event_1", "event_2")
    b.connect_relationship(
        ["entity_2"], ["entity_1"],
        ["gratitude", "rivalry", "respect"][k], "helps",
        strength="medium", event_id="event_2",
    )
    b.assign_stage("event_1", "beginning")
    b.assign_stage("event_2", "ending")
    b.set_outline(f"Story {k + 1}", "Neighbors get each other through.")
    frames.append(b.commit())

# scripted call order per story: 4 parse steps, then 1 generation
llm_script = []
for k, frame in enumerate(frames):
    doc = frame_to_document(frame)
    llm_script += [
        json.dumps({"entities": doc["entities"]}),
        json.dumps({"events": doc["events"]}),
        json.dumps({"outline": doc["outline"]}),
        json.dumps({"relationships": doc["relationships"]}),
        f"A retelling of story {k + 1}, shaped by its frame.",
    ]

# judge scores: source story first, generated story second, one run each;
# story 2's generation outscores its source, the others do not
def card(value):
    dims = (
        "functionality", "technicality", "innovativeness", "readability",
        "thoughtfulness", "emotional_authenticity", "clarity_of_perspective",
    )
    return json.dumps({d: value for d in dims})

judge_script = [card(4), card(3), card(2), card(5), card(4), card(4)]

llm = MockChatClient(script=llm_script)
judge = MockChatClient(script=judge_script)

out_dir = Path(tempfile.mkdtemp(prefix="prefdata_"))
result = build_dataset(stories, out_dir, llm, llm, judge, n_judge_runs=1)
print("built", result.n_pairs, "pairs,", result.n_failures, "failures")

# pairs land on disk as one JSON object per line
pairs = [PreferencePair.from_dict(json.loads(line)) for line in result.pairs_path.read_text().splitlines()]
for k, pair in enumerate(pairs):
    won = "source" if pair.chosen == stories[k] else "generated"
    print(f"  {pair.pair_id}: chosen={won}, mean {sum(pair.chosen_scores.values()) / 7:.1f}"
          f" vs {sum(pair.rejected_scores.values()) / 7:.1f}")

print("wrote:", sorted(p.name for p in out_dir.iterdir()))

# deterministic shuffle and split for train/eval
train, held = split_dataset(pairs, ratio=0.667, seed=0)
print("split:", len(train), "train /", len(held), "held out")

# ablation drops one unit everywhere, for training-signal comparisons
no_rels = ablate_dataset(pairs, "relationships")
print("after ablation, frame keys:", sorted(json.loads(no_rels[0].frame_json)))

stats = dataset_stats(pairs)
print("emotional types seen:", stats["relationship_emotional_type"])
