"""
Measuring how close two stories (or two frames) are
===================================================

Surface metrics compare token sequences; the tree metric compares parsed
structure; the rank test says whether two groups of scores differ. All of
them run offline.
"""

from storyframe import FrameBuilder, MockChatClient, frame_to_document
from storyframe.metrics import (
    bert_score,
    json_tree_distance,
    mann_whitney_u,
    meteor_score,
    rouge_l,
)

reference = "The keeper hung a lantern in the gallery and the fisherman rowed home."
candidate = "The fisherman rowed home because the keeper hung a lantern in the gallery."

# longest-common-subsequence overlap: order matters, position does not
r = rouge_l(candidate, reference)
print(f"rouge-l  P={r['precision']:.3f} R={r['recall']:.3f} F1={r['f1']:.3f}")

# unigram alignment with a fragmentation penalty for scrambled order
m = meteor_score(candidate, reference)
print(f"meteor   score={m['score']:.3f} chunks={m['chunks']:.0f}")

# greedy token-embedding match; any callable tokens -> vectors works,
# here the mock client's deterministic hash embeddings
embedder = MockChatClient(embed_dim=16)
b = bert_score(candidate, reference, embedder.embed)
print(f"embed    P={b['precision']:.3f} R={b['recall']:.3f} F1={b['f1']:.3f}")

# structural distance between two frames: one edit per node change
base = FrameBuilder()
base.create_entity("Lena", "keeper", "keep the lamp lit", ["steadfast"])
base.create_event("midnight", "headland", "The lamp goes dark.", "high")
base.attach_entity("entity_1", "event_1")
base.assign_stage("event_1", "beginning")
base.set_outline("The Dark Lamp", "One night, one lamp.")
doc_a = frame_to_document(base.commit())

base.edit_entity("entity_1", personality_traits=["steadfast", "wry"])
doc_b = frame_to_document(base.commit())

print("tree edit distance after adding one trait:", json_tree_distance(doc_a, doc_b))

# two groups of averaged judge scores: did the second condition score higher?
# (averages over runs, so no ties and the exact null distribution applies)
scores_a = [3.00, 3.33, 3.67, 2.33, 3.17, 4.17, 2.67, 2.83]
scores_b = [4.33, 5.00, 4.00, 4.50, 4.67, 3.50, 4.83, 3.83]
test = mann_whitney_u(scores_a, scores_b, alternative="less")
print(f"rank test U={test.u_statistic:.0f} p={test.p_value:.4f} ({test.method})")

# the large-sample approximation lands close to the exact answer even here
approx = mann_whitney_u(scores_a, scores_b, alternative="less", method="normal")
print(f"normal approximation p={approx.p_value:.4f}, gap {abs(test.p_value - approx.p_value):.4f}")
