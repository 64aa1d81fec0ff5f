"""METEOR with exact unigram matching.

Score = Fmean * (1 - penalty), where Fmean weights precision against recall
and the penalty punishes fragmented alignments:

    Fmean   = P*R / (alpha*P + (1-alpha)*R)
    penalty = gamma * (chunks / matches) ** beta

Matching is surface-form only. The chunk count is the number of maximal runs
of matched words that are adjacent and in order in both texts; fewer chunks
means a more contiguous alignment. Finding the true minimum chunk count is a
hard combinatorial problem, so it is solved exactly only for small inputs and
approximated by in-order greedy matching beyond that.
"""

from __future__ import annotations

import functools
import math
from collections import Counter, deque

from .textnorm import tokenize

DEFAULT_ALPHA = 0.9
DEFAULT_BETA = 3.0
DEFAULT_GAMMA = 0.5

_EXACT_MATCH_LIMIT = 10
_EXACT_SIZE_LIMIT = 20


def meteor_score(
    candidate: str,
    reference: str,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    gamma: float = DEFAULT_GAMMA,
) -> dict[str, float]:
    cand = tokenize(candidate)
    ref = tokenize(reference)
    matches, chunks = _alignment_stats(cand, ref)
    if matches == 0:
        return {
            "precision": 0.0,
            "recall": 0.0,
            "fmean": 0.0,
            "penalty": 0.0,
            "score": 0.0,
            "matches": 0,
            "chunks": 0,
        }
    precision = matches / len(cand)
    recall = matches / len(ref)
    fmean = precision * recall / (alpha * precision + (1 - alpha) * recall)
    penalty = gamma * (chunks / matches) ** beta
    return {
        "precision": precision,
        "recall": recall,
        "fmean": fmean,
        "penalty": penalty,
        "score": fmean * (1 - penalty),
        "matches": matches,
        "chunks": chunks,
    }


def _alignment_stats(cand: list[str], ref: list[str]) -> tuple[int, int]:
    """(matches, chunks) maximizing matches, then minimizing chunks."""
    cand_counts = Counter(cand)
    ref_counts = Counter(ref)
    need = {w: min(cand_counts[w], ref_counts[w]) for w in cand_counts if ref_counts.get(w)}
    matches = sum(need.values())
    if matches == 0:
        return 0, 0
    if matches <= _EXACT_MATCH_LIMIT and len(cand) <= _EXACT_SIZE_LIMIT and len(ref) <= _EXACT_SIZE_LIMIT:
        return matches, _min_chunks_exact(tuple(cand), tuple(ref), need)
    return matches, _chunks_greedy(cand, ref)


def _min_chunks_exact(cand: tuple[str, ...], ref: tuple[str, ...], need: dict[str, int]) -> int:
    n = len(cand)
    suffix_avail: list[Counter] = [Counter() for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        suffix_avail[i] = suffix_avail[i + 1].copy()
        suffix_avail[i][cand[i]] += 1
    ref_positions: dict[str, list[int]] = {}
    for j, w in enumerate(ref):
        if w in need:
            ref_positions.setdefault(w, []).append(j)

    @functools.lru_cache(maxsize=None)
    def best_from(i: int, prev_ref: int, used: frozenset) -> float:
        remaining = {w: need[w] - sum(1 for j in used if ref[j] == w) for w in need}
        if not any(remaining.values()):
            return 0.0
        if i >= n:
            return math.inf
        for w, k in remaining.items():
            if k > suffix_avail[i][w]:
                return math.inf
        best = best_from(i + 1, -1, used)  # leave cand[i] unmatched
        w = cand[i]
        if remaining.get(w, 0) > 0:
            for j in ref_positions[w]:
                if j in used:
                    continue
                cost = 0 if j == prev_ref + 1 and prev_ref >= 0 else 1
                sub = best_from(i + 1, j, used | {j})
                if sub + cost < best:
                    best = sub + cost
        return best

    result = best_from(0, -1, frozenset())
    best_from.cache_clear()
    return int(result)


def _chunks_greedy(cand: list[str], ref: list[str]) -> int:
    """Chunks of the in-order alignment: each word pairs with the earliest
    unused reference occurrence. Linear, not necessarily minimal."""
    queues: dict[str, deque[int]] = {}
    for j, w in enumerate(ref):
        queues.setdefault(w, deque()).append(j)
    chunks = 0
    prev: tuple[int, int] | None = None
    for i, w in enumerate(cand):
        queue = queues.get(w)
        if not queue:
            continue
        j = queue.popleft()
        if prev is None or not (i == prev[0] + 1 and j == prev[1] + 1):
            chunks += 1
        prev = (i, j)
    return chunks
