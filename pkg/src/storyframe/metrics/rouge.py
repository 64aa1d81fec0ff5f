"""ROUGE-L: longest-common-subsequence overlap between two texts."""

from __future__ import annotations

from .textnorm import tokenize


def lcs_length(a: list[str], b: list[str]) -> int:
    """Length of the longest common subsequence, O(len(a)*len(b)) DP."""
    if not a or not b:
        return 0
    # Rolling single row keeps memory linear in len(b).
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[len(b)]


def rouge_l(candidate: str, reference: str) -> dict[str, float]:
    """Precision, recall, and F1 from the LCS of candidate and reference."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    recall = lcs / len(ref) if ref else 0.0
    f1 = (2 * precision * recall / (precision + recall)) if precision + recall > 0 else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}
