"""Embedding-based token similarity (optional feature).

Each token of both texts is embedded, and every token is matched greedily to
its highest-cosine counterpart: precision averages the best match for each
candidate token, recall for each reference token. Requires a caller-supplied
embedding function; without one the metric is disabled rather than silently
degraded.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import FeatureDisabled
from .textnorm import tokenize

EmbedFn = Callable[[list[str]], Sequence[Sequence[float]]]


def bert_score(candidate: str, reference: str, embed: EmbedFn | None) -> dict[str, float]:
    if embed is None:
        raise FeatureDisabled("embedding-based scoring needs an embedding backend; none is configured")
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return {"precision": 0.0, "recall": 0.0, "f1": 0.0}
    cand_vecs = np.asarray(embed(cand), dtype=float)
    ref_vecs = np.asarray(embed(ref), dtype=float)
    if cand_vecs.ndim != 2 or ref_vecs.ndim != 2 or cand_vecs.shape[0] != len(cand) or ref_vecs.shape[0] != len(ref):
        raise ValueError("embedding backend must return one vector per token")
    cand_unit = _normalize_rows(cand_vecs)
    ref_unit = _normalize_rows(ref_vecs)
    sim = cand_unit @ ref_unit.T  # [len(cand), len(ref)]
    precision = float(sim.max(axis=1).mean())
    recall = float(sim.max(axis=0).mean())
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms
