"""Ordered labeled trees from JSON plus exact tree edit distance.

``json_to_tree`` makes structural comparison of two JSON documents order
insensitive at the object level (keys are sorted) while keeping array order
significant. ``tree_edit_distance`` is the classic keyroots dynamic program
over postorder-numbered trees; with unit costs it returns the minimum number
of node insertions, deletions, and relabels turning one tree into the other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class TreeNode:
    label: str
    children: tuple["TreeNode", ...] = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def json_to_tree(value: Any) -> TreeNode:
    if isinstance(value, dict):
        children = tuple(
            TreeNode(label=f"key:{k}", children=(json_to_tree(value[k]),)) for k in sorted(value)
        )
        return TreeNode(label="obj", children=children)
    if isinstance(value, list):
        return TreeNode(label="arr", children=tuple(json_to_tree(v) for v in value))
    if value is None:
        return TreeNode(label="null")
    if isinstance(value, bool):
        return TreeNode(label=f"bool:{json.dumps(value)}")
    if isinstance(value, (int, float)):
        return TreeNode(label=f"num:{json.dumps(value)}")
    if isinstance(value, str):
        return TreeNode(label=f"str:{value}")
    raise TypeError(f"not a JSON value: {type(value).__name__}")


class _Annotated:
    """Postorder labels, leftmost-leaf-descendant indexes, and keyroots."""

    def __init__(self, root: TreeNode) -> None:
        self.labels: list[str] = []
        self.lmld: list[int] = []
        self._walk(root)
        seen: set[int] = set()
        keyroots: list[int] = []
        for i in range(len(self.labels) - 1, -1, -1):
            if self.lmld[i] not in seen:
                keyroots.append(i)
                seen.add(self.lmld[i])
        keyroots.reverse()
        self.keyroots = keyroots

    def _walk(self, node: TreeNode) -> int:
        first_leaf = None
        for child in node.children:
            leaf = self._walk(child)
            if first_leaf is None:
                first_leaf = leaf
        idx = len(self.labels)
        self.labels.append(node.label)
        self.lmld.append(first_leaf if first_leaf is not None else idx)
        return self.lmld[idx]


def tree_edit_distance(
    a: TreeNode,
    b: TreeNode,
    insert_cost: int = 1,
    delete_cost: int = 1,
    relabel_cost: int = 1,
) -> int:
    ta, tb = _Annotated(a), _Annotated(b)
    la, lb = ta.lmld, tb.lmld
    n, m = len(ta.labels), len(tb.labels)
    treedist = [[0] * m for _ in range(n)]

    def compute(i: int, j: int) -> None:
        ioff = la[i] - 1
        joff = lb[j] - 1
        rows = i - la[i] + 2
        cols = j - lb[j] + 2
        fd = [[0] * cols for _ in range(rows)]
        for x in range(1, rows):
            fd[x][0] = fd[x - 1][0] + delete_cost
        for y in range(1, cols):
            fd[0][y] = fd[0][y - 1] + insert_cost
        for x in range(1, rows):
            for y in range(1, cols):
                xi = x + ioff
                yj = y + joff
                if la[xi] == la[i] and lb[yj] == lb[j]:
                    # both prefixes are whole subtrees rooted at xi / yj
                    rel = 0 if ta.labels[xi] == tb.labels[yj] else relabel_cost
                    fd[x][y] = min(
                        fd[x - 1][y] + delete_cost,
                        fd[x][y - 1] + insert_cost,
                        fd[x - 1][y - 1] + rel,
                    )
                    treedist[xi][yj] = fd[x][y]
                else:
                    p = la[xi] - 1 - ioff
                    q = lb[yj] - 1 - joff
                    fd[x][y] = min(
                        fd[x - 1][y] + delete_cost,
                        fd[x][y - 1] + insert_cost,
                        fd[p][q] + treedist[xi][yj],
                    )

    for i in ta.keyroots:
        for j in tb.keyroots:
            compute(i, j)
    return treedist[n - 1][m - 1]


def json_tree_distance(doc_a: Any, doc_b: Any) -> int:
    """Edit distance between two JSON documents' canonical trees."""
    return tree_edit_distance(json_to_tree(doc_a), json_to_tree(doc_b))
