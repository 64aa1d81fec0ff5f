"""Text and structure metrics for comparing stories and parsed frames."""

from .bertscore import bert_score
from .mannwhitney import UTestResult, mann_whitney_u
from .meteor import meteor_score
from .rouge import rouge_l
from .textnorm import tokenize
from .treedist import TreeNode, json_to_tree, json_tree_distance, tree_edit_distance

__all__ = [
    "TreeNode",
    "UTestResult",
    "bert_score",
    "json_to_tree",
    "json_tree_distance",
    "mann_whitney_u",
    "meteor_score",
    "rouge_l",
    "tokenize",
    "tree_edit_distance",
]
