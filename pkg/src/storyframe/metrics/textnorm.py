"""Shared tokenization for the text metrics."""

from __future__ import annotations

import re

_WORD = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; punctuation is dropped."""
    return _WORD.findall(text.lower())
