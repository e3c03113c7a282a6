"""Token normalization helpers shared by matching, scoring and evaluation."""

from __future__ import annotations

import string
from typing import Sequence

# Dropped during answer normalization: articles and the coordinator.
ANSWER_STOPWORDS = frozenset({"a", "an", "the", "and"})

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def fold(token: str) -> str:
    return token.casefold()


def fold_tokens(tokens: Sequence[str]) -> tuple[str, ...]:
    return tuple(t.casefold() for t in tokens)


def normalized_tokens(text: str) -> list[str]:
    """Lowercase, strip punctuation characters, drop articles and "and".

    Word order is preserved here; callers that need an unordered view build a
    multiset on top.
    """
    stripped = text.casefold().translate(_PUNCT_TABLE)
    return [t for t in stripped.split() if t not in ANSWER_STOPWORDS]


def find_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> int:
    """Index of the first contiguous occurrence of needle, or -1."""
    n, m = len(haystack), len(needle)
    if m == 0 or m > n:
        return -1
    first = needle[0]
    for i in range(n - m + 1):
        if haystack[i] == first and tuple(haystack[i : i + m]) == tuple(needle):
            return i
    return -1
