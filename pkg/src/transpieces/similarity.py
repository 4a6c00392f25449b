"""Word-level edit distance, unedited-word extraction and sentence similarity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import ParallelExample


@dataclass(frozen=True)
class RetrievedMatch:
    example: ParallelExample
    distance: int
    unedited: frozenset[int]
    similarity: float


def _dp_table(x: Sequence[str], xm: Sequence[str]) -> list[list[int]]:
    n, m = len(x), len(xm)
    prev = list(range(m + 1))
    table = [prev]
    for i in range(1, n + 1):
        xi = x[i - 1]
        row = [i] + [0] * m
        for j in range(1, m + 1):
            diag = prev[j - 1] + (xi != xm[j - 1])
            up = prev[j] + 1
            left = row[j - 1] + 1
            row[j] = min(diag, up, left)
        table.append(row)
        prev = row
    return table


def edit_distance_with_matches(x: Sequence[str], xm: Sequence[str]) -> tuple[int, frozenset[int]]:
    """Levenshtein distance over tokens plus the positions of ``xm`` kept unedited.

    The backtrace starts at the terminal cell and prefers, among moves that
    stay on an optimal path: match, substitution, deletion of an ``xm`` word,
    insertion of an ``x`` word.
    """
    table = _dp_table(x, xm)
    i, j = len(x), len(xm)
    unedited = []
    while i > 0 or j > 0:
        cur = table[i][j]
        if i > 0 and j > 0:
            if x[i - 1] == xm[j - 1] and table[i - 1][j - 1] == cur:
                unedited.append(j - 1)
                i, j = i - 1, j - 1
                continue
            if x[i - 1] != xm[j - 1] and table[i - 1][j - 1] + 1 == cur:
                i, j = i - 1, j - 1
                continue
        if j > 0 and table[i][j - 1] + 1 == cur:
            j -= 1
        else:
            i -= 1
    return table[len(x)][len(xm)], frozenset(unedited)


def edit_distance(x: Sequence[str], xm: Sequence[str]) -> int:
    return _dp_table(x, xm)[len(x)][len(xm)]


def similarity_from_distance(distance: int, len_x: int, len_xm: int) -> float:
    return 1.0 - distance / max(len_x, len_xm)


def sentence_similarity(x: Sequence[str], xm: Sequence[str]) -> float:
    """``1 - d(x, xm) / max(|x|, |xm|)``."""
    return similarity_from_distance(edit_distance(x, xm), len(x), len(xm))


def compute_match(x: Sequence[str], example: ParallelExample) -> RetrievedMatch:
    d, unedited = edit_distance_with_matches(x, example.source)
    return RetrievedMatch(example, d, unedited,
                          similarity_from_distance(d, len(x), len(example.source)))
