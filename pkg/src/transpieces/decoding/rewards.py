"""Per-step piece rewards added to the model's output log-probabilities."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..pieces import MAX_NGRAM, PieceTable


def piece_rewards(history: Sequence[str], table: PieceTable, lam: float) -> dict[str, float]:
    """Reward for every table unigram as the next token after ``history``.

    Starts from the unigram score and extends backwards through the history
    one word at a time, stopping at the first n-gram missing from the table.
    On a sub-span-closed table this equals summing the scores of all table
    n-grams (n <= 4) that end at the next token.
    """
    scores = table.scores
    tail = tuple(history[-(MAX_NGRAM - 1):])
    out = {}
    for u in table.unigrams:
        r = lam * scores[(u,)]
        for i in range(1, MAX_NGRAM):
            if len(tail) < i:
                break
            s = scores.get(tail[-i:] + (u,))
            if s is None:
                break
            r += lam * s
        out[u] = r
    return out


def apply_piece_rewards(logdist: np.ndarray, history: Sequence[str], table: PieceTable, lam: float,
                        token_index: Mapping[str, int]) -> np.ndarray:
    """Copy of ``logdist`` with piece rewards added; no renormalization.

    Only entries for table unigrams are touched.  Unigrams outside the
    model vocabulary are ignored.
    """
    out = np.array(logdist, dtype=np.float64, copy=True)
    if lam == 0.0 or not table.unigrams:
        return out
    for u, r in piece_rewards(history, table, lam).items():
        k = token_index.get(u)
        if k is not None:
            out[k] += r
    return out


def sequence_reward(tokens: Sequence[str], table: PieceTable, lam: float) -> float:
    """Total reward of an output sequence, accumulated step by step."""
    total = 0.0
    scores = table.scores
    for t in range(len(tokens)):
        step = 0.0
        for n in range(1, MAX_NGRAM + 1):
            if t - n + 1 < 0:
                break
            step += lam * scores.get(tuple(tokens[t - n + 1:t + 1]), 0.0)
        total += step
    return total
