"""Inverted index over corpus source sides with additive-idf ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus import ParallelCorpus, Sentence

INDEX_MAGIC = "#transpieces-index v1"
DEFAULT_M = 100
RECOMMENDED_M = 10


@dataclass(frozen=True)
class Candidate:
    example_id: int
    lexical_score: float


class Retriever(Protocol):
    def search(self, query: Sequence[str], m: int) -> list[Candidate]: ...


class InvertedIndex:
    """Token -> sorted example ids, with set semantics per sentence.

    Scores are ``sum(idf(t))`` over distinct query tokens ``t`` present in a
    document, where ``idf(t) = ln((N + 1) / (df(t) + 1)) + 1``.
    """

    def __init__(self, postings: dict[str, np.ndarray], doc_count: int):
        self.postings = postings
        self.doc_count = doc_count
        self._idf = {tok: math.log((doc_count + 1) / (len(ids) + 1)) + 1.0
                     for tok, ids in postings.items()}

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sequence[str]]) -> "InvertedIndex":
        lists: dict[str, list[int]] = {}
        n = 0
        for doc_id, sent in enumerate(sentences):
            n += 1
            for tok in set(sent):
                lists.setdefault(tok, []).append(doc_id)
        postings = {tok: np.asarray(ids, dtype=np.int64) for tok, ids in lists.items()}
        return cls(postings, n)

    def __eq__(self, other):
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return (self.doc_count == other.doc_count
                and self.postings.keys() == other.postings.keys()
                and all(np.array_equal(v, other.postings[k]) for k, v in self.postings.items()))

    def lookup(self, token: str) -> list[int]:
        ids = self.postings.get(token)
        return [] if ids is None else ids.tolist()

    def doc_freq(self, token: str) -> int:
        ids = self.postings.get(token)
        return 0 if ids is None else len(ids)

    def idf(self, token: str) -> float:
        if token in self._idf:
            return self._idf[token]
        return math.log(self.doc_count + 1) + 1.0

    def scores(self, query: Sequence[str]) -> np.ndarray:
        """Dense score vector over all documents."""
        out = np.zeros(self.doc_count, dtype=np.float64)
        for tok in dict.fromkeys(query):
            ids = self.postings.get(tok)
            if ids is not None:
                out[ids] += self._idf[tok]
        return out

    def search(self, query: Sequence[str], m: int) -> list[Candidate]:
        if m <= 0 or self.doc_count == 0:
            return []
        scores = self.scores(query)
        hits = np.flatnonzero(scores > 0)
        if len(hits) > m:
            # keep everything tied with the m-th best so id tie-breaking stays exact
            cutoff = np.partition(scores[hits], len(hits) - m)[len(hits) - m]
            hits = hits[scores[hits] >= cutoff]
        order = np.lexsort((hits, -scores[hits]))[:m]
        return [Candidate(int(hits[k]), float(scores[hits[k]])) for k in order]

    def dumps(self) -> str:
        lines = [INDEX_MAGIC, str(self.doc_count)]
        for tok in sorted(self.postings):
            ids = self.postings[tok]
            lines.append(f"{tok}\t{len(ids)}\t" + " ".join(map(str, ids.tolist())))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "InvertedIndex":
        lines = text.split("\n")
        if not lines or lines[0] != INDEX_MAGIC:
            raise ValueError("not a transpieces index file")
        try:
            n = int(lines[1])
        except (IndexError, ValueError):
            raise ValueError("index file: bad document count") from None
        postings = {}
        for lineno, line in enumerate(lines[2:], start=3):
            if line == "":
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"index file line {lineno}: expected 3 fields")
            tok, df, ids = parts
            arr = np.asarray([int(x) for x in ids.split(" ")], dtype=np.int64)
            if len(arr) != int(df) or np.any(np.diff(arr) <= 0) or arr[0] < 0 or arr[-1] >= n:
                raise ValueError(f"index file line {lineno}: invalid posting list")
            postings[tok] = arr
        return cls(postings, n)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path) -> "InvertedIndex":
        with open(path, encoding="utf-8", newline="") as f:
            return cls.loads(f.read())


def build_index(corpus: ParallelCorpus) -> InvertedIndex:
    return InvertedIndex.from_sentences(ex.source for ex in corpus)


def search(index: Retriever, query: Sentence, m: int) -> list[Candidate]:
    """Top-``m`` candidates by descending score, ties by ascending id."""
    return index.search(query, m)
