"""Translation pieces: collection from retrieved matches and scored lookup tables.

A piece is a target n-gram (1 to 4 tokens) from a retrieved target sentence
whose aligned source words were all left unedited by the edit path against
the input.  The table maps each piece to the highest similarity of any match
that produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .similarity import RetrievedMatch

MAX_NGRAM = 4

Piece = tuple[str, ...]


class PieceTableError(ValueError):
    pass


@dataclass(frozen=True)
class PieceTable:
    scores: Mapping[Piece, float] = field(default_factory=dict)
    unigrams: tuple[str, ...] = ()

    @classmethod
    def from_scores(cls, scores: Mapping[Piece, float]) -> "PieceTable":
        scores = dict(scores)
        unigrams = tuple(sorted(p[0] for p in scores if len(p) == 1))
        return cls(scores, unigrams)

    def __len__(self) -> int:
        return len(self.scores)

    def __contains__(self, piece) -> bool:
        return tuple(piece) in self.scores

    def __getitem__(self, piece) -> float:
        return self.scores[tuple(piece)]

    def get(self, piece, default: float = 0.0) -> float:
        return self.scores.get(tuple(piece), default)

    def __eq__(self, other):
        if not isinstance(other, PieceTable):
            return NotImplemented
        return dict(self.scores) == dict(other.scores)

    def validate(self) -> None:
        """Check score range, sub-span closure and score monotonicity."""
        for piece, s in self.scores.items():
            if not 1 <= len(piece) <= MAX_NGRAM:
                raise PieceTableError(f"piece {' '.join(piece)!r} has length {len(piece)}")
            if not (0.0 < s <= 1.0) or math.isnan(s):
                raise PieceTableError(f"score {s} of {' '.join(piece)!r} outside (0, 1]")
            n = len(piece)
            for a, b in ((0, n - 1), (1, n)):
                if b - a < 1:
                    continue
                sub = piece[a:b]
                if sub not in self.scores:
                    raise PieceTableError(
                        f"closure violation: {' '.join(sub)!r} missing for {' '.join(piece)!r}")
                if self.scores[sub] < s:
                    raise PieceTableError(
                        f"monotonicity violation: {' '.join(sub)!r} scores below {' '.join(piece)!r}")
        if set(self.unigrams) != {p[0] for p in self.scores if len(p) == 1}:
            raise PieceTableError("unigram list out of sync with scores")


EMPTY_TABLE = PieceTable()


def collect_pieces_single(match: RetrievedMatch) -> set[Piece]:
    """All target n-grams of a match whose every word is free of edited-source links.

    Target words with no alignment links never block a span.
    """
    target = match.example.target
    unedited = match.unedited
    blocked = [any(p not in unedited for p in links)
               for links in match.example.target_links()]
    pieces = set()
    n = len(target)
    for i in range(n):
        for j in range(i, min(i + MAX_NGRAM, n)):
            if blocked[j]:
                break
            pieces.add(target[i:j + 1])
    return pieces


def build_piece_table(matches: Iterable[RetrievedMatch]) -> PieceTable:
    """Union of pieces over all matches, each scored by its best match similarity.

    Matches with zero similarity contribute nothing.
    """
    scores: dict[Piece, float] = {}
    for match in matches:
        sim = match.similarity
        if sim <= 0.0:
            continue
        for piece in collect_pieces_single(match):
            if scores.get(piece, 0.0) < sim:
                scores[piece] = sim
    return PieceTable.from_scores(scores)


def binarize_table(table: PieceTable) -> PieceTable:
    return PieceTable({p: 1.0 for p in table.scores}, table.unigrams)


def dumps_table(table: PieceTable) -> str:
    lines = sorted(" ".join(p) + "\t" + f"{s:.6f}" for p, s in table.scores.items())
    return "".join(line + "\n" for line in lines)


def loads_table(text: str, source: str = "<string>") -> PieceTable:
    scores: dict[Piece, float] = {}
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0]:
            raise PieceTableError(f"{source}:{lineno}: malformed line")
        piece = tuple(fields[0].split(" "))
        if "" in piece:
            raise PieceTableError(f"{source}:{lineno}: malformed piece")
        try:
            s = float(fields[1])
        except ValueError:
            raise PieceTableError(f"{source}:{lineno}: malformed score {fields[1]!r}") from None
        if not (0.0 < s <= 1.0):
            raise PieceTableError(f"{source}:{lineno}: score {fields[1]} outside (0, 1]")
        if piece in scores:
            raise PieceTableError(f"{source}:{lineno}: duplicate piece")
        scores[piece] = s
    table = PieceTable.from_scores(scores)
    table.validate()
    return table


def save_table(table: PieceTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_table(table))


def load_table(path) -> PieceTable:
    with open(path, encoding="utf-8", newline="") as f:
        return loads_table(f.read(), str(path))
