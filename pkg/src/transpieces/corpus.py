"""Word-aligned parallel corpora: loading, validation, dedup and length filtering.

Sentences are stored as tuples of tokens.  Alignments use the Pharaoh
convention: ``i-j`` with 0-based source index ``i`` and target index ``j``.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

Sentence = tuple[str, ...]
Link = tuple[int, int]

_BAD_CHARS = (" ", "\t", "\n", "\r")
_LINK_RE = re.compile(r"(\d+)-(\d+)", re.ASCII)


class CorpusError(ValueError):
    """Raised for malformed corpus input; carries the 1-based line number."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)


@dataclass(frozen=True)
class ParallelExample:
    id: int
    source: Sentence
    target: Sentence
    alignment: tuple[Link, ...] = ()

    def __post_init__(self):
        if not self.source or not self.target:
            raise CorpusError("sentences must contain at least one token")
        links = tuple(sorted(set(self.alignment)))
        for p, q in links:
            if not (0 <= p < len(self.source) and 0 <= q < len(self.target)):
                raise CorpusError(f"alignment link {p}-{q} out of bounds")
        object.__setattr__(self, "alignment", links)

    def target_links(self) -> list[list[int]]:
        """For each target position, the source positions aligned to it."""
        out: list[list[int]] = [[] for _ in self.target]
        for p, q in self.alignment:
            out[q].append(p)
        return out

    def with_id(self, new_id: int) -> "ParallelExample":
        if new_id == self.id:
            return self
        return ParallelExample(new_id, self.source, self.target, self.alignment)


@dataclass(frozen=True)
class ParallelCorpus:
    """An immutable sequence of examples with ids ``0..N-1``."""

    examples: tuple[ParallelExample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        examples = tuple(self.examples)
        for k, ex in enumerate(examples):
            if ex.id != k:
                raise CorpusError(f"example ids must be dense: expected {k}, got {ex.id}")
        object.__setattr__(self, "examples", examples)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Sequence[str], Sequence[str], Iterable[Link]]]) -> "ParallelCorpus":
        return cls(tuple(
            ParallelExample(k, tuple(src), tuple(tgt), tuple(align))
            for k, (src, tgt, align) in enumerate(pairs)
        ))

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[ParallelExample]:
        return iter(self.examples)

    def __getitem__(self, k: int) -> ParallelExample:
        return self.examples[k]

    @property
    def sources(self) -> list[Sentence]:
        return [ex.source for ex in self.examples]

    @property
    def targets(self) -> list[Sentence]:
        return [ex.target for ex in self.examples]


def parse_sentence(line: str, lineno: int | None = None, path: str | None = None) -> Sentence:
    if line == "":
        raise CorpusError("empty line", lineno, path)
    tokens = tuple(line.split(" "))
    for tok in tokens:
        if tok == "":
            raise CorpusError("empty token (tokens must be separated by exactly one space)", lineno, path)
        if any(c in tok for c in _BAD_CHARS):
            raise CorpusError(f"token {tok!r} contains whitespace", lineno, path)
    return tokens


def parse_alignment(line: str, src_len: int, tgt_len: int,
                    lineno: int | None = None, path: str | None = None) -> tuple[Link, ...]:
    if line == "":
        return ()
    links = set()
    for item in line.split(" "):
        m = _LINK_RE.fullmatch(item)
        if m is None:
            raise CorpusError(f"malformed alignment token {item!r}", lineno, path)
        p, q = int(m.group(1)), int(m.group(2))
        if p >= src_len or q >= tgt_len:
            raise CorpusError(
                f"alignment link {item} out of bounds for source length {src_len}, target length {tgt_len}",
                lineno, path)
        links.add((p, q))
    return tuple(sorted(links))


def format_alignment(links: Iterable[Link]) -> str:
    return " ".join(f"{p}-{q}" for p, q in sorted(links))


def read_lines(path: str | os.PathLike) -> list[str]:
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def load_corpus(src_path, tgt_path, align_path) -> ParallelCorpus:
    """Load a tokenized, word-aligned corpus from three line-parallel files.

    Line ``k`` of each file becomes example ``k``.  Any problem is raised as
    :class:`CorpusError` naming the offending 1-based line.
    """
    src_lines = read_lines(src_path)
    tgt_lines = read_lines(tgt_path)
    align_lines = read_lines(align_path)
    counts = (len(src_lines), len(tgt_lines), len(align_lines))
    if len(set(counts)) != 1:
        raise CorpusError(
            "line-count mismatch: source has %d, target has %d, alignment has %d lines" % counts,
            min(counts) + 1)

    examples = []
    for k, (s, t, a) in enumerate(zip(src_lines, tgt_lines, align_lines)):
        lineno = k + 1
        source = parse_sentence(s, lineno, str(src_path))
        target = parse_sentence(t, lineno, str(tgt_path))
        links = parse_alignment(a, len(source), len(target), lineno, str(align_path))
        examples.append(ParallelExample(k, source, target, links))
    return ParallelCorpus(tuple(examples))


def save_corpus(corpus: ParallelCorpus, src_path, tgt_path, align_path) -> None:
    with open(src_path, "w", encoding="utf-8", newline="\n") as fs, \
            open(tgt_path, "w", encoding="utf-8", newline="\n") as ft, \
            open(align_path, "w", encoding="utf-8", newline="\n") as fa:
        for ex in corpus:
            fs.write(" ".join(ex.source) + "\n")
            ft.write(" ".join(ex.target) + "\n")
            fa.write(format_alignment(ex.alignment) + "\n")


def _renumber(examples: Iterable[ParallelExample]) -> ParallelCorpus:
    return ParallelCorpus(tuple(ex.with_id(k) for k, ex in enumerate(examples)))


def dedup_corpus(corpus: ParallelCorpus) -> ParallelCorpus:
    """Keep the first occurrence of every exact (source, target) pair."""
    seen = set()
    kept = []
    for ex in corpus:
        key = (ex.source, ex.target)
        if key in seen:
            continue
        seen.add(key)
        kept.append(ex)
    return _renumber(kept)


def length_filter(corpus: ParallelCorpus, max_len: int) -> ParallelCorpus:
    """Drop pairs whose source or target is longer than ``max_len`` tokens."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    return _renumber(ex for ex in corpus
                     if len(ex.source) <= max_len and len(ex.target) <= max_len)
