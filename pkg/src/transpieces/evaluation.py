"""BLEU, length ratio, train/test similarity statistics and infrequent n-gram counts."""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import ParallelCorpus
from .pieces import MAX_NGRAM
from .retrieval import Retriever
from .similarity import RetrievedMatch, compute_match

GAMMA_VALUES = (0, 1, 2, 5, 10, 20, 50, 100)
GAMMA_RANGES = ((0, 1), (1, 5), (5, 20), (20, 100), (100, None))

_BOUNDS = [k / 10 for k in range(1, 10)]
HISTOGRAM_LABELS = tuple(
    [f"[{lo:g},{hi:g})" for lo, hi in zip([0.0] + _BOUNDS, _BOUNDS + [1.0])] + ["1"])


def _check_lengths(hyps, refs):
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")


def ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def uniq_ngrams(tokens: Sequence[str], max_n: int = MAX_NGRAM) -> set[tuple[str, ...]]:
    out = set()
    for n in range(1, max_n + 1):
        out.update(ngrams(tokens, n))
    return out


def bleu_stats(hyp: Sequence[str], ref: Sequence[str], max_n: int = 4) -> list[int]:
    """[c, r, match_1, total_1, ..., match_n, total_n]."""
    stats = [len(hyp), len(ref)]
    for n in range(1, max_n + 1):
        h = Counter(ngrams(hyp, n))
        r = Counter(ngrams(ref, n))
        stats.append(sum(min(c, r[g]) for g, c in h.items()))
        stats.append(max(len(hyp) - n + 1, 0))
    return stats


def _bleu_from_stats(stats: Sequence[float], max_n: int, smooth: bool = False) -> float:
    c, r = stats[0], stats[1]
    if c == 0:
        return 0.0
    # orders with no candidate n-grams at all (every hypothesis shorter than n)
    # carry no evidence and are left out of the geometric mean
    logs = []
    for n in range(max_n):
        match, total = stats[2 + 2 * n], stats[3 + 2 * n]
        if total == 0:
            continue
        if smooth and n > 0:
            match, total = match + 1, total + 1
        if match == 0:
            return 0.0
        logs.append(math.log(match / total))
    log_p = sum(logs) / len(logs)
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return 100.0 * bp * math.exp(log_p)


def corpus_bleu(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]],
                max_n: int = 4) -> float:
    """Corpus-level BLEU on a 0-100 scale, unsmoothed."""
    _check_lengths(hypotheses, references)
    totals = [0] * (2 + 2 * max_n)
    for h, r in zip(hypotheses, references):
        for k, v in enumerate(bleu_stats(h, r, max_n)):
            totals[k] += v
    return _bleu_from_stats(totals, max_n)


def sentence_bleu(hypothesis: Sequence[str], reference: Sequence[str], max_n: int = 4) -> float:
    """Add-one smoothed sentence BLEU (orders >= 2), for diagnostics only."""
    return _bleu_from_stats(bleu_stats(hypothesis, reference, max_n), max_n, smooth=True)


def length_ratio(hypotheses, references) -> float:
    _check_lengths(hypotheses, references)
    ref_len = sum(len(r) for r in references)
    if ref_len == 0:
        raise ValueError("references are empty")
    return sum(len(h) for h in hypotheses) / ref_len


def similarity_to_train(matches: Iterable[RetrievedMatch]) -> float:
    """Best similarity among the retrieved matches; 0.0 if there are none."""
    return max((m.similarity for m in matches), default=0.0)


def sentence_similarities(test: Iterable[Sequence[str]], index: Retriever,
                          corpus: ParallelCorpus, m: int) -> list[float]:
    out = []
    for x in test:
        x = tuple(x)
        matches = [compute_match(x, corpus[c.example_id]) for c in index.search(x, m)] if m > 0 else []
        out.append(similarity_to_train(matches))
    return out


def testset_similarity(test, index: Retriever, corpus: ParallelCorpus, m: int) -> float:
    sims = sentence_similarities(test, index, corpus, m)
    if not sims:
        return 0.0
    return sum(sims) / len(sims)


def split_half_by_similarity(similarities: Sequence[float]) -> tuple[list[int], list[int]]:
    """Indices of the higher-similarity half (size ceil(n/2)) and the rest.

    Ties keep original order.  Both halves are returned in original order.
    """
    if len(similarities) < 2:
        raise ValueError("need at least two sentences to split")
    order = sorted(range(len(similarities)), key=lambda k: -similarities[k])
    cut = (len(order) + 1) // 2
    return sorted(order[:cut]), sorted(order[cut:])


def histogram_bucket(value: float) -> int:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"similarity {value} outside [0, 1]")
    if value == 1.0:
        return len(_BOUNDS) + 1
    return bisect.bisect_right(_BOUNDS, value)


@dataclass
class Histogram:
    counts: list[int]
    labels: tuple[str, ...] = HISTOGRAM_LABELS

    @property
    def total(self) -> int:
        return sum(self.counts)

    def percents(self) -> list[float]:
        n = self.total
        return [100.0 * c / n if n else 0.0 for c in self.counts]

    def rows(self) -> list[tuple[str, int, float]]:
        return list(zip(self.labels, self.counts, self.percents()))


def similarity_histogram(similarities: Iterable[float]) -> Histogram:
    counts = [0] * len(HISTOGRAM_LABELS)
    for s in similarities:
        counts[histogram_bucket(s)] += 1
    return Histogram(counts)


class OccurrenceTable:
    """Number of training target sentences containing each n-gram (n <= 4)."""

    def __init__(self, targets: Iterable[Sequence[str]], max_n: int = MAX_NGRAM):
        self.max_n = max_n
        self.counts: Counter = Counter()
        for y in targets:
            self.counts.update(uniq_ngrams(y, max_n))

    @classmethod
    def from_corpus(cls, corpus: ParallelCorpus) -> "OccurrenceTable":
        return cls(corpus.targets)

    def __call__(self, piece: Sequence[str]) -> int:
        return self.counts.get(tuple(piece), 0)


def occur(piece: Sequence[str], train: ParallelCorpus) -> int:
    piece = tuple(piece)
    n = len(piece)
    return sum(1 for y in train.targets if piece in set(ngrams(y, n)))


def correct_ngrams(outputs, references, max_n: int = MAX_NGRAM) -> list[set[tuple[str, ...]]]:
    _check_lengths(outputs, references)
    return [uniq_ngrams(z, max_n) & uniq_ngrams(y, max_n) for z, y in zip(outputs, references)]


def count_by_occurrence(outputs, references, occurrences: OccurrenceTable,
                        by_order: bool = False) -> Counter:
    """Counter mapping Occur value (or (n, Occur) with ``by_order``) to correct n-gram count."""
    out: Counter = Counter()
    for correct in correct_ngrams(outputs, references, occurrences.max_n):
        for u in correct:
            key = (len(u), occurrences(u)) if by_order else occurrences(u)
            out[key] += 1
    return out


def count_gamma(outputs, references, train: ParallelCorpus | OccurrenceTable,
                gammas: Iterable[int] = GAMMA_VALUES) -> dict[int, int]:
    """Correctly translated n-grams whose training occurrence equals each gamma."""
    occ = train if isinstance(train, OccurrenceTable) else OccurrenceTable.from_corpus(train)
    counts = count_by_occurrence(outputs, references, occ)
    return {g: counts.get(g, 0) for g in gammas}


def count_gamma_ranges(outputs, references, train: ParallelCorpus | OccurrenceTable,
                       ranges: Iterable[tuple[int, int | None]] = GAMMA_RANGES) -> dict[tuple[int, int | None], int]:
    """Like :func:`count_gamma` but over half-open ranges ``[lo, hi)``; ``hi=None`` is unbounded."""
    occ = train if isinstance(train, OccurrenceTable) else OccurrenceTable.from_corpus(train)
    counts = count_by_occurrence(outputs, references, occ)
    out = {}
    for lo, hi in ranges:
        out[(lo, hi)] = sum(c for g, c in counts.items() if g >= lo and (hi is None or g < hi))
    return out


def range_label(lo: int, hi: int | None) -> str:
    return f"[{lo},inf)" if hi is None else f"[{lo},{hi})"


@dataclass
class EvalReport:
    corpus_bleu: float
    length_ratio: float
    similarities: list[float] = field(default_factory=list)
    histogram: Histogram | None = None
    count_gamma: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"bleu: {self.corpus_bleu:.2f}", f"length_ratio: {self.length_ratio:.3f}"]
        if self.similarities:
            out.append(f"testset_similarity: {sum(self.similarities) / len(self.similarities):.4f}")
        return out

    def histogram_tsv(self) -> str:
        rows = ["bucket\tsentences\tpercent"]
        for label, count, pct in self.histogram.rows():
            rows.append(f"{label}\t{count}\t{pct:.1f}")
        return "\n".join(rows) + "\n"

    def count_gamma_tsv(self) -> str:
        rows = ["gamma\tcount"]
        for g, c in self.count_gamma.items():
            label = range_label(*g) if isinstance(g, tuple) else str(g)
            rows.append(f"{label}\t{c}")
        return "\n".join(rows) + "\n"
