"""Conditional translation models: the abstract interface and two toy doubles."""

from __future__ import annotations

import hashlib
import math
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

BOS = "<s>"
EOS = "</s>"
NORM_TOL = 1e-6


class ModelError(ValueError):
    pass


class TranslationModel(ABC):
    """Next-token log-probabilities over a fixed target vocabulary.

    ``prefix`` holds the target tokens generated so far, without BOS.
    Implementations must be safe for concurrent read-only calls.
    """

    def __init__(self, vocab: Sequence[str]):
        vocab = tuple(vocab)
        if BOS not in vocab or EOS not in vocab:
            raise ModelError("vocabulary must contain BOS and EOS")
        if len(set(vocab)) != len(vocab):
            raise ModelError("vocabulary has duplicate entries")
        self.vocab = vocab
        self.token_index = {tok: k for k, tok in enumerate(vocab)}
        self.eos_id = self.token_index[EOS]

    @abstractmethod
    def next_log_distribution(self, source: tuple[str, ...], prefix: tuple[str, ...]) -> np.ndarray:
        ...


def check_distribution(logp: np.ndarray, size: int, tol: float = NORM_TOL) -> None:
    if logp.shape != (size,):
        raise ModelError(f"model returned a vector of shape {logp.shape}, expected ({size},)")
    total = float(np.exp(logp).sum())
    if not abs(total - 1.0) <= tol:
        raise ModelError(f"model distribution sums to {total!r}")


def _log(probs: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(probs)


class TableModel(TranslationModel):
    """Returns explicitly listed distributions; anything unlisted gets the fallback."""

    def __init__(self, vocab, listing: Mapping[tuple[tuple[str, ...], tuple[str, ...]], np.ndarray],
                 fallback: np.ndarray):
        super().__init__(vocab)
        self.listing = dict(listing)
        self.fallback = fallback

    def next_log_distribution(self, source, prefix):
        return self.listing.get((tuple(source), tuple(prefix)), self.fallback)


def _normalized_vector(dist: Mapping[str, float], token_index: Mapping[str, int], what: str) -> np.ndarray:
    probs = np.zeros(len(token_index))
    for tok, p in dist.items():
        if p < 0:
            raise ModelError(f"{what}: negative probability for {tok!r}")
        probs[token_index[tok]] += p
    total = math.fsum(dist.values())
    if abs(total - 1.0) > 1e-9:
        raise ModelError(f"{what}: probabilities sum to {total!r}, not 1")
    return _log(probs)


def make_table_model(listing: Mapping[tuple[Sequence[str], Sequence[str]], Mapping[str, float]],
                     fallback: Mapping[str, float],
                     vocab: Iterable[str] | None = None) -> TableModel:
    """Build a :class:`TableModel` from ``{(source, prefix): {token: prob}}``.

    The vocabulary defaults to BOS, EOS and every other listed token in sorted
    order.  Each distribution must sum to 1 within 1e-9.
    """
    if vocab is None:
        seen = set(fallback)
        for dist in listing.values():
            seen.update(dist)
        seen.discard(BOS)
        seen.discard(EOS)
        vocab = (BOS, EOS, *sorted(seen))
    vocab = tuple(vocab)
    index = {tok: k for k, tok in enumerate(vocab)}
    vectors = {}
    for (src, prefix), dist in listing.items():
        key = (tuple(src), tuple(prefix))
        vectors[key] = _normalized_vector(dist, index, f"context {key!r}")
    return TableModel(vocab, vectors, _normalized_vector(fallback, index, "fallback"))


def _parse_dist(text: str, what: str) -> dict[str, float]:
    dist: dict[str, float] = {}
    for item in text.split(","):
        tok, sep, p = item.rpartition(":")
        if not sep or not tok:
            raise ModelError(f"{what}: malformed entry {item!r}")
        try:
            dist[tok] = dist.get(tok, 0.0) + float(p)
        except ValueError:
            raise ModelError(f"{what}: malformed probability {p!r}") from None
    return dist


def load_table_model(path) -> TableModel:
    """Read a listing file: ``source TAB prefix TAB tok:prob,tok:prob,...``.

    ``source`` is the space-joined source sentence and ``prefix`` starts with
    BOS.  A record whose source and prefix are both ``*`` is the fallback.
    """
    listing = {}
    fallback = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            what = f"{path}:{lineno}"
            if len(fields) != 3:
                raise ModelError(f"{what}: expected 3 tab-separated fields")
            src, prefix, dist = fields
            dist = _parse_dist(dist, what)
            if src == "*" and prefix == "*":
                fallback = dist
                continue
            ptoks = prefix.split(" ")
            if ptoks[0] != BOS:
                raise ModelError(f"{what}: prefix must start with {BOS}")
            listing[(tuple(src.split(" ")), tuple(ptoks[1:]))] = dist
    if fallback is None:
        raise ModelError(f"{path}: no fallback record")
    return make_table_model(listing, fallback)


def _stable_seed(*parts) -> int:
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "little")


class LexiconModel(TranslationModel):
    """Word-for-word translation with seeded confusions.

    At step ``t`` the intended output is the lexicon translation of source
    token ``t`` (EOS once past the end).  Each source word type has a fixed
    confusion set: its translation plus ``confusion_size - 1`` distractors.
    With probability ``noise_eps`` (drawn once per sentence and step) the
    emitted token is instead a uniform pick from that set.  The returned
    distribution puts ``1 - eps`` on the emitted token and spreads ``eps``
    evenly over the confusion set, so the argmax is correct with probability
    ``1 - eps * (1 - 1/confusion_size)``.

    Distractors are drawn from the whole target vocabulary unless
    ``distractors`` names a narrower pool of target tokens for a source word.
    """

    def __init__(self, lexicon: Mapping[str, str], noise_eps: float = 0.0, seed: int = 0,
                 confusion_size: int = 4, distractors: Mapping[str, Sequence[str]] | None = None):
        if not 0.0 <= noise_eps < 1.0:
            raise ValueError("noise_eps must lie in [0, 1)")
        if confusion_size < 1:
            raise ValueError("confusion_size must be >= 1")
        distractors = dict(distractors or {})
        targets = set(lexicon.values())
        for pool in distractors.values():
            targets.update(pool)
        targets = sorted(targets - {BOS, EOS})
        super().__init__((BOS, EOS, *targets))
        self.lexicon = dict(lexicon)
        self.noise_eps = noise_eps
        self.seed = seed
        self.confusion_size = min(confusion_size, len(targets) + 1)
        self._targets = targets
        self.distractors = distractors
        self._csets: dict[str | None, tuple[int, ...]] = {}
        self._cached_step = lru_cache(maxsize=1 << 16)(self._step)

    def confusion_set(self, src_token: str | None) -> tuple[int, ...]:
        """Vocabulary ids of the confusion set; the correct id comes first."""
        cached = self._csets.get(src_token)
        if cached is not None:
            return cached
        if src_token is None:
            correct = self.eos_id
        else:
            try:
                correct = self.token_index[self.lexicon[src_token]]
            except KeyError:
                raise ModelError(f"source token {src_token!r} missing from lexicon") from None
        rng = np.random.default_rng(_stable_seed("confusion", self.seed, src_token))
        pool = self.distractors.get(src_token, self._targets)
        pool = sorted({self.token_index[t] for t in pool} - {correct, self.token_index[BOS], self.eos_id})
        size = min(self.confusion_size - 1, len(pool))
        picks = rng.choice(len(pool), size=size, replace=False) if size else []
        cset = (correct, *(pool[k] for k in picks))
        self._csets[src_token] = cset
        return cset

    def emitted(self, source: tuple[str, ...], t: int) -> int:
        """Vocabulary id carrying the ``1 - eps`` mass at step ``t``."""
        src_token = source[t] if t < len(source) else None
        cset = self.confusion_set(src_token)
        if self.noise_eps == 0.0:
            return cset[0]
        rng = np.random.default_rng(_stable_seed("noise", self.seed, " ".join(source), t))
        if rng.random() < self.noise_eps:
            return cset[int(rng.integers(len(cset)))]
        return cset[0]

    def _step(self, source: tuple[str, ...], t: int) -> np.ndarray:
        src_token = source[t] if t < len(source) else None
        cset = self.confusion_set(src_token)
        probs = np.zeros(len(self.vocab))
        share = self.noise_eps / len(cset)
        for k in cset:
            probs[k] += share
        probs[self.emitted(source, t)] += 1.0 - self.noise_eps
        out = _log(probs)
        out.flags.writeable = False
        return out

    def next_log_distribution(self, source, prefix):
        return self._cached_step(tuple(source), len(prefix))


def make_lexicon_model(lexicon: Mapping[str, str], noise_eps: float, seed: int,
                       confusion_size: int = 4,
                       distractors: Mapping[str, Sequence[str]] | None = None) -> LexiconModel:
    return LexiconModel(lexicon, noise_eps, seed, confusion_size, distractors)


def read_lexicon_file(path) -> tuple[dict[str, str], dict[str, list[str]]]:
    """Read ``source TAB target [TAB distractor,distractor,...]`` lines.

    Returns the lexicon and the distractor pools named in the optional
    third column.
    """
    lexicon: dict[str, str] = {}
    distractors: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
                raise ModelError(f"{path}:{lineno}: expected 'source<TAB>target[<TAB>distractors]'")
            lexicon[parts[0]] = parts[1]
            if len(parts) == 3 and parts[2]:
                pool = parts[2].split(",")
                if "" in pool:
                    raise ModelError(f"{path}:{lineno}: empty distractor")
                distractors[parts[0]] = pool
    return lexicon, distractors


def load_lexicon(path) -> dict[str, str]:
    return read_lexicon_file(path)[0]


def save_lexicon(path, lexicon: Mapping[str, str],
                 distractors: Mapping[str, Sequence[str]] | None = None) -> None:
    distractors = distractors or {}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for src in sorted(lexicon):
            pool = distractors.get(src)
            extra = "\t" + ",".join(pool) if pool else ""
            f.write(f"{src}\t{lexicon[src]}{extra}\n")
