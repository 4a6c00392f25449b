"""Beam search with piece rewards and length-normalized final ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..pieces import EMPTY_TABLE, MAX_NGRAM, PieceTable
from .models import TranslationModel, check_distribution
from .rewards import piece_rewards

DEFAULT_LAMBDA = 1.5
DEFAULT_BEAM = 5


@dataclass(frozen=True)
class DecodeConfig:
    lam: float = DEFAULT_LAMBDA
    beam_size: int = DEFAULT_BEAM
    max_output_len: int | None = None
    max_ngram: int = MAX_NGRAM
    check_model: bool = True

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError("lam must be finite and >= 0")
        if self.max_output_len is not None and self.max_output_len < 1:
            raise ValueError("max_output_len must be >= 1")
        if self.max_ngram != MAX_NGRAM:
            raise ValueError(f"max_ngram is fixed at {MAX_NGRAM}")

    def output_limit(self, source_len: int) -> int:
        if self.max_output_len is not None:
            return self.max_output_len
        return 2 * source_len + 10


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[str, ...]
    base_logprob: float = 0.0
    reward_total: float = 0.0
    finished: bool = False

    @property
    def score(self) -> float:
        return self.base_logprob + self.reward_total

    @property
    def normalized_score(self) -> float:
        if not self.tokens:
            return -math.inf
        return self.score / len(self.tokens)

    @property
    def output(self) -> tuple[str, ...]:
        """Tokens without the trailing EOS."""
        if self.finished:
            return self.tokens[:-1]
        return self.tokens


@dataclass
class DecodeResult:
    nbest: list[Hypothesis] = field(default_factory=list)

    @property
    def best(self) -> Hypothesis:
        return self.nbest[0]


def rank_key(h: Hypothesis):
    return (-h.normalized_score, h.tokens)


def beam_search(model: TranslationModel, source: tuple[str, ...], table: PieceTable | None = None,
                config: DecodeConfig = DecodeConfig()) -> DecodeResult:
    """Decode ``source`` keeping ``beam_size`` partial hypotheses per step.

    Pruning uses the unnormalized guided score.  Hypotheses that emit EOS
    move to the finished pool; search stops once the pool holds
    ``beam_size`` entries or the output limit is reached, in which case the
    surviving partial hypotheses are ranked alongside the finished ones.
    """
    source = tuple(source)
    table = EMPTY_TABLE if table is None else table
    lam = config.lam
    use_rewards = bool(table.unigrams)
    vocab = model.vocab
    index = model.token_index
    eos = model.eos_id
    k = config.beam_size
    limit = config.output_limit(len(source))

    live = [Hypothesis(())]
    finished: list[Hypothesis] = []
    for _ in range(limit):
        cands = []
        dists = []
        for h_idx, hyp in enumerate(live):
            logp = model.next_log_distribution(source, hyp.tokens)
            if config.check_model:
                check_distribution(logp, len(vocab))
            dists.append(logp)
            step = np.array(logp, dtype=np.float64, copy=True)
            rewards = {}
            if use_rewards:
                for u, r in piece_rewards(hyp.tokens, table, lam).items():
                    j = index.get(u)
                    if j is not None:
                        rewards[j] = r
                        step[j] += r
            total = hyp.score + step
            finite = np.flatnonzero(np.isfinite(total))
            if len(finite) > k:
                top = finite[np.argpartition(-total[finite], k - 1)[:k]]
                # include ties at the boundary so the final sort decides them
                cutoff = total[top].min()
                top = finite[total[finite] >= cutoff]
            else:
                top = finite
            for j in top.tolist():
                cands.append((-float(total[j]), h_idx, j, rewards.get(j, 0.0)))
        if not cands:
            live = []
            break
        cands.sort()
        new_live = []
        for _neg, h_idx, j, r in cands[:k]:
            parent = live[h_idx]
            hyp = Hypothesis(parent.tokens + (vocab[j],),
                             parent.base_logprob + float(dists[h_idx][j]),
                             parent.reward_total + r,
                             j == eos)
            if hyp.finished:
                finished.append(hyp)
            else:
                new_live.append(hyp)
        live = new_live
        if len(finished) >= k:
            live = []
            break

    pool = finished + live
    pool.sort(key=rank_key)
    return DecodeResult(pool)
