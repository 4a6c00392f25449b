"""Retrieve, collect pieces, then decode: the end-to-end guided translation."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import ParallelCorpus
from ..pieces import EMPTY_TABLE, PieceTable, binarize_table, build_piece_table
from ..retrieval import Retriever
from ..similarity import RetrievedMatch, compute_match
from .beam import DecodeConfig, DecodeResult, beam_search
from .models import TranslationModel


@dataclass
class Pipeline:
    """A retriever and the corpus it indexes, paired with a model."""

    corpus: ParallelCorpus
    index: Retriever
    model: TranslationModel

    def retrieve(self, source, m: int) -> list[RetrievedMatch]:
        if m <= 0:
            return []
        return [compute_match(source, self.corpus[c.example_id])
                for c in self.index.search(tuple(source), m)]

    def piece_table(self, source, m: int, binary: bool = False) -> PieceTable:
        matches = self.retrieve(source, m)
        if not matches:
            return EMPTY_TABLE
        table = build_piece_table(matches)
        return binarize_table(table) if binary else table


def guided_translate(pipeline: Pipeline, source, m: int, config: DecodeConfig = DecodeConfig(),
                     binary: bool = False) -> DecodeResult:
    source = tuple(source)
    table = pipeline.piece_table(source, m, binary)
    return beam_search(pipeline.model, source, table, config)


def baseline_translate(model: TranslationModel, source, config: DecodeConfig = DecodeConfig()) -> DecodeResult:
    return beam_search(model, tuple(source), EMPTY_TABLE, config)
