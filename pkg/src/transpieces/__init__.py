"""Retrieval-guided decoding with translation pieces."""

from .corpus import (
    CorpusError,
    ParallelCorpus,
    ParallelExample,
    dedup_corpus,
    length_filter,
    load_corpus,
    save_corpus,
)
from .pieces import (
    PieceTable,
    binarize_table,
    build_piece_table,
    collect_pieces_single,
    load_table,
    save_table,
)
from .retrieval import Candidate, InvertedIndex, build_index, search
from .similarity import (
    RetrievedMatch,
    compute_match,
    edit_distance_with_matches,
    sentence_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "Candidate", "CorpusError", "InvertedIndex", "ParallelCorpus", "ParallelExample", "PieceTable",
    "RetrievedMatch", "binarize_table", "build_index", "build_piece_table", "collect_pieces_single",
    "compute_match", "dedup_corpus", "edit_distance_with_matches", "length_filter", "load_corpus",
    "load_table", "save_corpus", "save_table", "search", "sentence_similarity",
]
