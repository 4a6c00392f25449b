from .beam import DecodeConfig, DecodeResult, Hypothesis, beam_search
from .guided import Pipeline, baseline_translate, guided_translate
from .models import (
    BOS,
    EOS,
    LexiconModel,
    ModelError,
    TableModel,
    TranslationModel,
    load_lexicon,
    load_table_model,
    make_lexicon_model,
    make_table_model,
    read_lexicon_file,
    save_lexicon,
)
from .rewards import apply_piece_rewards, piece_rewards, sequence_reward

__all__ = [
    "BOS", "EOS", "DecodeConfig", "DecodeResult", "Hypothesis", "LexiconModel", "ModelError",
    "Pipeline", "TableModel", "TranslationModel", "apply_piece_rewards", "baseline_translate",
    "beam_search", "guided_translate", "load_lexicon", "load_table_model", "make_lexicon_model",
    "make_table_model", "piece_rewards", "read_lexicon_file", "save_lexicon", "sequence_reward",
]
