import random

import pytest
from hypothesis import given, strategies as st

from transpieces.corpus import (
    CorpusError,
    ParallelCorpus,
    dedup_corpus,
    length_filter,
    load_corpus,
    save_corpus,
)


def test_load_parses_links(write_corpus):
    corpus = load_corpus(*write_corpus(["a b"], ["c d e"], ["0-0 1-2"]))
    assert len(corpus) == 1
    ex = corpus[0]
    assert ex.id == 0
    assert ex.source == ("a", "b")
    assert ex.target == ("c", "d", "e")
    assert ex.alignment == ((0, 0), (1, 2))


def test_out_of_bounds_link_reports_line(write_corpus):
    paths = write_corpus(["x y", "a b"], ["p q", "c d e"], ["0-0", "1-5"])
    with pytest.raises(CorpusError) as err:
        load_corpus(*paths)
    assert err.value.lineno == 2
    assert "out of bounds" in str(err.value)


def test_line_count_mismatch(write_corpus):
    with pytest.raises(CorpusError, match="line-count mismatch"):
        load_corpus(*write_corpus(["a", "b"], ["c"], ["0-0", "0-0"]))


@pytest.mark.parametrize("src,align,msg", [
    (["a", ""], ["0-0", "0-0"], "empty line"),
    (["a", "b"], ["0-0", "0_0"], "malformed alignment"),
    (["a", "b"], ["0-0", "x-1"], "malformed alignment"),
    (["a", "b  c"], ["0-0", "0-0"], "empty token"),
])
def test_malformed_input_has_line_number(write_corpus, src, align, msg):
    with pytest.raises(CorpusError, match=msg) as err:
        load_corpus(*write_corpus(src, ["t", "u"], align))
    assert err.value.lineno == 2


def test_empty_alignment_line_allowed(write_corpus):
    corpus = load_corpus(*write_corpus(["a", "b"], ["c", "d"], ["", "0-0"]))
    assert corpus[0].alignment == ()
    assert corpus[1].alignment == ((0, 0),)


def test_dedup_after_load(write_corpus):
    # pairs: (a,x), (b,y), (a,x) -> two distinct pairs
    corpus = load_corpus(*write_corpus(["a", "b", "a"], ["x", "y", "x"], ["0-0", "0-0", "0-0"]))
    deduped = dedup_corpus(corpus)
    assert len(deduped) == 2
    assert [ex.source for ex in deduped] == [("a",), ("b",)]
    assert [ex.id for ex in deduped] == [0, 1]


def test_dedup_identity_without_duplicates(small_corpus):
    assert dedup_corpus(small_corpus) == small_corpus


def test_dedup_first_wins():
    pairs = [([f"s{k}"], [f"t{k}"], [(0, 0)]) for k in range(6)]
    pairs[5] = (["s0"], ["t0"], [])
    corpus = ParallelCorpus.from_pairs(pairs)
    out = dedup_corpus(corpus)
    assert len(out) == 5
    assert out[0].alignment == ((0, 0),)
    assert all(ex.source != ("s0",) for ex in out.examples[1:])


def test_dedup_pair_level_not_source_level():
    corpus = ParallelCorpus.from_pairs([(["a"], ["x"], []), (["a"], ["y"], [])])
    assert len(dedup_corpus(corpus)) == 2


def test_dedup_matches_hash_set_oracle():
    rng = random.Random(3)
    # 5 pairs with two duplicate groups
    base = [(("a", "b"), ("x",)), (("c",), ("y", "z")), (("a", "b"), ("x",)),
            (("d",), ("w",)), (("c",), ("y", "z"))]
    corpus = ParallelCorpus.from_pairs((s, t, []) for s, t in base)
    assert len(dedup_corpus(corpus)) == len(set(base)) == 3
    for _ in range(50):
        pairs = [((rng.choice("abc"),), (rng.choice("xy"),)) for _ in range(rng.randint(1, 12))]
        c = ParallelCorpus.from_pairs((s, t, []) for s, t in pairs)
        assert len(dedup_corpus(c)) == len(set(pairs))


def test_length_filter_drops_long_source():
    long_src = ["w"] * 81
    corpus = ParallelCorpus.from_pairs([(long_src, ["t"], []), (["a"], ["b"], [])])
    out = length_filter(corpus, 80)
    assert len(out) == 1
    assert out[0].source == ("a",)
    assert out[0].id == 0


def test_length_filter_identity_on_short(small_corpus):
    assert length_filter(small_corpus, 80) == small_corpus


def test_length_filter_matches_scan():
    rng = random.Random(7)
    pairs = [(["s"] * rng.randint(1, 15), ["t"] * rng.randint(1, 15), []) for _ in range(40)]
    corpus = ParallelCorpus.from_pairs(pairs)
    out = length_filter(corpus, 10)
    expected = [(tuple(s), tuple(t)) for s, t, _ in pairs if len(s) <= 10 and len(t) <= 10]
    assert [(ex.source, ex.target) for ex in out] == expected


def test_length_filter_rejects_zero(small_corpus):
    with pytest.raises(ValueError):
        length_filter(small_corpus, 0)


tokens = st.sampled_from(["a", "b", "c", "Um@@", "schlags@@", "ü"])
sentences = st.lists(tokens, min_size=1, max_size=6)


@st.composite
def corpora(draw):
    n = draw(st.integers(1, 6))
    pairs = []
    for _ in range(n):
        s = draw(sentences)
        t = draw(sentences)
        links = draw(st.sets(st.tuples(st.integers(0, len(s) - 1), st.integers(0, len(t) - 1)), max_size=5))
        pairs.append((s, t, links))
    return ParallelCorpus.from_pairs(pairs)


@given(corpora())
def test_round_trip(tmp_path_factory, corpus):
    d = tmp_path_factory.mktemp("rt")
    paths = (d / "x.src", d / "x.tgt", d / "x.align")
    save_corpus(corpus, *paths)
    assert load_corpus(*paths) == corpus


@given(corpora())
def test_dedup_idempotent(corpus):
    once = dedup_corpus(corpus)
    assert dedup_corpus(once) == once


@given(corpora(), st.integers(1, 8))
def test_length_filter_subset(corpus, m):
    out = length_filter(corpus, m)
    original = [(ex.source, ex.target, ex.alignment) for ex in corpus]
    for ex in out:
        assert (ex.source, ex.target, ex.alignment) in original
    longest = max(max(len(ex.source), len(ex.target)) for ex in corpus)
    assert length_filter(corpus, longest) == corpus
