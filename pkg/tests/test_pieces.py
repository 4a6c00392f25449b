import random

import pytest
from hypothesis import given, settings, strategies as st

from transpieces.corpus import ParallelExample
from transpieces.pieces import (
    EMPTY_TABLE,
    PieceTable,
    PieceTableError,
    binarize_table,
    build_piece_table,
    collect_pieces_single,
    dumps_table,
    load_table,
    loads_table,
    save_table,
)
from transpieces.similarity import RetrievedMatch, compute_match


def brute_pieces(target, alignment, unedited):
    """Every span of length <= 4 whose words only link to unedited source words."""
    out = set()
    for i in range(len(target)):
        for j in range(i, min(i + 4, len(target))):
            ok = all(p in unedited for q in range(i, j + 1) for p, qq in alignment if qq == q)
            if ok:
                out.add(tuple(target[i:j + 1]))
    return out


def brute_table(matches):
    scores = {}
    for m in matches:
        if m.similarity <= 0:
            continue
        for p in brute_pieces(m.example.target, m.example.alignment, m.unedited):
            scores[p] = max(scores.get(p, 0.0), m.similarity)
    return scores


def random_example(rng, max_len=12, vocab="abcdef", tvocab="ABCDEF"):
    s = tuple(rng.choice(vocab) for _ in range(rng.randint(1, max_len)))
    t = tuple(rng.choice(tvocab) for _ in range(rng.randint(1, max_len)))
    links = {(rng.randrange(len(s)), rng.randrange(len(t))) for _ in range(rng.randint(0, 2 * len(t)))}
    return ParallelExample(0, s, t, tuple(links))


def random_match(rng, **kw):
    ex = random_example(rng, **kw)
    x = tuple(rng.choice("abcdef") for _ in range(rng.randint(1, kw.get("max_len", 12))))
    return compute_match(x, ex)


def test_identical_input_collects_everything():
    ex = ParallelExample(0, tuple("abcde"), tuple("ABCDE"), tuple((k, k) for k in range(5)))
    m = compute_match(tuple("abcde"), ex)
    expected = {tuple("ABCDE")[i:j] for i in range(5) for j in range(i + 1, min(i + 4, 5) + 1)}
    assert collect_pieces_single(m) == expected
    assert len(expected) == 5 + 4 + 3 + 2


def test_compound_aligned_to_edited_word_is_blocked():
    # the retrieved sentence differs from the input only in its last word,
    # which the three BPE units of the compound are aligned to
    xm = "requirements for the suitability of transhipment facilities".split()
    x = "requirements for the suitability of storage facilities".split()
    ym = "Vorschriften für die Eignung von Um@@ schlags@@ anlagen".split()
    links = [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (5, 6), (5, 7), (6, 7)]
    m = compute_match(x, ParallelExample(0, tuple(xm), tuple(ym), tuple(links)))
    assert 5 not in m.unedited
    got = collect_pieces_single(m)
    assert ("Vorschriften", "für", "die", "Eignung") in got
    assert ("die", "Eignung", "von") in got
    assert ("Um@@", "schlags@@", "anlagen") not in got
    assert ("von", "Um@@", "schlags@@", "anlagen") not in got
    assert not any(tok in p for p in got for tok in ("Um@@", "schlags@@", "anlagen"))


def test_discontiguous_source_alignment_collected():
    # "B C" translates words 0 and 2 of the source, which are not adjacent
    ex = ParallelExample(0, ("a", "z", "b"), ("B", "C"), ((0, 0), (2, 1)))
    m = compute_match(("a", "y", "b"), ex)
    assert m.unedited == {0, 2}
    assert ("B", "C") in collect_pieces_single(m)


def test_unaligned_target_words_collectible():
    ex = ParallelExample(0, ("a", "b"), ("A", "of", "B"), ((0, 0), (1, 2)))
    m = compute_match(("a", "c"), ex)
    assert collect_pieces_single(m) == {("A",), ("of",), ("A", "of")}


def test_word_with_mixed_links_is_blocked():
    ex = ParallelExample(0, ("a", "b"), ("AB",), ((0, 0), (1, 0)))
    m = compute_match(("a", "c"), ex)
    assert collect_pieces_single(m) == set()


def test_collection_matches_brute_force():
    rng = random.Random(1)
    for _ in range(1000):
        m = random_match(rng)
        assert collect_pieces_single(m) == brute_pieces(m.example.target, m.example.alignment, m.unedited)


def test_single_match_scores():
    ex = ParallelExample(0, tuple("abcde"), tuple("ABCDE"), tuple((k, k) for k in range(5)))
    m = compute_match(tuple("abcdx"), ex)
    assert m.similarity == pytest.approx(0.8)
    table = build_piece_table([m])
    assert set(table.scores.values()) == {m.similarity}


def test_max_over_matches():
    ex = ParallelExample(0, ("a",), ("A",), ((0, 0),))
    lo = RetrievedMatch(ex, 0, frozenset({0}), 0.6)
    hi = RetrievedMatch(ex, 0, frozenset({0}), 0.9)
    assert build_piece_table([lo, hi])[("A",)] == 0.9
    assert build_piece_table([hi, lo])[("A",)] == 0.9


def test_zero_similarity_match_contributes_nothing():
    ex = ParallelExample(0, ("a",), ("A",), ())
    assert build_piece_table([RetrievedMatch(ex, 1, frozenset(), 0.0)]) == EMPTY_TABLE


def test_three_matches_small_vocab_against_oracle():
    rng = random.Random(2)
    for _ in range(300):
        matches = [random_match(rng, max_len=6, tvocab="ABCDE") for _ in range(3)]
        table = build_piece_table(matches)
        assert dict(table.scores) == brute_table(matches)
        assert set(table.unigrams) == {p[0] for p in table.scores if len(p) == 1}


def test_tables_closed_and_monotone():
    rng = random.Random(3)
    for _ in range(1000):
        matches = [random_match(rng, max_len=8) for _ in range(rng.randint(0, 4))]
        table = build_piece_table(matches)
        table.validate()
        for p in table.scores:
            assert any(p == m.example.target[i:i + len(p)]
                       for m in matches for i in range(len(m.example.target)))


def test_order_independent():
    rng = random.Random(4)
    for _ in range(100):
        matches = [random_match(rng) for _ in range(5)]
        shuffled = matches[:]
        rng.shuffle(shuffled)
        assert build_piece_table(matches) == build_piece_table(shuffled)


def test_binarize():
    assert binarize_table(EMPTY_TABLE) == EMPTY_TABLE
    t = PieceTable.from_scores({("a",): 0.4, ("a", "b"): 0.4, ("b",): 0.4})
    b = binarize_table(t)
    assert dict(b.scores) == {("a",): 1.0, ("a", "b"): 1.0, ("b",): 1.0}
    assert b.unigrams == t.unigrams


def test_binarize_random():
    rng = random.Random(5)
    for _ in range(50):
        t = build_piece_table([random_match(rng) for _ in range(3)])
        b = binarize_table(t)
        assert set(b.scores) == set(t.scores)
        assert all(v == 1.0 for v in b.scores.values())


def test_save_load_round_trip(tmp_path):
    t = PieceTable.from_scores({("a",): 0.75, ("b",): 1.0, ("a", "b"): 0.5, ("Um@@",): 0.125})
    p = tmp_path / "t.tsv"
    save_table(t, p)
    assert load_table(p) == t
    text = p.read_text(encoding="utf-8")
    assert text.splitlines() == sorted(text.splitlines())
    assert "a b\t0.500000" in text


def test_round_trip_rounds_to_six_digits():
    t = PieceTable.from_scores({("a",): 2 / 3})
    assert loads_table(dumps_table(t))[("a",)] == pytest.approx(2 / 3, abs=5e-7)


@pytest.mark.parametrize("text,msg", [
    ("a b\t0.5\n", "closure"),
    ("a\t1.2\n", "outside"),
    ("a\t0\n", "outside"),
    ("a 0.5\n", "malformed"),
    ("a\tx\n", "malformed"),
    ("a\t0.5\na\t0.5\n", "duplicate"),
    ("a\t0.4\nb\t0.9\na b\t0.5\n", "monotonicity"),
])
def test_load_rejects(text, msg):
    with pytest.raises(PieceTableError, match=msg):
        loads_table(text)


def test_load_error_has_line_number(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("a\t0.5\nb\t1.5\n", encoding="utf-8")
    with pytest.raises(PieceTableError, match=r":2:"):
        load_table(p)


toks = st.sampled_from("abc")


@settings(max_examples=200)
@given(st.lists(st.tuples(st.lists(toks, min_size=1, max_size=6), st.integers(0, 10**6)),
                min_size=0, max_size=4))
def test_property_closure_and_oracle(items):
    matches = []
    for x, seed in items:
        ex = random_example(random.Random(seed), max_len=6, vocab="abc", tvocab="AB")
        matches.append(compute_match(tuple(x), ex))
    table = build_piece_table(matches)
    table.validate()
    assert dict(table.scores) == brute_table(matches)
