import pytest

from transpieces.corpus import save_corpus, ParallelCorpus


@pytest.fixture
def write_corpus(tmp_path):
    """Write raw src/tgt/align lines and return the three paths."""

    def _write(src_lines, tgt_lines, align_lines, name="c"):
        paths = []
        for ext, lines in (("src", src_lines), ("tgt", tgt_lines), ("align", align_lines)):
            p = tmp_path / f"{name}.{ext}"
            p.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
            paths.append(p)
        return tuple(paths)

    return _write


@pytest.fixture
def small_corpus():
    return ParallelCorpus.from_pairs([
        ("a b".split(), "A B".split(), [(0, 0), (1, 1)]),
        ("a c".split(), "A C".split(), [(0, 0), (1, 1)]),
        ("c d".split(), "C D".split(), [(0, 0), (1, 1)]),
    ])


@pytest.fixture
def saved_corpus(tmp_path):
    def _save(corpus, name="train"):
        paths = tuple(tmp_path / f"{name}.{ext}" for ext in ("src", "tgt", "align"))
        save_corpus(corpus, *paths)
        return paths

    return _save
