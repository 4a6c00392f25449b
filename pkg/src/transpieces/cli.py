"""Command-line entry point: ``transpieces <command> ...``.

Exit codes: 0 on success, 1 on runtime failure, 2 when an input file or
flag fails validation.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .corpus import ParallelCorpus, dedup_corpus, length_filter, load_corpus, parse_sentence, read_lines, \
    save_corpus
from .decoding import (
    DecodeConfig,
    Pipeline,
    beam_search,
    load_table_model,
    make_lexicon_model,
    read_lexicon_file,
    save_lexicon,
)
from .decoding.beam import DEFAULT_BEAM, DEFAULT_LAMBDA
from .evaluation import (
    GAMMA_RANGES,
    GAMMA_VALUES,
    EvalReport,
    OccurrenceTable,
    corpus_bleu,
    count_gamma,
    count_gamma_ranges,
    length_ratio,
    sentence_similarities,
    similarity_histogram,
)
from .pieces import EMPTY_TABLE, MAX_NGRAM, binarize_table, build_piece_table, load_table, \
    save_table
from .retrieval import DEFAULT_M, InvertedIndex, build_index
from .similarity import compute_match

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2


class UsageError(ValueError):
    """Flag combination or value rejected before any work starts."""


@dataclass(frozen=True)
class RunConfig:
    m: int = DEFAULT_M
    lam: float = DEFAULT_LAMBDA
    beam_size: int = DEFAULT_BEAM
    max_ngram: int = MAX_NGRAM
    binary_reward: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise UsageError("--retrieve must be >= 0")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise UsageError("--lambda must be finite and >= 0")
        if self.beam_size < 1:
            raise UsageError("--beam must be >= 1")

    def decode_config(self, max_output_len: int | None = None) -> DecodeConfig:
        return DecodeConfig(lam=self.lam, beam_size=self.beam_size, max_output_len=max_output_len)


def corpus_paths(prefix: str) -> tuple[str, str, str]:
    return f"{prefix}.src", f"{prefix}.tgt", f"{prefix}.align"


def read_sentences(path) -> list[tuple[str, ...]]:
    return [parse_sentence(line, k, str(path)) for k, line in enumerate(read_lines(path), start=1)]


def write_lines(path, lines) -> None:
    text = "".join(line + "\n" for line in lines)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def table_name(k: int) -> str:
    return f"{k:06d}.tsv"


def load_model(args):
    if args.model_table:
        return load_table_model(args.model_table)
    if args.lexicon:
        lexicon, pools = read_lexicon_file(args.lexicon)
        return make_lexicon_model(lexicon, args.noise, args.seed, args.confusion_size, pools)
    raise UsageError("a model is required: --model-table FILE or --lexicon FILE")


def load_retrieval(args) -> tuple[ParallelCorpus, InvertedIndex]:
    if not args.train:
        raise UsageError("--train is required for retrieval")
    corpus = load_corpus(*corpus_paths(args.train))
    index = InvertedIndex.load(args.index) if args.index else build_index(corpus)
    if index.doc_count != len(corpus):
        raise UsageError(f"index covers {index.doc_count} sentences but the corpus has {len(corpus)}")
    return corpus, index


# worker state for --jobs; each process rebuilds it once from the parsed args
_WORKER: dict = {}


def _init_decode_worker(args) -> None:
    _WORKER.clear()
    _WORKER.update(_decode_state(args))


def _decode_state(args) -> dict:
    cfg = RunConfig(args.retrieve, args.lam, args.beam, binary_reward=args.binary_reward, seed=args.seed)
    state = {"cfg": cfg, "model": load_model(args), "pipeline": None, "pieces_dir": args.pieces_dir,
             "baseline": args.baseline, "max_len": args.max_output_len}
    if not args.baseline and not args.pieces_dir and cfg.m > 0:
        corpus, index = load_retrieval(args)
        state["pipeline"] = Pipeline(corpus, index, state["model"])
    return state


def _decode_one(item) -> str:
    k, source = item
    st = _WORKER
    cfg: RunConfig = st["cfg"]
    if st["baseline"]:
        table = EMPTY_TABLE
    elif st["pieces_dir"]:
        table = load_table(Path(st["pieces_dir"]) / table_name(k))
    elif st["pipeline"] is not None:
        table = st["pipeline"].piece_table(source, cfg.m)
    else:
        table = EMPTY_TABLE
    if cfg.binary_reward:
        table = binarize_table(table)
    result = beam_search(st["model"], source, table, cfg.decode_config(st["max_len"]))
    return " ".join(result.best.output)


def cmd_decode(args) -> int:
    sources = read_sentences(args.input)
    if args.baseline and (args.pieces_dir or args.binary_reward):
        raise UsageError("--baseline cannot be combined with --pieces-dir or --binary-reward")
    items = list(enumerate(sources))
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(args.jobs, initializer=_init_decode_worker, initargs=(args,)) as pool:
            lines = list(pool.map(_decode_one, items, chunksize=max(1, len(items) // (4 * args.jobs))))
    else:
        _init_decode_worker(args)
        lines = [_decode_one(item) for item in items]
    write_lines(args.out, lines)
    return EXIT_OK


def cmd_prepare(args) -> int:
    corpus = load_corpus(*corpus_paths(args.train))
    out = corpus if args.no_dedup else dedup_corpus(corpus)
    out = length_filter(out, args.max_len)
    save_corpus(out, *corpus_paths(args.out))
    print(f"kept {len(out)} of {len(corpus)} sentence pairs", file=sys.stderr)
    return EXIT_OK


def cmd_index(args) -> int:
    corpus = load_corpus(*corpus_paths(args.train))
    build_index(corpus).save(args.out)
    return EXIT_OK


def cmd_pieces(args) -> int:
    cfg = RunConfig(m=args.retrieve, binary_reward=args.binary_reward)
    sources = read_sentences(args.input)
    corpus, index = load_retrieval(args)
    pipeline = Pipeline(corpus, index, None)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, source in enumerate(sources):
        save_table(pipeline.piece_table(source, cfg.m, cfg.binary_reward), out / table_name(k))
    return EXIT_OK


def cmd_eval(args) -> int:
    hyps = [tuple(line.split()) for line in read_lines(args.hyp)]
    refs = read_sentences(args.ref)
    if len(hyps) != len(refs):
        raise UsageError(f"{len(hyps)} hypotheses but {len(refs)} references")
    modes = set(args.modes.split(","))
    unknown = modes - {"bleu", "similarity", "count-gamma"}
    if unknown:
        raise UsageError(f"unknown mode(s): {', '.join(sorted(unknown))}")
    report = EvalReport(corpus_bleu(hyps, refs), length_ratio(hyps, refs))
    lines = report.lines()
    if "similarity" in modes:
        if not args.test_src:
            raise UsageError("--test-src is required for the similarity mode")
        corpus, index = load_retrieval(args)
        sims = sentence_similarities(read_sentences(args.test_src), index, corpus, args.retrieve)
        report.similarities = sims
        report.histogram = similarity_histogram(sims)
        lines = report.lines()
        if args.histogram_out:
            write_lines(args.histogram_out, report.histogram_tsv().splitlines())
        else:
            lines += ["", *report.histogram_tsv().splitlines()]
    if "count-gamma" in modes:
        if not args.train:
            raise UsageError("--train is required for the count-gamma mode")
        occ = OccurrenceTable(read_sentences(corpus_paths(args.train)[1]))
        if args.gamma_ranges:
            report.count_gamma = count_gamma_ranges(hyps, refs, occ, GAMMA_RANGES)
        else:
            report.count_gamma = count_gamma(hyps, refs, occ, GAMMA_VALUES)
        if args.count_gamma_out:
            write_lines(args.count_gamma_out, report.count_gamma_tsv().splitlines())
        else:
            lines += ["", *report.count_gamma_tsv().splitlines()]
    write_lines(args.out, lines)
    return EXIT_OK


def _mean_seconds(fn, items) -> float:
    if not items:
        return 0.0
    start = time.perf_counter()
    for item in items:
        fn(item)
    return (time.perf_counter() - start) / len(items)


def cmd_bench(args) -> int:
    sweep = [int(v) for v in args.m_sweep.split(",")]
    if any(m < 0 for m in sweep):
        raise UsageError("--m-sweep values must be >= 0")
    sources = read_sentences(args.input)
    corpus, index = load_retrieval(args)
    model = load_model(args) if (args.model_table or args.lexicon) else None
    cfg = DecodeConfig(lam=args.lam, beam_size=args.beam)
    rows = ["stage\tM\tmean_seconds"]
    for m in sweep:
        cands, tables = {}, {}

        def retrieve(x):
            cands[x] = index.search(x, m) if m > 0 else []

        def collect(x):
            matches = [compute_match(x, corpus[c.example_id]) for c in cands[x]]
            tables[x] = build_piece_table(matches) if matches else EMPTY_TABLE

        rows.append(f"retrieval\t{m}\t{_mean_seconds(retrieve, sources):.6f}")
        rows.append(f"collection\t{m}\t{_mean_seconds(collect, sources):.6f}")
        if model is not None:
            t = _mean_seconds(lambda x: beam_search(model, x, tables[x], cfg), sources)
            rows.append(f"decode\t{m}\t{t:.6f}")
    write_lines(args.out, rows)
    return EXIT_OK


def cmd_generate(args) -> int:
    from .synthetic import generate_suite

    suite = generate_suite(args.n_train, args.n_test, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(suite.train, *corpus_paths(out / "train"))
    write_lines(out / "test.src", [" ".join(s) for s in suite.test_sources])
    write_lines(out / "test.ref", [" ".join(s) for s in suite.test_references])
    save_lexicon(out / "lexicon.tsv", suite.lexicon, suite.distractors)
    return EXIT_OK


def _add_retrieval_args(p, m_default=DEFAULT_M):
    p.add_argument("--train", help="training corpus prefix (PREFIX.src, PREFIX.tgt, PREFIX.align)")
    p.add_argument("--index", help="index file from 'transpieces index'; built in memory if omitted")
    p.add_argument("--retrieve", "-M", type=int, default=m_default, metavar="M",
                   help=f"number of sentence pairs to retrieve (default {m_default}; 10 is much faster)")


def _add_model_args(p):
    p.add_argument("--model-table", help="listing file of explicit next-token distributions")
    p.add_argument("--lexicon", help="lexicon file for the word-for-word toy model")
    p.add_argument("--noise", type=float, default=0.3, help="toy model confusion rate (default 0.3)")
    p.add_argument("--confusion-size", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transpieces", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="deduplicate and length-filter a corpus")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True, help="output corpus prefix")
    p.add_argument("--max-len", type=int, default=80)
    p.add_argument("--no-dedup", action="store_true")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("index", help="build and save the retrieval index")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("pieces", help="write one piece table per input sentence")
    _add_retrieval_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--binary-reward", action="store_true", help="score every piece 1.0")
    p.set_defaults(func=cmd_pieces)

    p = sub.add_parser("decode", help="translate input sentences")
    _add_retrieval_args(p)
    _add_model_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--beam", type=int, default=DEFAULT_BEAM)
    p.add_argument("--max-output-len", type=int, default=None)
    p.add_argument("--binary-reward", action="store_true")
    p.add_argument("--baseline", action="store_true", help="plain beam search without pieces")
    p.add_argument("--pieces-dir", help="read piece tables written by 'transpieces pieces'")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="score hypotheses and run the corpus analyses")
    _add_retrieval_args(p)
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--test-src", help="test source sentences, for the similarity mode")
    p.add_argument("--modes", default="bleu", help="comma list of bleu, similarity, count-gamma")
    p.add_argument("--gamma-ranges", action="store_true", help="report Count_gamma over ranges")
    p.add_argument("--histogram-out")
    p.add_argument("--count-gamma-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time retrieval, collection and decoding over an M sweep")
    _add_retrieval_args(p)
    _add_model_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--m-sweep", default="0,1,10,100")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--beam", type=int, default=DEFAULT_BEAM)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write the synthetic narrow-domain suite")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n-train", type=int, default=5000)
    p.add_argument("--n-test", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        # corpus, table, model and flag errors all derive from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
