"""Command-line entry points for the full pipeline.

Subcommands: build-benchmark, train, eval, robustness, align, complete,
serve. Exit codes: 0 success, 2 usage error, 1 runtime failure. Set
GWLAN_LOG=debug|info|warning|error to control log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import benchmark, corpus, service, trainer, transtable, wpm
from .benchmark import ContextType, SamplerConfig
from .errors import GwlanError
from .evaluator import evaluate, robustness_curve, save_robustness
from .romanize import Romanizer
from .transtable import TranslationTable, baseline_predictor

log = logging.getLogger(__name__)


def _romanizer(path: str | None) -> Romanizer:
    return Romanizer.from_file(path) if path else Romanizer.identity()


def _add_bundle_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--src-vocab", required=True)
    p.add_argument("--tgt-vocab", required=True)
    p.add_argument("--romanizer", default=None, help="typing-form table (tsv)")
    p.add_argument("--case-fold", action="store_true")


def _bundle(args):
    return service.build_bundle(
        args.checkpoint, args.src_vocab, args.tgt_vocab,
        rom_path=args.romanizer, case_fold=args.case_fold,
    )


# --- build-benchmark


def _cmd_build_benchmark(args) -> int:
    pairs = corpus.load_parallel(args.source, args.target)
    rom = _romanizer(args.romanizer)
    cfg = SamplerConfig(
        seed=args.seed,
        max_context_len=args.max_context_len,
        min_sentence_len=args.min_sentence_len,
        long_word_boost=args.long_word_boost,
        long_word_chars=args.long_word_chars,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    types = list(ContextType) if args.ctype == "all" else [ContextType(args.ctype)]
    for ctype in types:
        examples = benchmark.build_dataset(pairs, ctype, cfg, rom)
        path = out_dir / f"{args.prefix}.{ctype.value}.jsonl"
        benchmark.write_dataset(examples, path)
        print(f"{path}: {len(examples)} examples")
    src_vocab = corpus.build_vocab(pairs.sources, args.min_count, args.max_size)
    tgt_vocab = corpus.build_vocab(pairs.targets, args.min_count, args.max_size)
    src_vocab.save(out_dir / "src_vocab.tsv")
    tgt_vocab.save(out_dir / "tgt_vocab.tsv")
    print(f"vocab: {len(src_vocab)} source, {len(tgt_vocab)} target entries")
    return 0


# --- train


def _load_split(data_dir: Path, split: str, ctype: ContextType):
    return benchmark.read_dataset(data_dir / f"{split}.{ctype.value}.jsonl")


def _cmd_train(args) -> int:
    data_dir = Path(args.data_dir)
    src_vocab = corpus.Vocabulary.load(data_dir / "src_vocab.tsv")
    tgt_vocab = corpus.Vocabulary.load(data_dir / "tgt_vocab.tsv")
    rom = _romanizer(args.romanizer)
    overrides = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            overrides = json.load(fh)
    wpm_cfg = wpm.WpmConfig(
        src_vocab_size=len(src_vocab),
        tgt_vocab_size=len(tgt_vocab),
        **overrides.get("wpm", {}),
    )
    train_cfg = trainer.TrainConfig(**overrides.get("train", {}))
    datasets = {
        ctype: (_load_split(data_dir, "train", ctype), _load_split(data_dir, "valid", ctype))
        for ctype in ContextType
    }
    if args.strategy == "joint":
        result = trainer.train_joint(
            datasets, src_vocab, tgt_vocab, rom, wpm_cfg, train_cfg, log_path=args.log
        )
        wpm.save_checkpoint(args.out, result.params, wpm_cfg)
        report = result.report
        print(f"{args.out}: best avg {report.best_accuracy:.4f} at step {report.best_step}")
    else:
        prefix = f"{args.log}." if args.log else None
        results = trainer.train_separate(
            datasets, src_vocab, tgt_vocab, rom, wpm_cfg, train_cfg, log_prefix=prefix
        )
        for ctype, result in results.items():
            path = f"{args.out}.{ctype.value}"
            wpm.save_checkpoint(path, result.params, wpm_cfg)
            print(
                f"{path}: best {result.report.best_accuracy:.4f}"
                f" at step {result.report.best_step}"
            )
    return 0


# --- eval / robustness


def _cmd_eval(args) -> int:
    bundle = _bundle(args)
    dataset = benchmark.read_dataset(args.dataset)
    report = evaluate(bundle, dataset)
    for ctype, stats in report.per_type.items():
        print(f"{ctype.value}: {stats.n_match}/{stats.n_all} = {stats.accuracy:.4f}")
    print(f"average: {report.average:.4f}")
    if args.report:
        report.save(args.report)
    return 0


def _cmd_robustness(args) -> int:
    bundle = _bundle(args)
    dataset = benchmark.read_dataset(args.dataset)
    table = TranslationTable.load(args.table)
    ratios = [float(r) for r in args.ratios.split(",") if r.strip()]
    curve = robustness_curve(bundle, dataset, ratios, table, args.seed, bundle.tgt_vocab)
    for key, report in curve.items():
        print(f"ratio {key}: average {report.average:.4f}")
    if args.report:
        save_robustness(curve, args.report)
    return 0


# --- align


def _cmd_align(args) -> int:
    pairs = corpus.load_parallel(args.source, args.target)
    model = transtable.train_alignment(pairs, args.em_iters)
    table = transtable.build_table(pairs, model, args.threshold, args.freq_mode)
    table.save(args.out)
    n = sum(len(row) for row in table.entries.values())
    print(f"{args.out}: {len(table.entries)} source words, {n} entries")
    return 0


# --- complete / serve


def _cmd_complete(args) -> int:
    bundle = _bundle(args)
    suggestions = bundle.complete(
        args.src.split(), args.cl.split(), args.cr.split(), args.typed, args.top_k
    )
    for s in suggestions:
        print(f"{s.word}\t{s.score:.6f}")
    return 0


def _cmd_baseline(args) -> int:
    table = TranslationTable.load(args.table)
    rom = _romanizer(args.romanizer)
    word = transtable.predict_baseline(args.src.split(), args.typed, table, rom)
    print(word)
    return 0


def _cmd_serve(args) -> int:
    bundle = _bundle(args)
    service.serve(bundle, args.port, args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwlan",
        description="Word-level autocompletion for computer-aided translation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-benchmark", help="sample completion datasets from a corpus")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--prefix", default="gwlan")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ctype", choices=["zero", "prefix", "suffix", "bi", "all"], default="all")
    p.add_argument("--romanizer", default=None)
    p.add_argument("--max-context-len", type=int, default=5)
    p.add_argument("--min-sentence-len", type=int, default=5)
    p.add_argument("--long-word-boost", type=float, default=4.0)
    p.add_argument("--long-word-chars", type=int, default=5)
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--max-size", type=int, default=50_000)
    p.set_defaults(func=_cmd_build_benchmark)

    p = sub.add_parser("train", help="optimize a word prediction model")
    p.add_argument("--strategy", choices=["sep", "joint"], required=True)
    p.add_argument("--data-dir", required=True,
                   help="holds train/valid jsonl per context type plus vocab tsvs")
    p.add_argument("--out", required=True, help="checkpoint path (sep appends .<ctype>)")
    p.add_argument("--config", default=None, help="JSON with 'wpm' and 'train' overrides")
    p.add_argument("--romanizer", default=None)
    p.add_argument("--log", default=None, help="JSONL training log path/prefix")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on a dataset")
    _add_bundle_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("robustness", help="accuracy under noisy context")
    _add_bundle_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--ratios", default="0.0,0.2,0.4,0.6,0.8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None)
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("align", help="train the translation-table baseline")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--em-iters", type=int, default=5)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--freq-mode", choices=["links", "unigram"], default="links")
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("complete", help="one-shot completion query")
    _add_bundle_args(p)
    p.add_argument("--src", required=True)
    p.add_argument("--cl", default="")
    p.add_argument("--cr", default="")
    p.add_argument("--typed", required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.set_defaults(func=_cmd_complete)

    p = sub.add_parser("baseline", help="one-shot translation-table prediction")
    p.add_argument("--table", required=True)
    p.add_argument("--romanizer", default=None)
    p.add_argument("--src", required=True)
    p.add_argument("--typed", required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("serve", help="run the completion HTTP service")
    _add_bundle_args(p)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("GWLAN_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (GwlanError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
