"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 invalid input data, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import DataError, InternalError
from .grammar.chart import parse_chart
from .grammar.trees import words as tree_words
from .pipeline import config as cfgmod
from .pipeline import core
from .pipeline.corpus import CorpusSpec, generate_corpus, sample_trees
from .pipeline.io import format_nbest, format_references, load_corpus
from .preference import PreferenceModel
from .repair import detect_repairs, apply_repairs
from .specialize import expand_tree, parse_lr

EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _kv(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key, value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--set", dest="overrides", action="append", type=_kv, default=[],
                        metavar="KEY=VALUE", help="override one configuration value")
    common.add_argument("--grammar", help="general grammar file (default: shipped toy grammar)")
    common.add_argument("--lexicon", help="lexicon file (default: shipped lexicon)")
    common.add_argument("--treebank", help="bracketed treebank (default: shipped treebank)")
    common.add_argument("--bundle", help="directory written by `specialize` (otherwise the "
                                         "specialized grammar is rebuilt from the treebank)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="nbestlang",
                description="Choose among speech N-best hypotheses using linguistic analysis.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("repair", parents=[common], help="detect repairs in word strings")
    s.add_argument("--input", help="one utterance per line (default: stdin)")

    s = sub.add_parser("parse", parents=[common], help="parse word strings")
    s.add_argument("--with", dest="which", choices=["general", "specialized"], default="general")
    s.add_argument("--input", help="one sentence per line (default: stdin)")

    s = sub.add_parser("specialize", parents=[common], help="build the specialized grammar")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--threshold", type=int, help="minimum pattern count (config: threshold)")

    s = sub.add_parser("train", parents=[common], help="train a preference model")
    s.add_argument("--nbest", required=True)
    s.add_argument("--refs", required=True)
    s.add_argument("--out", required=True, help="model file to write")
    s.add_argument("--slt0-scoring", action="store_true",
                   help="ablation: frequency-only object scores, speech weight by grid search")

    s = sub.add_parser("select", parents=[common], help="choose a hypothesis per utterance")
    s.add_argument("--nbest", required=True)
    s.add_argument("--model", required=True)

    s = sub.add_parser("evaluate", parents=[common], help="evaluate against references")
    s.add_argument("--nbest", required=True)
    s.add_argument("--refs", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--json", help="also write the machine-readable report here")

    s = sub.add_parser("gen-corpus", parents=[common], help="write synthetic data")
    s.add_argument("--kind", choices=["nbest", "treebank", "sentences"], default="nbest")
    s.add_argument("-n", type=int, default=200)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--p-repair", type=float, default=0.1)
    s.add_argument("--list-size", type=int, default=10)
    s.add_argument("--exclude", help="treebank whose sentences must not be sampled again")
    s.add_argument("--out", required=True,
                   help="output file (for --kind nbest, a prefix for .nbest and .ref)")
    for name in ("repair", "parse", "specialize", "train", "select", "evaluate"):
        sub.choices[name].add_argument("--no-fallback", action="store_true",
                                       help="never fall back to the general chart parser")
    return p


def _config(args) -> cfgmod.Config:
    cfg = cfgmod.load_config(args.config) if args.config else cfgmod.Config()
    extra = list(args.overrides)
    if getattr(args, "no_fallback", False):
        extra.append(("fallback_general", "false"))
    if getattr(args, "slt0_scoring", False):
        extra.append(("slt0", "true"))
    if getattr(args, "threshold", None) is not None:
        extra.append(("threshold", str(args.threshold)))
    return cfgmod.apply_overrides(cfg, extra, "command line")


def _bundle(args, cfg, general, lexicon):
    if args.bundle:
        return core.load_bundle(general, lexicon, args.bundle)
    trees = core.read_treebank(general, lexicon, args.treebank)
    return core.build_bundle(general, lexicon, trees, cfg.threshold)


def _lines(path):
    fh = open(path, encoding="utf-8") if path else sys.stdin
    try:
        return [l.split() for l in fh if l.strip()]
    finally:
        if path:
            fh.close()


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def run(args, out) -> int:
    cfg = _config(args)
    general, lexicon = core.load_general(args.grammar, args.lexicon)
    cmd = args.command

    if cmd == "repair":
        for words in _lines(args.input):
            cands = detect_repairs(words, lexicon, cfg.repair_span_cap)
            rec = {"words": " ".join(words),
                   "candidates": [{"reparandum": [c.reparandum.start, c.reparandum.end],
                                   "repair": [c.repair.start, c.repair.end], "score": c.score,
                                   "deleted": words[c.reparandum.start:c.reparandum.end]} for c in cands],
                   "repaired": " ".join(apply_repairs(words, cands)) if cands else None}
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        return 0

    if cmd == "parse":
        bundle = _bundle(args, cfg, general, lexicon) if args.which == "specialized" else None
        for words in _lines(args.input):
            if bundle is None:
                trees = parse_chart(general, words, lexicon, max_trees=cfg.max_trees)
            else:
                found = parse_lr(bundle.table, bundle.specialized, words, lexicon, cfg.max_stacks)
                trees = [expand_tree(t, bundle.specialized, general) for t in found]
            out.write(f"# {' '.join(words)}\t{len(trees)}\n")
            for t in trees:
                out.write(t.to_bracket() + "\n")
        return 0

    if cmd == "specialize":
        trees = core.read_treebank(general, lexicon, args.treebank)
        _, stats = core.specialize_command(general, lexicon, trees, cfg.threshold, args.out)
        out.write(json.dumps(stats, indent=1, sort_keys=True) + "\n")
        # with threshold 1 every treebank chunk has a rule, so coverage must be total
        if cfg.threshold == 1 and stats["treebank_coverage"] < 1.0:
            raise InternalError("specialized grammar does not cover its own treebank")
        return 0

    if cmd == "gen-corpus":
        if args.kind == "nbest":
            spec = CorpusSpec(args.n, args.list_size, args.seed, p_repair=args.p_repair)
            utts = generate_corpus(general, lexicon, spec)
            _write(args.out + ".nbest", format_nbest(utts))
            _write(args.out + ".ref", format_references([u.reference for u in utts]))
        else:
            exclude = ()
            if args.exclude:
                exclude = [tree_words(t) for t in core.read_treebank(general, lexicon, args.exclude)]
            trees = sample_trees(general, lexicon, args.n, args.seed, exclude=exclude)
            if args.kind == "treebank":
                _write(args.out, "".join(t.to_bracket() + "\n" for t in trees))
            else:
                _write(args.out, "".join(" ".join(tree_words(t)) + "\n" for t in trees))
        return 0

    bundle = _bundle(args, cfg, general, lexicon)

    if cmd == "train":
        utts = load_corpus(args.nbest, args.refs)
        model = core.train_pipeline(utts, bundle, cfg)
        model.save(args.out)
        meta = model.weights.meta
        out.write(f"objective trajectory: {meta.get('objective')}\n")
        if "residual" in meta:
            out.write(f"phase 1 residual: {meta['residual']:.6f}\n")
        for name, w in model.weights.weights.items():
            out.write(f"  {name:<14}{w: .6f}\n")
        return 0

    model = PreferenceModel.load(args.model)
    if model.weights is None:
        raise DataError(f"{args.model}: model has no scaling factors")

    if cmd == "select":
        for u in load_corpus(args.nbest):
            res = core.run_utterance(u.truncated(cfg.nbest), bundle, model, cfg)
            out.write(res.to_json() + "\n")
        return 0

    if cmd == "evaluate":
        utts = load_corpus(args.nbest, args.refs)
        report = core.evaluate(utts, bundle, model, cfg)
        out.write(report.to_text())
        if args.json:
            _write(args.json, report.to_json())
        return 0

    raise UsageError(f"unknown command {cmd}")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InternalError, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
