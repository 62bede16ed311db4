"""The three processing stages (repair expansion, parsing, preference
selection), evaluation with baselines, and training."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

from ..analysis import analyze
from ..errors import DataError
from ..grammar.chart import parse_chart
from ..grammar.core import Grammar, default_grammar
from ..grammar.trees import load_treebank, parse_bracket, realize, words as tree_words
from ..lexicon import Lexicon, default_lexicon
from ..preference import (PreferenceModel, TrainingUtterance, select_index, similarity,
                          total_score, train_model)
from ..repair import Hypothesis, expand_hypotheses
from ..specialize import LRTable, compile_lr, expand_tree, parse_lr, specialize_grammar
from .config import Config


# -- grammar bundle ---------------------------------------------------------------


@dataclass
class GrammarBundle:
    general: Grammar
    specialized: Grammar
    table: LRTable
    lexicon: Lexicon
    _cache: dict = field(default_factory=dict, repr=False)

    def parse(self, words, config: Config):
        """``(trees, source)`` for one word string; trees are general-grammar
        trees.  The specialized LR parser is tried first; the general chart
        parser is used if it finds nothing and fallback is enabled."""
        key = (tuple(words), config.fallback_general, config.max_trees, config.max_stacks)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        trees, source = [], "specialized"
        try:
            spec = parse_lr(self.table, self.specialized, words, self.lexicon, config.max_stacks)
        except RuntimeError:
            spec = []
        seen = set()
        for t in spec:
            g = expand_tree(t, self.specialized, self.general)
            b = g.to_bracket()
            if b not in seen:
                seen.add(b)
                trees.append(g)
            if len(trees) >= config.max_trees:
                break
        if not trees and config.fallback_general:
            source = "general"
            for g in parse_chart(self.general, words, self.lexicon):
                b = g.to_bracket()
                if b not in seen:
                    seen.add(b)
                    trees.append(g)
                if len(trees) >= config.max_trees:
                    break
        self._cache[key] = (trees, source)
        return trees, source

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        self.specialized.save(os.path.join(directory, "specialized.grammar"))
        with open(os.path.join(directory, "lr_table.json"), "w", encoding="utf-8") as fh:
            fh.write(self.table.to_json())


def shipped_text(name) -> str:
    return resources.files("nbestlang").joinpath("data", name).read_text("utf-8")


def shipped_path(name):
    return resources.files("nbestlang").joinpath("data", name)


def load_general(grammar_path=None, lexicon_path=None):
    general = Grammar.load(grammar_path) if grammar_path else default_grammar()
    lexicon = Lexicon.load(lexicon_path) if lexicon_path else default_lexicon()
    return general, lexicon


def read_treebank(general, lexicon, path=None) -> list:
    text = shipped_text("treebank.txt") if path is None else open(path, encoding="utf-8").read()
    return load_treebank(general, text.splitlines(), lexicon)


def build_bundle(general, lexicon, trees, threshold=1) -> GrammarBundle:
    specialized = specialize_grammar(trees, general, threshold)
    return GrammarBundle(general, specialized, compile_lr(specialized), lexicon)


def load_bundle(general, lexicon, directory) -> GrammarBundle:
    spec = Grammar.load(os.path.join(directory, "specialized.grammar"))
    with open(os.path.join(directory, "lr_table.json"), encoding="utf-8") as fh:
        table = LRTable.from_json(fh.read())
    return GrammarBundle(general, spec, table, lexicon)


def specialize_command(general, lexicon, trees, threshold=1, out_dir=None) -> tuple:
    """Build (and optionally write) the specialized grammar and LR table.

    Returns ``(bundle, stats)``; stats report rule counts, treebank
    coverage and ambiguity.
    """
    bundle = build_bundle(general, lexicon, trees, threshold)
    covered, n_parses = 0, 0
    for t in trees:
        res = parse_lr(bundle.table, bundle.specialized, tree_words(t), lexicon)
        brackets = {expand_tree(r, bundle.specialized, general).to_bracket() for r in res}
        covered += t.to_bracket() in brackets
        n_parses += len(res)
    per_cat: dict = {}
    for r in bundle.specialized.rules:
        per_cat[r.mother.cat] = per_cat.get(r.mother.cat, 0) + 1
    stats = {
        "general_rules": len(general.rules),
        "specialized_rules": len(bundle.specialized.rules),
        "rules_by_category": dict(sorted(per_cat.items())),
        "lr_states": bundle.table.n_states,
        "lr_conflicts": len(bundle.table.conflicts),
        "treebank_trees": len(trees),
        "treebank_coverage": covered / len(trees),
        "mean_parses_per_sentence": n_parses / len(trees),
    }
    if out_dir is not None:
        bundle.save(out_dir)
    return bundle, stats


# -- stages ------------------------------------------------------------------------


@dataclass
class SelectionResult:
    utt_id: str
    hypotheses: list                 # expanded list
    analyses: list
    vectors: list
    totals: list
    chosen: int | None               # index into analyses

    @property
    def outcome(self) -> str:
        return "no-analysis-found" if self.chosen is None else "selected"

    @property
    def chosen_analysis(self):
        return None if self.chosen is None else self.analyses[self.chosen]

    @property
    def chosen_hypothesis(self):
        an = self.chosen_analysis
        return None if an is None else an.hypothesis

    def to_json(self) -> str:
        cands = []
        for an, vec, tot in zip(self.analyses, self.vectors, self.totals):
            h = an.hypothesis
            cands.append({"hyp": an.hyp_index, "rank": h.rank, "repaired": h.is_repaired,
                          "words": h.text, "source": an.source, "tree": an.tree.to_bracket(),
                          "scores": vec, "total": tot})
        h = self.chosen_hypothesis
        rec = {"utt_id": self.utt_id, "outcome": self.outcome,
               "chosen": None if h is None else h.text,
               "chosen_repaired": None if h is None else h.is_repaired,
               "chosen_tree": None if h is None else self.chosen_analysis.tree.to_bracket(),
               "candidates": cands}
        return json.dumps(rec, sort_keys=True)


def expand(utterance, bundle, config) -> list:
    if not config.repair:
        return list(utterance.nbest)
    return expand_hypotheses(utterance.nbest, bundle.lexicon, config.repair_penalty,
                             config.repair_span_cap)


def analyze_hypotheses(utt_id, hyps, bundle, config) -> list:
    out = []
    for idx, h in enumerate(hyps):
        trees, source = bundle.parse(h.words, config)
        for t in trees:
            out.append(analyze(utt_id, idx, h, t, bundle.general, bundle.lexicon, source))
    return out


def run_utterance(utterance, bundle, model: PreferenceModel, config: Config) -> SelectionResult:
    hyps = expand(utterance, bundle, config)
    analyses = analyze_hypotheses(utterance.id, hyps, bundle, config)
    top = max(h.acoustic_score for h in hyps)
    vectors = [model.vector(an, top) for an in analyses]
    totals = [total_score(v, model.weights) for v in vectors]
    chosen = select_index(list(zip(analyses, vectors)), model.weights)
    return SelectionResult(utterance.id, hyps, analyses, vectors, totals, chosen)


# -- evaluation --------------------------------------------------------------------

MATRIX_ROWS = ("no_qlf", "right_repair", "wrong_repair", "non_repair")
MATRIX_COLS = ("actual", "false_alarm")


@dataclass
class EvalReport:
    n: int = 0
    combined: int = 0
    speech_only: int = 0
    first_parsable: int = 0
    oracle: int = 0
    no_analysis: int = 0
    repairs_missed: int = 0         # gold repairs for which no repaired hypothesis was proposed
    matrix: dict = field(default_factory=lambda: {r: {c: 0 for c in MATRIX_COLS}
                                                  for r in MATRIX_ROWS})
    per_utterance: list = field(default_factory=list)

    def rate(self, name) -> float:
        return getattr(self, name) / self.n if self.n else 0.0

    def to_json(self) -> str:
        rec = {k: getattr(self, k) for k in ("n", "combined", "speech_only", "first_parsable",
                                             "oracle", "no_analysis", "repairs_missed")}
        rec["matrix"] = self.matrix
        rec["rates"] = {k: round(self.rate(k), 6)
                        for k in ("combined", "speech_only", "first_parsable", "oracle")}
        rec["per_utterance"] = self.per_utterance
        return json.dumps(rec, sort_keys=True, indent=1) + "\n"

    def to_text(self) -> str:
        lines = [f"utterances            {self.n}"]
        for key, label in (("combined", "combined selection"), ("speech_only", "speech only"),
                           ("first_parsable", "first parsable"), ("oracle", "oracle ceiling")):
            lines.append(f"{label:<22}{getattr(self, key):>5}  {100 * self.rate(key):6.1f}%")
        lines.append(f"{'no analysis found':<22}{self.no_analysis:>5}")
        lines.append("")
        lines.append("possible repairs        actual  false-alarm")
        for r in MATRIX_ROWS:
            fa = "-" if r == "right_repair" else str(self.matrix[r]["false_alarm"])
            lines.append(f"{r.replace('_', ' '):<22}{self.matrix[r]['actual']:>8}{fa:>13}")
        tot = {c: sum(self.matrix[r][c] for r in MATRIX_ROWS) for c in MATRIX_COLS}
        lines.append(f"{'total':<22}{tot['actual']:>8}{tot['false_alarm']:>13}")
        lines.append(f"{'repairs missed':<22}{self.repairs_missed:>8}")
        return "\n".join(lines) + "\n"


def evaluate(utterances, bundle, model, config) -> EvalReport:
    """Score combined selection against the speech-only, first-parsable and
    oracle baselines, and tabulate decisions on possible repairs."""
    rep = EvalReport()
    for u in utterances:
        if u.reference is None:
            raise DataError(f"utterance {u.id} has no reference")
        u = u.truncated(config.eval_nbest)
        ref = tuple(u.reference.words)
        res = run_utterance(u, bundle, model, config)
        chosen = res.chosen_hypothesis
        ok = chosen is not None and chosen.words == ref
        speech = u.nbest[0].words == ref
        parsed = {an.hyp_index for an in res.analyses}
        first = next((h for i, h in enumerate(res.hypotheses) if i in parsed), None)
        first_ok = first is not None and first.words == ref
        oracle = any(h.words == ref for h in res.hypotheses)
        rep.n += 1
        rep.combined += ok
        rep.speech_only += speech
        rep.first_parsable += first_ok
        rep.oracle += oracle
        rep.no_analysis += chosen is None
        proposed = any(h.is_repaired for h in res.hypotheses)
        if u.reference.has_repair and not proposed:
            rep.repairs_missed += 1
        if proposed:
            col = "actual" if u.reference.has_repair else "false_alarm"
            if chosen is None:
                row = "no_qlf"
            elif chosen.is_repaired:
                row = "right_repair" if (ok and col == "actual") else "wrong_repair"
            else:
                row = "non_repair"
            rep.matrix[row][col] += 1
        rep.per_utterance.append({"utt_id": u.id, "combined": ok, "speech_only": speech,
                                  "first_parsable": first_ok, "oracle": oracle,
                                  "chosen": None if chosen is None else chosen.text})
    return rep


# -- training ----------------------------------------------------------------------


def gold_analysis(reference, bundle):
    """The reference's analysis: its gold tree if given, else the first chart parse."""
    words = tuple(reference.words)
    h = Hypothesis(words, 0.0, rank=0)
    if reference.tree:
        trees = realize(bundle.general, parse_bracket(reference.tree), bundle.lexicon)
        if not trees:
            raise DataError(f"gold tree for {reference.utt_id} is not valid under the grammar")
        if tuple(tree_words(trees[0])) != words:
            raise DataError(f"gold tree for {reference.utt_id} does not match its words")
    else:
        trees = parse_chart(bundle.general, list(words), bundle.lexicon, max_trees=1)
        if not trees:
            return None
    return analyze(reference.utt_id, -1, h, trees[0], bundle.general, bundle.lexicon)


def training_utterances(utterances, bundle, config) -> list:
    out = []
    for u in utterances:
        if u.reference is None:
            raise DataError(f"utterance {u.id} has no reference")
        u = u.truncated(config.eval_nbest)
        hyps = expand(u, bundle, config)
        analyses = analyze_hypotheses(u.id, hyps, bundle, config)
        ref = tuple(u.reference.words)
        gold = gold_analysis(u.reference, bundle)
        gold_index, best = None, -1.0
        for i, an in enumerate(analyses):
            if an.hypothesis.words != ref:
                continue
            sim = similarity(an, gold, config.similarity_word_weight) if gold is not None else 0.0
            if sim > best:
                gold_index, best = i, sim
        out.append(TrainingUtterance(u.id, analyses, max(h.acoustic_score for h in hyps),
                                     ref, gold, gold_index))
    return out


def train_pipeline(utterances, bundle, config) -> PreferenceModel:
    data = training_utterances(utterances, bundle, config)
    try:
        return train_model(data, alpha=config.alpha, ridge=config.ridge,
                           max_sweeps=config.max_sweeps, delta=config.phase2_delta,
                           word_weight=config.similarity_word_weight, slt0=config.slt0,
                           folds=config.crossfit_folds)
    except ValueError as exc:
        raise DataError(f"training failed: {exc}") from None
