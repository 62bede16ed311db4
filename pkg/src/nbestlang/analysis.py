"""Feature objects extracted from a parse: head-relation triples with
semantic-class abstraction, rule uses, structural flags and word N-grams."""

from __future__ import annotations

import collections
import json
from dataclasses import dataclass, field

from .grammar.trees import nodes, parse_bracket, realize, rule_ids, words as tree_words

BOS, EOS = "<s>", "</s>"
PP_REL = "pp"
OBJ_REL = "obj"


def head_leaf(tree, grammar):
    while not tree.is_leaf:
        rule = grammar.rule(tree.rule_id)
        tree = tree.children[(rule.head or 1) - 1]
    return tree


def extract_triples(tree, grammar, lexicon) -> collections.Counter:
    """(head, relation, dependent) for every annotated attachment.

    Integer or label slots give ``(mother head, slot, daughter head)``.  A
    ``pp`` slot gives one triple per ``obj`` slot of the attached phrase,
    with the preposition's root as the relation.  ``obj`` slots emit
    nothing on their own.
    """

    def pred(t):
        return lexicon.sem_class(head_leaf(t, grammar).root)

    out: collections.Counter = collections.Counter()
    for node in nodes(tree):
        rule = grammar.rule(node.rule_id)
        if not rule.args:
            continue
        h = None
        for pos, rel in rule.args:
            if rel == OBJ_REL:
                continue
            dep = node.children[pos - 1]
            h = h or pred(node)
            if rel == PP_REL:
                if dep.is_leaf:
                    continue
                prep = head_leaf(dep, grammar).root
                for ppos, prel in grammar.rule(dep.rule_id).args:
                    if prel == OBJ_REL:
                        out[(h, prep, pred(dep.children[ppos - 1]))] += 1
            else:
                out[(h, rel, pred(dep))] += 1
    return out


def _num(fs):
    v = fs.get("num") if fs else None
    return v if isinstance(v, str) else None


def count_num_mismatch(tree, grammar) -> int:
    """Clauses whose main verb is ``be`` and whose predicate nominal disagrees
    with the verb in number (e.g. *what is the first flights*)."""
    n = 0
    for node in nodes(tree):
        kids = node.children
        for i, k in enumerate(kids):
            if k.is_leaf and k.feats.get("be") == "y":
                pred = next((c for c in kids[i + 1:] if not c.is_leaf and c.cat == "np"), None)
                if pred is None:
                    continue
                vn, pn = _num(k.feats), _num(pred.feats)
                if vn and pn and vn != pn:
                    n += 1
    return n


# name -> callable(tree, grammar) -> int; extend by registering more counters
STRUCTURAL_FLAGS = {
    "num_mismatch": count_num_mismatch,
}


def structural_flags(tree, grammar, registry=None) -> dict:
    reg = STRUCTURAL_FLAGS if registry is None else registry
    return {name: int(fn(tree, grammar)) for name, fn in sorted(reg.items())}


def word_ngrams(words, n) -> collections.Counter:
    """N-grams over the token sequence padded with one boundary symbol per side."""
    if not 1 <= n <= 4:
        raise ValueError("n must be between 1 and 4")
    seq = [BOS] + [w.lower() for w in words] + [EOS]
    return collections.Counter(tuple(seq[i:i + n]) for i in range(len(seq) - n + 1))


@dataclass
class Analysis:
    """A parse of one (possibly repaired) hypothesis plus its feature objects."""

    utt_id: str
    hyp_index: int
    hypothesis: object
    tree: object
    source: str                     # "specialized" | "general"
    triples: collections.Counter = field(default_factory=collections.Counter)
    rules_used: collections.Counter = field(default_factory=collections.Counter)
    structural: dict = field(default_factory=dict)
    ngrams: dict = field(default_factory=dict)

    @property
    def words(self):
        return tuple(tree_words(self.tree))

    def objects(self, kind):
        if kind == "triple":
            return self.triples
        if kind == "rule":
            return self.rules_used
        if kind.startswith("ngram"):
            return self.ngrams[int(kind[5:])]
        raise KeyError(kind)

    def to_record(self) -> str:
        """One tab-separated line: utt, rank, source, tree, triples, flags."""
        h = self.hypothesis
        rank = h.rank if not h.is_repaired else f"r{h.source_rank}"
        triples = sorted([list(map(str, t)), c] for t, c in self.triples.items())
        return "\t".join([
            self.utt_id, str(rank), self.source, self.tree.to_bracket(),
            json.dumps(triples, separators=(",", ":")),
            json.dumps(self.structural, sort_keys=True, separators=(",", ":")),
        ])


def analyze(utt_id, hyp_index, hypothesis, tree, grammar, lexicon, source="general",
            max_n=4, registry=None) -> Analysis:
    return Analysis(
        utt_id=utt_id,
        hyp_index=hyp_index,
        hypothesis=hypothesis,
        tree=tree,
        source=source,
        triples=extract_triples(tree, grammar, lexicon),
        rules_used=collections.Counter(rule_ids(tree)),
        structural=structural_flags(tree, grammar, registry),
        ngrams={n: word_ngrams(hypothesis.words, n) for n in range(1, max_n + 1)},
    )


def parse_record(line, grammar, lexicon):
    """Inverse of :meth:`Analysis.to_record` for the tree and flag fields.

    Returns ``(utt_id, rank, source, tree, triples, flags)``.
    """
    utt, rank, source, bracket, triples, flags = line.rstrip("\n").split("\t")
    tree = realize(grammar, parse_bracket(bracket), lexicon)[0]
    trip = collections.Counter({tuple(int(x) if x.isdigit() else x for x in t): c
                                for t, c in json.loads(triples)})
    return utt, rank, source, tree, trip, json.loads(flags)
