"""Bottom-up active chart parser for unification grammars.

Passive edges are packed by (start, end, category, features); all
derivations of a packed edge are kept so every tree can be read off at the
end.  Unification happens when an active edge absorbs a passive one.
"""

from __future__ import annotations

import itertools

from .featstruct import EMPTY, FAIL, resolve, unify_into
from .trees import Node


class _Passive:
    __slots__ = ("key", "derivs")

    def __init__(self, key):
        self.key = key            # (i, j, cat, feats)
        self.derivs = []          # [(rule, children_keys)] or [("leaf", Leaf)]


def parse_chart(grammar, words, lexicon=None, max_trees=None) -> list:
    """All complete parses of ``words`` rooted at the start category.

    Trees are sorted by their bracketed form, which makes the order a
    function of the derivations only.  A word without a grammar entry
    yields no parse.
    """
    words = [w.lower() for w in words]
    n = len(words)
    if n == 0:
        return []
    chart: dict = {}
    by_start: dict = {}       # (i, cat) -> [passive]
    waiting: dict = {}        # (j, cat) -> [(rule, dot, i, env, kids)]
    agenda = []

    def add_passive(i, j, cat, feats, deriv):
        key = (i, j, cat, feats)
        edge = chart.get(key)
        if edge is None:
            edge = chart[key] = _Passive(key)
            agenda.append(edge)
        edge.derivs.append(deriv)

    def advance(rule, dot, i, env, kids, edge):
        _, j, cat, feats = edge.key
        spec = rule.daughters[dot]
        if spec.fs:
            env = dict(env)
            if unify_into(spec.fs, feats, env) is FAIL:
                return
        kids = kids + (edge.key,)
        dot += 1
        if dot == len(rule.daughters):
            mfs = resolve(rule.mother.fs, env, drop_unbound=True) if rule.mother.fs else EMPTY
            add_passive(i, j, rule.mother.cat, mfs, (rule, kids))
            return
        nxt = rule.daughters[dot].cat
        item = (rule, dot, i, env, kids)
        waiting.setdefault((j, nxt), []).append(item)
        for other in list(by_start.get((j, nxt), ())):
            advance(rule, dot, i, env, kids, other)

    for i, w in enumerate(words):
        lvs = grammar.leaves(w, lexicon)
        if not lvs:
            return []
        for lf in lvs:
            add_passive(i, i + 1, lf.cat, lf.feats, ("leaf", lf))

    while agenda:
        edge = agenda.pop()
        i, j, cat, _ = edge.key
        # indexed only once processed, so each (active, passive) pair meets once
        by_start.setdefault((i, cat), []).append(edge)
        for rule in grammar.rules_starting_with(cat):
            advance(rule, 0, i, {}, (), edge)
        for rule, dot, start, env, kids in list(waiting.get((i, cat), ())):
            advance(rule, dot, start, env, kids, edge)

    tops = [e for k, e in chart.items() if k[0] == 0 and k[1] == n and k[2] == grammar.start]
    memo: dict = {}
    trees = []
    for e in tops:
        trees.extend(_trees(e.key, chart, memo, frozenset()))
    trees.sort(key=lambda t: t.to_bracket())
    if max_trees is not None:
        trees = trees[:max_trees]
    return trees


def _trees(key, chart, memo, active):
    if key in memo:
        return memo[key]
    if key in active:
        # unary cycle; no finite tree through here
        return []
    active = active | {key}
    out = []
    for deriv in chart[key].derivs:
        if deriv[0] == "leaf":
            out.append(deriv[1])
            continue
        rule, kids = deriv
        options = [_trees(k, chart, memo, active) for k in kids]
        for combo in itertools.product(*options):
            out.append(Node(rule.id, key[2], key[3], tuple(combo)))
    memo[key] = out
    return out
