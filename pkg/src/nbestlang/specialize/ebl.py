"""Grammar specialization by chunking treebank trees and collapsing each chunk.

A chunk is a maximal subtree rooted at a chunk category, with any lower
chunk-category nodes replaced by stubs.  Collapsing composes the general
rules inside a chunk by unification (partial evaluation of the derivation),
giving one flat rule from the chunk category to its frontier.
"""

from __future__ import annotations

import collections
import dataclasses
from dataclasses import dataclass

from ..errors import DataError, InternalError
from ..grammar.core import Constituent, Grammar, Rule, format_rule
from ..grammar.featstruct import FAIL, FeatureStructure, Var, rename, resolve, unify_into, variables
from ..grammar.trees import Node, apply_rule, validate

NONRECURSIVE = {"np": "nrnp"}


@dataclass(frozen=True)
class Stub:
    """Frontier placeholder for a lower chunk."""

    cat: str            # backbone category (e.g. nrnp)
    chunk: int          # index of the chunk it stands for
    orig_cat: str       # category in the general grammar

    is_leaf = True


@dataclass(frozen=True)
class Chunk:
    root_cat: str
    subtree: Node
    frontier: tuple


def _contains(tree, cats) -> bool:
    if tree.is_leaf:
        return False
    return any((not c.is_leaf and (c.cat in cats or _contains(c, cats))) for c in tree.children)


def backbone_cat(node, chunk_roots, nonrecursive=NONRECURSIVE) -> str:
    """Chunk category used for ``node`` in the specialized grammar."""
    alt = nonrecursive.get(node.cat)
    if alt is not None and not _contains(node, chunk_roots):
        return alt
    return node.cat


def cut_tree(tree, chunk_roots, nonrecursive=NONRECURSIVE) -> list:
    """Cut ``tree`` into chunks in preorder; chunk 0 is the root chunk."""
    if tree.is_leaf or tree.cat not in chunk_roots:
        raise DataError(f"tree root {getattr(tree, 'cat', None)!r} is not a chunk category")
    chunks: list = []

    def make_chunk(node):
        idx = len(chunks)
        chunks.append(None)
        frontier = []

        def walk(t):
            if t.is_leaf:
                frontier.append(t)
                return t
            kids = []
            for c in t.children:
                if not c.is_leaf and c.cat in chunk_roots:
                    stub = Stub(backbone_cat(c, chunk_roots, nonrecursive), make_chunk(c), c.cat)
                    frontier.append(stub)
                    kids.append(stub)
                else:
                    kids.append(walk(c))
            return Node(t.rule_id, t.cat, t.feats, tuple(kids))

        sub = walk(node)
        chunks[idx] = Chunk(backbone_cat(node, chunk_roots, nonrecursive), sub, tuple(frontier))
        return idx

    make_chunk(tree)
    return chunks


def glue(chunks, index=0):
    """Inverse of :func:`cut_tree`."""

    def walk(t):
        if isinstance(t, Stub):
            return glue(chunks, t.chunk)
        if t.is_leaf:
            return t
        return Node(t.rule_id, t.cat, t.feats, tuple(walk(c) for c in t.children))

    return walk(chunks[index].subtree)


def chunk_yield(chunks, index=0) -> list:
    out = []
    for item in chunks[index].frontier:
        if isinstance(item, Stub):
            out.extend(chunk_yield(chunks, item.chunk))
        else:
            out.append(item.word)
    return out


# -- collapsing -------------------------------------------------------------------


def _count_vars(v, counts):
    if isinstance(v, Var):
        counts[v] += 1
    elif isinstance(v, FeatureStructure):
        for x in v.values():
            _count_vars(x, counts)


def _drop_singletons(v, counts):
    if isinstance(v, FeatureStructure):
        out = {}
        for k, x in v.items():
            if isinstance(x, Var) and counts[x] < 2:
                continue
            out[k] = _drop_singletons(x, counts)
        return FeatureStructure(out)
    return v


def canonicalize(mother: Constituent, daughters) -> tuple:
    """Drop variables that occur once and number the rest V1, V2, ... by
    first left-to-right occurrence."""
    counts: collections.Counter = collections.Counter()
    for c in (mother, *daughters):
        _count_vars(c.fs, counts)
    cons = [Constituent(c.cat, _drop_singletons(c.fs, counts)) for c in (mother, *daughters)]
    order: list = []

    def collect(v):
        if isinstance(v, Var):
            if v not in order:
                order.append(v)
        elif isinstance(v, FeatureStructure):
            for k in sorted(v):
                collect(v[k])

    for c in cons:
        collect(c.fs)
    mapping = {v: Var(f"V{i}") for i, v in enumerate(order, 1)}
    cons = [Constituent(c.cat, rename(c.fs, mapping)) for c in cons]
    return cons[0], tuple(cons[1:])


def collapse_chunk(chunk: Chunk, grammar: Grammar) -> Rule:
    """Compose the general rules of ``chunk`` into one rule.

    The result's provenance lists the general rule ids in preorder; with
    the rules' arities that is enough to rebuild the chunk's shape.
    """
    env: dict = {}
    prov: list = []
    frontier: list = []
    counter = iter(range(1_000_000))

    def compose(node):
        rule = grammar.rule(node.rule_id)
        k = next(counter)
        mapping = {}

        def fresh(fs):
            for v in variables(fs):
                mapping.setdefault(v, Var(f"{v.name}_{k}"))
            return rename(fs, mapping)

        prov.append(rule.id)
        mother_fs = fresh(rule.mother.fs)
        for spec, child in zip(rule.daughters, node.children):
            dfs = fresh(spec.fs)
            if isinstance(child, Stub):
                frontier.append(Constituent(child.cat, dfs))
            elif child.is_leaf:
                frontier.append(Constituent(spec.cat, dfs))
            else:
                child_mother = compose(child)
                if unify_into(dfs, child_mother, env) is FAIL:
                    raise InternalError(
                        f"unification failed collapsing {rule.id} over {child.rule_id}")
        return mother_fs

    top = compose(chunk.subtree)
    mother = Constituent(chunk.root_cat, resolve(top, env))
    daughters = [Constituent(c.cat, resolve(c.fs, env)) for c in frontier]
    mother, daughters = canonicalize(mother, daughters)
    return Rule(f"{chunk.root_cat}?", mother, daughters, count=1, prov=tuple(prov))


def _pattern_key(rule: Rule) -> str:
    return format_rule(dataclasses.replace(rule, id="_", count=None))


def specialize_grammar(trees, grammar: Grammar, threshold: int = 1,
                       nonrecursive=NONRECURSIVE) -> Grammar:
    """Specialized grammar whose rules are the collapsed chunk patterns of ``trees``.

    Patterns are keyed by mother, daughters and provenance (up to variable
    renaming); ``count`` is the number of occurrences.  Patterns seen fewer
    than ``threshold`` times are dropped.  Output does not depend on tree
    order.
    """
    trees = list(trees)
    if not trees:
        raise DataError("empty treebank")
    counts: collections.Counter = collections.Counter()
    patterns = {}
    for idx, tree in enumerate(trees):
        if tree.is_leaf or tree.cat != grammar.start or not validate(grammar, tree):
            raise DataError(f"treebank tree {idx} is not a valid parse under the general grammar")
        for chunk in cut_tree(tree, grammar.chunk_roots, nonrecursive):
            rule = collapse_chunk(chunk, grammar)
            key = _pattern_key(rule)
            counts[key] += 1
            patterns.setdefault(key, rule)
    rules = []
    per_cat: collections.Counter = collections.Counter()
    for key in sorted(patterns, key=lambda k: (patterns[k].mother.cat, k)):
        if counts[key] < threshold:
            continue
        r = patterns[key]
        per_cat[r.mother.cat] += 1
        rules.append(dataclasses.replace(r, id=f"x_{r.mother.cat}_{per_cat[r.mother.cat]:03d}",
                                         count=counts[key]))
    roots = set(grammar.chunk_roots) | {nonrecursive[c] for c in nonrecursive if c in grammar.chunk_roots}
    return Grammar(rules, grammar.start, frozenset(roots), grammar.lexical, grammar.major)


def expand_tree(tree, specialized: Grammar, general: Grammar):
    """Rebuild the general-grammar tree behind a specialized parse."""
    if tree.is_leaf:
        return tree
    rule = specialized.rule(tree.rule_id)
    prov = iter(rule.prov or ())
    frontier = iter(tree.children)

    def build():
        try:
            gr = general.rule(next(prov))
        except StopIteration:
            raise InternalError(f"provenance of {rule.id} too short") from None
        kids = []
        for d in gr.daughters:
            if general.is_lexical(d.cat) or d.cat in general.chunk_roots:
                kids.append(expand_tree(next(frontier), specialized, general))
            else:
                kids.append(build())
        node = apply_rule(gr, kids)
        if node is None:
            raise InternalError(f"expansion of {rule.id} fails unification at {gr.id}")
        return node

    out = build()
    if next(prov, None) is not None or next(frontier, None) is not None:
        raise InternalError(f"provenance of {rule.id} does not match its frontier")
    return out
