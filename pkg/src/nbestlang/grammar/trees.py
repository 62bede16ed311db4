"""Parse trees, bracketed I/O and re-validation against a grammar."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import DataError
from .featstruct import EMPTY, FAIL, FeatureStructure, resolve, unify_into


@dataclass(frozen=True)
class Leaf:
    word: str
    cat: str
    feats: FeatureStructure = EMPTY
    root: str = ""

    is_leaf = True

    def to_bracket(self) -> str:
        return f"leaf:{self.word}"


@dataclass(frozen=True)
class Node:
    rule_id: str
    cat: str
    feats: FeatureStructure
    children: tuple

    is_leaf = False

    def to_bracket(self) -> str:
        return "(" + " ".join([self.rule_id] + [c.to_bracket() for c in self.children]) + ")"


def words(tree) -> list:
    if tree.is_leaf:
        return [tree.word]
    out = []
    for c in tree.children:
        out.extend(words(c))
    return out


def leaves(tree) -> list:
    if tree.is_leaf:
        return [tree]
    out = []
    for c in tree.children:
        out.extend(leaves(c))
    return out


def nodes(tree):
    """Internal nodes in preorder."""
    if tree.is_leaf:
        return
    yield tree
    for c in tree.children:
        yield from nodes(c)


def rule_ids(tree) -> list:
    return [n.rule_id for n in nodes(tree)]


def spans(tree, start=0):
    """(cat, start, end) for every internal node."""
    out = []

    def walk(t, i):
        if t.is_leaf:
            return i + 1
        j = i
        for c in t.children:
            j = walk(c, j)
        out.append((t.cat, i, j))
        return j

    walk(tree, start)
    return out


# -- bracketed format ------------------------------------------------------------


def _tokenize(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_bracket(text):
    """Parse ``(rule (rule leaf:w ...) ...)`` into a nested skeleton.

    Skeleton nodes are ``(rule_id, [children])``; leaves are plain word strings.
    """
    toks = _tokenize(text)
    if not toks:
        raise DataError("empty tree")
    pos = 0

    def node():
        nonlocal pos
        if toks[pos] != "(":
            raise DataError(f"expected '(' at token {pos} in {text!r}")
        pos += 1
        if pos >= len(toks) or toks[pos] in "()":
            raise DataError(f"missing rule id in {text!r}")
        rid = toks[pos]
        pos += 1
        kids = []
        while pos < len(toks) and toks[pos] != ")":
            if toks[pos] == "(":
                kids.append(node())
            elif toks[pos].startswith("leaf:"):
                kids.append(toks[pos][5:].lower())
                pos += 1
            else:
                raise DataError(f"unexpected token {toks[pos]!r} in {text!r}")
        if pos >= len(toks):
            raise DataError(f"unbalanced brackets in {text!r}")
        pos += 1
        return rid, kids

    out = node()
    if pos != len(toks):
        raise DataError(f"trailing material in {text!r}")
    return out


def skeleton_of(tree):
    if tree.is_leaf:
        return tree.word
    return tree.rule_id, [skeleton_of(c) for c in tree.children]


def realize(grammar, skeleton, lexicon=None, rule_lookup=None) -> list:
    """All fully featured trees matching a skeleton, in deterministic order.

    Each internal node's features are recomputed bottom-up by unifying the
    rule's daughter specifications with the daughters' features, exactly as
    the chart parser does.  ``rule_lookup`` maps an id to a Rule (defaults
    to ``grammar.rule``).
    """
    lookup = rule_lookup or grammar.rule

    def build(sk, want_cat):
        if isinstance(sk, str):
            return [lf for lf in grammar.leaves(sk, lexicon) if lf.cat == want_cat]
        rid, kids = sk
        rule = lookup(rid)
        if want_cat is not None and rule.mother.cat != want_cat:
            return []
        if len(kids) != len(rule.daughters):
            return []
        options = [build(k, d.cat) for k, d in zip(kids, rule.daughters)]
        out = []
        for combo in itertools.product(*options):
            node = apply_rule(rule, combo)
            if node is not None:
                out.append(node)
        return out

    return build(skeleton, None)


def apply_rule(rule, children):
    """Build the mother node over ``children`` or return None if unification fails."""
    env: dict = {}
    for spec, child in zip(rule.daughters, children):
        if spec.cat != child.cat:
            return None
        if spec.fs and unify_into(spec.fs, child.feats, env) is FAIL:
            return None
    feats = resolve(rule.mother.fs, env, drop_unbound=True) if rule.mother.fs else EMPTY
    return Node(rule.id, rule.mother.cat, feats, tuple(children))


def validate(grammar, tree) -> bool:
    """True if every node of ``tree`` re-derives its features under its rule."""
    if tree.is_leaf:
        return any(c.cat == tree.cat and c.fs == tree.feats
                   for c in grammar.lexical_entries(tree.word))
    if not grammar.has_rule(tree.rule_id):
        return False
    if not all(validate(grammar, c) for c in tree.children):
        return False
    rule = grammar.rule(tree.rule_id)
    if len(rule.daughters) != len(tree.children):
        return False
    rebuilt = apply_rule(rule, tree.children)
    return rebuilt is not None and rebuilt.feats == tree.feats and rebuilt.cat == tree.cat


def load_treebank(grammar, lines, lexicon=None) -> list:
    """Realize one bracketed tree per non-blank line; errors name the tree index."""
    trees = []
    for idx, line in enumerate(l for l in lines if l.strip() and not l.lstrip().startswith("#")):
        try:
            sk = parse_bracket(line)
            found = realize(grammar, sk, lexicon)
        except DataError as exc:
            raise DataError(f"treebank tree {idx}: {exc}") from None
        if not found:
            raise DataError(f"treebank tree {idx}: not a valid derivation under the grammar")
        root = found[0]
        if root.cat != grammar.start:
            raise DataError(f"treebank tree {idx}: root {root.cat!r} is not the start category")
        trees.append(root)
    return trees


def pretty(tree, indent=0) -> str:
    pad = "  " * indent
    if tree.is_leaf:
        return f"{pad}{tree.cat} {tree.word}"
    head = f"{pad}{tree.cat}{tree.feats!r} <{tree.rule_id}>"
    return "\n".join([head] + [pretty(c, indent + 1) for c in tree.children])
