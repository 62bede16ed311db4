"""LALR(1) tables over the context-free backbone of a specialized grammar,
and a generalized LR parser that keeps every action of a conflicted cell.

Feature constraints are not compiled into the table; they are checked by
unification whenever a rule is reduced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..grammar.trees import apply_rule

END = "$"
_START = "S'"
_PROPAGATE = "#"


@dataclass
class LRTable:
    productions: list                  # [(lhs, (rhs...), rule_id)]; index 0 is S' -> start
    action: list                       # state -> {terminal: [("s", k) | ("r", p) | ("a",)]}
    goto: list                         # state -> {nonterminal: state}
    terminals: frozenset
    nonterminals: frozenset
    conflicts: dict = field(default_factory=dict)   # (state, terminal) -> actions

    @property
    def n_states(self) -> int:
        return len(self.action)

    def accepts(self, cats) -> bool:
        """Backbone recognition of a category string (no features)."""
        stacks = [(0,)]
        for sym in list(cats) + [END]:
            nxt = []
            seen = set()
            todo = list(stacks)
            while todo:
                st = todo.pop()
                for act in self.action[st[-1]].get(sym, ()):
                    if act[0] == "s":
                        nxt.append(st + (act[1],))
                    elif act[0] == "a":
                        return True
                    else:
                        lhs, rhs, _ = self.productions[act[1]]
                        base = st[: len(st) - len(rhs)]
                        new = base + (self.goto[base[-1]][lhs],)
                        if new not in seen:
                            seen.add(new)
                            todo.append(new)
            stacks = nxt
            if not stacks:
                return False
        return False

    def to_json(self) -> str:
        data = {
            "format": "nbestlang-lr-table",
            "version": 1,
            "productions": [[l, list(r), rid] for l, r, rid in self.productions],
            "action": [{t: [list(a) for a in acts] for t, acts in sorted(row.items())}
                       for row in self.action],
            "goto": [dict(sorted(row.items())) for row in self.goto],
            "terminals": sorted(self.terminals),
            "nonterminals": sorted(self.nonterminals),
        }
        return json.dumps(data, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text) -> "LRTable":
        d = json.loads(text)
        action = [{t: [tuple(a) for a in acts] for t, acts in row.items()} for row in d["action"]]
        conflicts = {(q, t): acts for q, row in enumerate(action)
                     for t, acts in row.items() if len(acts) > 1}
        return cls([(l, tuple(r), rid) for l, r, rid in d["productions"]], action,
                   [dict(row) for row in d["goto"]], frozenset(d["terminals"]),
                   frozenset(d["nonterminals"]), conflicts)


def compile_lr(grammar) -> LRTable:
    """Build an LALR(1) table for the backbone of ``grammar``.

    Lookaheads are computed by the spontaneous-generation / propagation
    method on LR(0) kernels.  Conflicting actions are all kept.
    """
    if not grammar.rules:
        raise ValueError("cannot build a table for an empty grammar")
    prods = [(_START, (grammar.start,), None)]
    prods += [(r.mother.cat, tuple(d.cat for d in r.daughters), r.id) for r in grammar.rules]
    nonterms = {p[0] for p in prods}
    terms = {s for _, rhs, _ in prods for s in rhs if s not in nonterms} | {END}
    by_lhs: dict = {}
    for i, (lhs, _, _) in enumerate(prods):
        by_lhs.setdefault(lhs, []).append(i)

    first = {t: {t} for t in terms}
    for nt in nonterms:
        first[nt] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs, _ in prods:
            before = len(first[lhs])
            first[lhs] |= first[rhs[0]]
            changed |= len(first[lhs]) != before

    def closure0(items):
        out = set(items)
        todo = list(items)
        while todo:
            p, d = todo.pop()
            rhs = prods[p][1]
            if d < len(rhs) and rhs[d] in by_lhs:
                for q in by_lhs[rhs[d]]:
                    if (q, 0) not in out:
                        out.add((q, 0))
                        todo.append((q, 0))
        return out

    # LR(0) collection
    kernels = [frozenset([(0, 0)])]
    index = {kernels[0]: 0}
    trans: list = []
    k = 0
    while k < len(kernels):
        items = closure0(kernels[k])
        moves: dict = {}
        for p, d in items:
            rhs = prods[p][1]
            if d < len(rhs):
                moves.setdefault(rhs[d], set()).add((p, d + 1))
        row = {}
        for sym in sorted(moves):
            kern = frozenset(moves[sym])
            if kern not in index:
                index[kern] = len(kernels)
                kernels.append(kern)
            row[sym] = index[kern]
        trans.append(row)
        k += 1

    def closure1(item_las):
        out = set(item_las)
        todo = list(item_las)
        while todo:
            (p, d), la = todo.pop()
            rhs = prods[p][1]
            if d < len(rhs) and rhs[d] in by_lhs:
                follow = first[rhs[d + 1]] if d + 1 < len(rhs) else {la}
                for q in by_lhs[rhs[d]]:
                    for b in follow:
                        if ((q, 0), b) not in out:
                            out.add(((q, 0), b))
                            todo.append(((q, 0), b))
        return out

    la = [{item: set() for item in kern} for kern in kernels]
    la[0][(0, 0)].add(END)
    prop: dict = {}
    for s, kern in enumerate(kernels):
        for item in kern:
            for (p, d), b in closure1({(item, _PROPAGATE)}):
                rhs = prods[p][1]
                if d >= len(rhs):
                    continue
                t = trans[s][rhs[d]]
                target = (p, d + 1)
                if b == _PROPAGATE:
                    prop.setdefault((s, item), set()).add((t, target))
                else:
                    la[t][target].add(b)
    changed = True
    while changed:
        changed = False
        for (s, item), targets in prop.items():
            src = la[s][item]
            for t, target in targets:
                dst = la[t][target]
                if not src <= dst:
                    dst |= src
                    changed = True

    action: list = []
    goto: list = []
    conflicts = {}
    for s, kern in enumerate(kernels):
        row: dict = {}
        for sym, t in trans[s].items():
            if sym in terms:
                row.setdefault(sym, []).append(("s", t))
        for (p, d), las in sorted(la[s].items()):
            if d == len(prods[p][1]):
                for b in sorted(las):
                    if p == 0:
                        row.setdefault(b, []).append(("a",))
                    else:
                        row.setdefault(b, []).append(("r", p))
        for sym, acts in row.items():
            if len(acts) > 1:
                conflicts[(s, sym)] = acts
        action.append(row)
        goto.append({sym: t for sym, t in trans[s].items() if sym in nonterms})
    return LRTable(prods, action, goto, frozenset(terms), frozenset(nonterms), conflicts)


class _Stack:
    __slots__ = ("state", "node", "prev")

    def __init__(self, state, node, prev):
        self.state = state
        self.node = node
        self.prev = prev


def parse_lr(table: LRTable, grammar, words, lexicon=None, max_stacks=20000) -> list:
    """All parses of ``words`` under the specialized grammar.

    Stacks are split on every conflicted cell and on lexical ambiguity;
    a reduction whose daughters fail to unify with the rule is dropped.
    Returned trees use specialized rule ids (see ``expand_tree``).
    """
    words = [w.lower() for w in words]
    if not words:
        return []
    options = []
    for w in words:
        lvs = [lf for lf in grammar.leaves(w, lexicon) if lf.cat in table.terminals]
        if not lvs:
            return []
        options.append(lvs)
    rules = {r.id: r for r in grammar.rules}
    prods = table.productions
    stacks = [_Stack(0, None, None)]
    results = []
    for pos in range(len(words) + 1):
        leaves = options[pos] if pos < len(words) else [None]
        nxt = []
        for leaf in leaves:
            la = END if leaf is None else leaf.cat
            todo = list(stacks)
            while todo:
                st = todo.pop()
                for act in table.action[st.state].get(la, ()):
                    kind = act[0]
                    if kind == "s":
                        nxt.append(_Stack(act[1], leaf, st))
                    elif kind == "a":
                        results.append(st.node)
                    else:
                        lhs, rhs, rid = prods[act[1]]
                        kids = []
                        base = st
                        for _ in rhs:
                            kids.append(base.node)
                            base = base.prev
                        kids.reverse()
                        node = apply_rule(rules[rid], kids)
                        if node is None:
                            continue
                        todo.append(_Stack(table.goto[base.state][lhs], node, base))
                if len(nxt) > max_stacks:
                    raise RuntimeError("GLR stack limit exceeded")
        stacks = nxt
        if not stacks and pos < len(words):
            return []
    results.sort(key=lambda t: t.to_bracket())
    return results
