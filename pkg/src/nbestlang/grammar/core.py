"""Unification phrase-structure grammars: rules, lexical entries, file format.

Grammar file, one item per line::

    @start s
    @chunk s np pp
    @major n noun
    @lex n[num=pl] flights fares
    np_det: np[num=N] -> det[num=N] nbar[num=N] ; head=2
    vp_tr: vp -> v[sub=tr] np ; head=1 ; args={2:2}

Upper-case initial feature values are variables scoped to the rule.
Daughter positions in ``head`` and ``args`` are 1-based.  Specialized grammars
add ``; count=n ; prov=[id,...]`` to each rule.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from importlib import resources

from ..errors import DataError
from .featstruct import EMPTY, FeatureStructure, Var, format_fs


@dataclass(frozen=True)
class Constituent:
    cat: str
    fs: FeatureStructure = EMPTY

    def __str__(self):
        return self.cat + (format_fs(self.fs) if self.fs else "")


@dataclass(frozen=True)
class Rule:
    id: str
    mother: Constituent
    daughters: tuple
    head: int | None = None
    args: tuple = ()          # ((position, relation), ...), 1-based positions
    count: int | None = None
    prov: tuple | None = None

    def __post_init__(self):
        if not self.daughters:
            raise DataError(f"rule {self.id}: no daughters")
        if self.head is not None and not 1 <= self.head <= len(self.daughters):
            raise DataError(f"rule {self.id}: head={self.head} out of range")
        for pos, _ in self.args:
            if not 1 <= pos <= len(self.daughters):
                raise DataError(f"rule {self.id}: arg position {pos} out of range")

    @property
    def arg_map(self) -> dict:
        return dict(self.args)

    def __str__(self):
        return format_rule(self)


@dataclass
class Grammar:
    rules: list
    start: str
    chunk_roots: frozenset
    lexical: dict = field(default_factory=dict)      # word -> [Constituent]
    major: dict = field(default_factory=dict)        # lexical cat -> lexicon major category

    def __post_init__(self):
        self.chunk_roots = frozenset(self.chunk_roots)
        ids = [r.id for r in self.rules]
        dup = {i for i in ids if ids.count(i) > 1}
        if dup:
            raise DataError(f"duplicate rule ids: {sorted(dup)}")
        if self.start not in self.chunk_roots:
            raise DataError(f"start category {self.start!r} is not a chunk root")
        self._by_id = {r.id: r for r in self.rules}
        self._by_first = {}
        for r in self.rules:
            self._by_first.setdefault(r.daughters[0].cat, []).append(r)
        self.lexical_categories = frozenset(
            c.cat for entries in self.lexical.values() for c in entries
        )

    @property
    def categories(self) -> frozenset:
        cats = set(self.lexical_categories)
        for r in self.rules:
            cats.add(r.mother.cat)
            cats.update(d.cat for d in r.daughters)
        return frozenset(cats)

    def rule(self, rule_id) -> Rule:
        try:
            return self._by_id[rule_id]
        except KeyError:
            raise DataError(f"unknown rule id {rule_id!r}") from None

    def has_rule(self, rule_id) -> bool:
        return rule_id in self._by_id

    def rules_starting_with(self, cat) -> list:
        return self._by_first.get(cat, ())

    def is_lexical(self, cat) -> bool:
        return cat in self.lexical_categories

    def lexical_entries(self, word) -> list:
        return self.lexical.get(word.lower(), [])

    def leaves(self, word, lexicon=None) -> list:
        """Leaf nodes for every grammar lexical entry of ``word``."""
        from .trees import Leaf

        word = word.lower()
        out = []
        for c in self.lexical_entries(word):
            root = word
            if lexicon is not None:
                root = lexicon.root_for(word, self.major.get(c.cat))
            out.append(Leaf(word, c.cat, c.fs, root))
        return out

    def with_rules(self, rules) -> "Grammar":
        return Grammar(list(rules), self.start, self.chunk_roots, self.lexical, self.major)

    # -- serialization ------------------------------------------------------

    def dumps(self, include_lexicon=True) -> str:
        lines = [f"@start {self.start}", "@chunk " + " ".join(sorted(self.chunk_roots))]
        if include_lexicon:
            for cat in sorted(self.major):
                lines.append(f"@major {cat} {self.major[cat]}")
            by_entry: dict = {}
            for word in sorted(self.lexical):
                for c in self.lexical[word]:
                    by_entry.setdefault(str(c), []).append(word)
            for key in sorted(by_entry):
                lines.append(f"@lex {key} " + " ".join(by_entry[key]))
        lines.extend(format_rule(r) for r in self.rules)
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def parse(cls, text, source="<grammar>") -> "Grammar":
        rules, chunks, lexical, major = [], set(), {}, {}
        start = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                if line.startswith("@"):
                    head, _, rest = line.partition(" ")
                    rest = rest.strip()
                    if head == "@start":
                        start = rest
                    elif head == "@chunk":
                        chunks.update(rest.split())
                    elif head == "@major":
                        cat, mcat = rest.split()
                        major[cat] = mcat
                    elif head == "@lex":
                        con, pos = _parse_constituent(rest, 0)
                        for w in rest[pos:].split():
                            bucket = lexical.setdefault(w.lower(), [])
                            if con not in bucket:
                                bucket.append(con)
                    else:
                        raise DataError(f"unknown directive {head}")
                else:
                    rules.append(parse_rule(line))
            except DataError as exc:
                raise DataError(f"{source}:{lineno}: {exc}") from None
        if start is None:
            raise DataError(f"{source}: missing @start")
        return cls(rules, start, frozenset(chunks), lexical, major)

    @classmethod
    def load(cls, path) -> "Grammar":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=os.fspath(path))


# -- rule syntax ---------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z0-9_*'.\-]+")


def _parse_value(text, pos):
    if text.startswith("[", pos):
        return _parse_fs(text, pos)
    m = _NAME.match(text, pos)
    if not m:
        raise DataError(f"bad feature value at {text[pos:]!r}")
    tok = m.group(0)
    val = Var(tok) if tok[0].isupper() else tok
    return val, m.end()


def _parse_fs(text, pos):
    assert text[pos] == "["
    pos += 1
    out = {}
    while True:
        while pos < len(text) and text[pos] in " ,":
            pos += 1
        if pos >= len(text):
            raise DataError("unterminated feature structure")
        if text[pos] == "]":
            return FeatureStructure(out), pos + 1
        m = _NAME.match(text, pos)
        if not m or not text.startswith("=", m.end()):
            raise DataError(f"bad feature at {text[pos:]!r}")
        name = m.group(0)
        if name in out:
            raise DataError(f"feature {name!r} given twice")
        val, pos = _parse_value(text, m.end() + 1)
        out[name] = val


def _parse_constituent(text, pos):
    while pos < len(text) and text[pos] == " ":
        pos += 1
    m = _NAME.match(text, pos)
    if not m:
        raise DataError(f"expected category at {text[pos:]!r}")
    cat, pos = m.group(0), m.end()
    fs = EMPTY
    if text.startswith("[", pos):
        fs, pos = _parse_fs(text, pos)
    return Constituent(cat, fs), pos


def _parse_args(text):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise DataError(f"bad args {text!r}")
    out = []
    for item in filter(None, (s.strip() for s in text[1:-1].split(","))):
        pos, _, rel = item.partition(":")
        rel = rel.strip()
        out.append((int(pos), int(rel) if rel.lstrip("-").isdigit() else rel))
    return tuple(sorted(out))


def parse_rule(line) -> Rule:
    body, *annots = [s.strip() for s in line.split(";")]
    rid, sep, rest = body.partition(":")
    if not sep:
        raise DataError(f"rule without id: {line!r}")
    lhs, arrow, rhs = rest.partition("->")
    if not arrow:
        raise DataError(f"rule without '->': {line!r}")
    mother, pos = _parse_constituent(lhs, 0)
    if lhs[pos:].strip():
        raise DataError(f"junk after mother: {lhs[pos:]!r}")
    daughters, pos = [], 0
    rhs = rhs.strip()
    while pos < len(rhs):
        con, pos = _parse_constituent(rhs, pos)
        daughters.append(con)
        while pos < len(rhs) and rhs[pos] == " ":
            pos += 1
    head, args, count, prov = None, (), None, None
    for a in annots:
        key, _, val = a.partition("=")
        key = key.strip()
        if key == "head":
            head = int(val)
        elif key == "args":
            args = _parse_args(val)
        elif key == "count":
            count = int(val)
        elif key == "prov":
            val = val.strip()
            prov = tuple(s.strip() for s in val.strip("[]").split(",") if s.strip())
        else:
            raise DataError(f"unknown annotation {key!r}")
    return Rule(rid.strip(), mother, tuple(daughters), head, args, count, prov)


def format_rule(r: Rule) -> str:
    s = f"{r.id}: {r.mother} -> " + " ".join(str(d) for d in r.daughters)
    if r.head is not None:
        s += f" ; head={r.head}"
    if r.args:
        s += " ; args={" + ",".join(f"{p}:{rel}" for p, rel in r.args) + "}"
    if r.count is not None:
        s += f" ; count={r.count}"
    if r.prov is not None:
        s += " ; prov=[" + ",".join(r.prov) + "]"
    return s


def default_grammar() -> Grammar:
    text = resources.files("nbestlang").joinpath("data/toy.grammar").read_text("utf-8")
    return Grammar.parse(text, source="nbestlang/data/toy.grammar")
