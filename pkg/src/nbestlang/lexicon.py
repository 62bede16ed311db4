"""Word-level knowledge: roots, major categories, repair markers, semantic classes.

Lexicon file format (UTF-8)::

    # comment
    @markers sorry no
    @skippable a and from in of or to
    flights<TAB>flight<TAB>noun
    boston<TAB>boston<TAB>propername<TAB>*place
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from importlib import resources

from .errors import DataError

MAJOR_CATEGORIES = (
    "verb", "noun", "det", "prep", "propername", "number", "marker", "other",
)
DEFAULT_SKIPPABLE = frozenset(["a", "and", "from", "in", "of", "or", "to"])
DEFAULT_MARKERS = frozenset(["sorry", "no"])

# tried in order, longest first
_SUFFIXES = ("ing", "es", "ed", "s")


@dataclass(frozen=True)
class LexEntry:
    surface: str
    root: str
    major_cat: str
    sem_class: str | None = None

    def __post_init__(self):
        if not self.surface or not self.root:
            raise DataError(f"empty surface or root in {self!r}")
        if self.surface != self.surface.lower() or self.root != self.root.lower():
            raise DataError(f"lexical entry must be lowercase: {self!r}")
        if self.major_cat not in MAJOR_CATEGORIES:
            raise DataError(f"unknown major category {self.major_cat!r} for {self.surface!r}")


class Lexicon:
    """Table-driven morphology plus a few closed word sets.

    Immutable after construction.
    """

    def __init__(self, entries=(), repair_markers=DEFAULT_MARKERS,
                 common_skippable=DEFAULT_SKIPPABLE, sem_classes=None):
        self.entries: dict[str, list[LexEntry]] = {}
        for e in entries:
            bucket = self.entries.setdefault(e.surface, [])
            if e not in bucket:
                bucket.append(e)
        self.repair_markers = frozenset(repair_markers)
        self.common_skippable = frozenset(common_skippable)
        if not self.repair_markers:
            raise DataError("repair marker set must be non-empty")
        # root -> class; built from entries unless given explicitly
        classes = {}
        for bucket in self.entries.values():
            for e in bucket:
                if e.sem_class:
                    classes.setdefault(e.root, e.sem_class)
        if sem_classes:
            classes.update(sem_classes)
        self._classes = classes
        self._cache: dict[str, tuple[tuple[str, str], ...]] = {}

    # -- lookups ---------------------------------------------------------

    def analyze_root(self, word: str) -> list[tuple[str, str]]:
        """All (root, major_cat) analyses of ``word``.

        Unknown words go through a small suffix stripper; if that finds
        nothing either, the word is its own root with category ``other``.
        """
        word = word.lower()
        cached = self._cache.get(word)
        if cached is None:
            cached = tuple(self._analyze(word))
            self._cache[word] = cached
        return list(cached)

    def _analyze(self, word):
        if word in self.entries:
            out = []
            for e in self.entries[word]:
                if (e.root, e.major_cat) not in out:
                    out.append((e.root, e.major_cat))
            return out
        for suffix in _SUFFIXES:
            stem = word[: -len(suffix)]
            if word.endswith(suffix) and len(stem) >= 2 and stem in self.entries:
                found = [(e.root, e.major_cat) for e in self.entries[stem]
                         if e.major_cat in ("noun", "verb")]
                if found:
                    return list(dict.fromkeys(found))
        return [(word, "other")]

    def roots(self, word: str) -> set[str]:
        return {r for r, _ in self.analyze_root(word)}

    def major_cats(self, word: str) -> set[str]:
        return {c for _, c in self.analyze_root(word)}

    def is_number(self, word: str) -> bool:
        return "number" in self.major_cats(word)

    def is_repair_marker(self, word: str) -> bool:
        return word.lower() in self.repair_markers

    def is_common_skippable(self, word: str) -> bool:
        return word.lower() in self.common_skippable

    def sem_class(self, root: str) -> str:
        return self._classes.get(root, root)

    def root_for(self, word: str, major_cat: str | None = None) -> str:
        """The root of ``word``, preferring an analysis with ``major_cat``."""
        analyses = self.analyze_root(word)
        if major_cat is not None:
            for root, cat in analyses:
                if cat == major_cat:
                    return root
        return analyses[0][0]

    def __contains__(self, word):
        return word.lower() in self.entries

    def __len__(self):
        return sum(len(v) for v in self.entries.values())

    # -- file format -----------------------------------------------------

    @classmethod
    def parse(cls, text: str, source="<lexicon>") -> "Lexicon":
        entries = []
        markers, skippable = DEFAULT_MARKERS, DEFAULT_SKIPPABLE
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if line.startswith("@"):
                head, *words = line.split()
                if head == "@markers":
                    markers = frozenset(w.lower() for w in words)
                elif head == "@skippable":
                    skippable = frozenset(w.lower() for w in words)
                else:
                    raise DataError(f"{source}:{lineno}: unknown header {head!r}")
                continue
            fields = line.split("\t")
            if len(fields) not in (3, 4):
                raise DataError(f"{source}:{lineno}: expected 3 or 4 tab-separated fields")
            sem = fields[3] if len(fields) == 4 and fields[3] else None
            try:
                entries.append(LexEntry(fields[0], fields[1], fields[2], sem))
            except DataError as exc:
                raise DataError(f"{source}:{lineno}: {exc}") from None
        return cls(entries, markers, skippable)

    @classmethod
    def load(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=os.fspath(path))

    def dumps(self) -> str:
        out = io.StringIO()
        out.write("@markers " + " ".join(sorted(self.repair_markers)) + "\n")
        out.write("@skippable " + " ".join(sorted(self.common_skippable)) + "\n")
        rows = sorted(
            (e.surface, e.root, e.major_cat, e.sem_class or "")
            for bucket in self.entries.values() for e in bucket
        )
        for surface, root, cat, sem in rows:
            fields = [surface, root, cat] + ([sem] if sem else [])
            out.write("\t".join(fields) + "\n")
        return out.getvalue()


def default_lexicon() -> Lexicon:
    text = resources.files("nbestlang").joinpath("data/lexicon.txt").read_text("utf-8")
    return Lexicon.parse(text, source="nbestlang/data/lexicon.txt")
