"""Object score tables and the combining functions built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_ALPHA = 0.5
KINDS = ("triple", "rule", "ngram1", "ngram2", "ngram3", "ngram4")


def smoothed_score(good: int, bad: int, alpha: float) -> float:
    return math.log((good + alpha) / (good + bad + 2 * alpha))


def frequency_score(good: int, total_good: int, alpha: float) -> float:
    """Relative frequency among correct analyses only (ablation scoring)."""
    return math.log((good + alpha) / (total_good + 2 * alpha))


@dataclass
class ObjectScoreTable:
    """Per-object good/bad counts and the derived log-probability scores.

    An object's score estimates the log probability that an analysis
    containing it is the right one.  Unseen objects get ``log(1/2)``.
    """

    kind: str
    alpha: float = DEFAULT_ALPHA
    counts: dict = field(default_factory=dict)      # object -> (good, bad)
    scores: dict = field(default_factory=dict)      # object -> float
    frequency_only: bool = False
    total_good: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown object kind {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def default(self) -> float:
        return math.log(0.5)

    def add(self, obj, good: bool, n: int = 1):
        g, b = self.counts.get(obj, (0, 0))
        self.counts[obj] = (g + n, b) if good else (g, b + n)

    def recompute(self):
        if self.frequency_only:
            self.scores = {o: frequency_score(g, self.total_good, self.alpha)
                           for o, (g, _) in self.counts.items()}
        else:
            self.scores = {o: smoothed_score(g, b, self.alpha) for o, (g, b) in self.counts.items()}
        return self

    def score(self, obj) -> float:
        s = self.scores.get(obj)
        return self.default if s is None else s

    def __len__(self):
        return len(self.counts)


def train_object_scores(kind, examples, alpha=DEFAULT_ALPHA, frequency_only=False) -> ObjectScoreTable:
    """Accumulate counts from ``(objects, is_good)`` examples.

    Each example counts an object once however often it occurs within
    that example.  Needs at least one good and one bad example, except in
    frequency-only mode where only good examples are used.
    """
    examples = list(examples)
    n_good = sum(1 for _, g in examples if g)
    if frequency_only:
        if n_good == 0:
            raise ValueError("no good examples")
    elif n_good == 0 or n_good == len(examples):
        raise ValueError("training needs both good and bad examples")
    table = ObjectScoreTable(kind, alpha, frequency_only=frequency_only, total_good=n_good)
    for objects, good in examples:
        if frequency_only and not good:
            continue
        for obj in set(objects):
            table.add(obj, good)
    return table.recompute()


def combining_score(objects, table: ObjectScoreTable, mode: str = "sum", kind=None) -> float:
    """Sum or mean of object scores over a multiset (given as a Counter or iterable)."""
    if kind is not None and kind != table.kind:
        raise ValueError(f"table of kind {table.kind!r} used for {kind!r} objects")
    if hasattr(objects, "items"):
        pairs = list(objects.items())
    else:
        pairs = [(o, 1) for o in objects]
    n = sum(c for _, c in pairs)
    if n == 0:
        return 0.0 if mode == "sum" else table.default
    total = math.fsum(table.score(o) * c for o, c in pairs)
    if mode == "sum":
        return total
    if mode == "average":
        return total / n
    raise ValueError(f"unknown combining mode {mode!r}")
