"""Self-repair detection and non-destructive N-best expansion.

Repairs are found from word strings alone: repeated roots anchor candidate
regions, the two sequences of a region are aligned left to right, and any
material between them is attributed to the reparandum or to the repair by
a forward or a backward match.  Corrected strings are *added* to the
N-best list with a lowered acoustic score; nothing is removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MATCH = 2
SKIP = -1
MARKER = 1
DEFAULT_SPAN_CAP = 8
DEFAULT_PENALTY = 10.0


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"bad span {self.start}..{self.end}")

    def __len__(self):
        return self.end - self.start


@dataclass(frozen=True)
class RepairCandidate:
    reparandum: Span
    repair: Span
    score: int
    deleted_words: int

    @property
    def extent(self) -> Span:
        return Span(self.reparandum.start, self.repair.end)

    def overlaps(self, other: "RepairCandidate") -> bool:
        a, b = self.extent, other.extent
        return a.start < b.end and b.start < a.end

    def apply(self, words):
        return list(words[: self.reparandum.start]) + list(words[self.reparandum.end:])


@dataclass(frozen=True)
class Hypothesis:
    """One N-best entry.

    ``rank`` is the 1-based recognizer rank for originals; repaired
    hypotheses carry the rank of their source in ``source_rank``.
    """

    words: tuple
    acoustic_score: float
    rank: int = 0
    source_rank: int | None = None
    repairs: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not self.words:
            raise ValueError("hypothesis has no words")
        object.__setattr__(self, "words", tuple(w.lower() for w in self.words))

    @property
    def is_repaired(self) -> bool:
        return self.source_rank is not None

    @property
    def text(self) -> str:
        return " ".join(self.words)


# -- pair and region finding --------------------------------------------------


def find_repeated_root_pairs(words, lexicon) -> set:
    """Index pairs (i, j), i < j, of non-number words sharing a root."""
    words = [w.lower() for w in words]
    roots = [None if lexicon.is_number(w) else lexicon.roots(w) for w in words]
    pairs = set()
    for i in range(len(words)):
        if roots[i] is None:
            continue
        for j in range(i + 1, len(words)):
            if roots[j] is not None and roots[i] & roots[j]:
                pairs.add((i, j))
    return pairs


def build_candidate_regions(pairs, words, lexicon, span_cap=DEFAULT_SPAN_CAP) -> list:
    """(seq1, seq2) span pairs opened by one repeated-root pair and closed by another.

    A region uses the same pair at both ends (single-word sequences) or two
    pairs that both advance.  Single common-word sequences with material in
    between are dropped.
    """
    ordered = sorted(pairs)
    regions = []
    for i1, j1 in ordered:
        for i2, j2 in ordered:
            same = (i1, j1) == (i2, j2)
            if not same and not (i1 < i2 and j1 < j2):
                continue
            if i2 >= j1:
                continue
            seq1, seq2 = Span(i1, i2 + 1), Span(j1, j2 + 1)
            if len(seq1) > span_cap or len(seq2) > span_cap:
                continue
            if same and seq1.end < seq2.start and lexicon.is_common_skippable(words[i1]):
                continue
            regions.append((seq1, seq2))
    return regions


# -- matching ---------------------------------------------------------------------


def align_left_right(seq1, seq2, lexicon):
    """Best monotone alignment of two word sequences.

    +2 per aligned pair sharing a root, -1 per skipped word on either side.
    Returns ``(score, alignment)`` where alignment is a list of (i, j) index
    pairs.  Among equal scores, fewer skips win, then earlier matches.
    """
    n, m = len(seq1), len(seq2)
    r1 = [lexicon.roots(w) for w in seq1]
    r2 = [lexicon.roots(w) for w in seq2]
    # best[i][j] = (score, -skips, path) for suffixes seq1[i:], seq2[j:]
    best = [[None] * (m + 1) for _ in range(n + 1)]
    best[n][m] = (0, 0, ())
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if i == n and j == m:
                continue
            opts = []
            if i < n and j < m and r1[i] & r2[j]:
                s, k, p = best[i + 1][j + 1]
                opts.append((s + MATCH, k, ((i, j),) + p))
            if i < n:
                s, k, p = best[i + 1][j]
                opts.append((s + SKIP, k - 1, p))
            if j < m:
                s, k, p = best[i][j + 1]
                opts.append((s + SKIP, k - 1, p))
            # earliest matches first: compare paths lexicographically, smaller wins
            best[i][j] = max(opts, key=lambda o: (o[0], o[1], tuple(-x for pair in o[2] for x in pair)))
    score, _, path = best[0][0]
    return score, list(path)


def match_intervening(direction, intervening, continuation, lexicon):
    """Score attributing the intervening material via a forward or backward match.

    Both sequences are given in the order they are walked (the caller
    reverses them for the backward direction).  All of ``intervening`` must
    be consumed; ``continuation`` is consumed only as far as useful.  Words
    align at no cost when they share a major category; every skip costs a
    point, except that a repair marker skipped in the forward direction
    earns one.  Returns ``(score, consumed)`` with ``consumed`` the number of
    continuation words used.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(direction)
    forward = direction == "forward"
    m, n = len(intervening), len(continuation)
    c1 = [lexicon.major_cats(w) for w in intervening]
    c2 = [lexicon.major_cats(w) for w in continuation]
    skip1 = [MARKER if forward and lexicon.is_repair_marker(w) else SKIP for w in intervening]
    NEG = float("-inf")
    dp = [[NEG] * (n + 1) for _ in range(m + 1)]
    dp[0][0] = 0
    for i in range(m + 1):
        for j in range(n + 1):
            cur = dp[i][j]
            if cur == NEG:
                continue
            if i < m:
                dp[i + 1][j] = max(dp[i + 1][j], cur + skip1[i])
            if j < n and i < m:
                dp[i][j + 1] = max(dp[i][j + 1], cur + SKIP)
                if c1[i] & c2[j]:
                    dp[i + 1][j + 1] = max(dp[i + 1][j + 1], cur)
    best_j = max(range(n + 1), key=lambda j: (dp[m][j], -j))
    return int(dp[m][best_j]), best_j


def score_region(words, seq1, seq2, lexicon):
    """Turn a region into a RepairCandidate (or None if it cannot be one)."""
    s1 = words[seq1.start:seq1.end]
    s2 = words[seq2.start:seq2.end]
    base, _ = align_left_right(s1, s2, lexicon)
    if seq1.end == seq2.start:
        return RepairCandidate(seq1, seq2, base, len(seq1))
    mid = words[seq1.end:seq2.start]
    fwd, _ = match_intervening("forward", mid, words[seq2.end:], lexicon)
    bwd, _ = match_intervening("backward", mid[::-1], words[:seq1.start][::-1], lexicon)
    if fwd >= bwd:
        # intervening material is deleted with the reparandum
        rep = Span(seq1.start, seq2.start)
        return RepairCandidate(rep, seq2, base + fwd, len(rep))
    return RepairCandidate(seq1, Span(seq1.end, seq2.end), base + bwd, len(seq1))


def _rank_key(c: RepairCandidate):
    return (-c.score, c.deleted_words, c.reparandum.start, c.repair.end)


def score_candidates(words, lexicon, span_cap=DEFAULT_SPAN_CAP) -> list:
    """Every scored candidate, best first."""
    words = [w.lower() for w in words]
    pairs = find_repeated_root_pairs(words, lexicon)
    regions = build_candidate_regions(pairs, words, lexicon, span_cap)
    cands = {score_region(words, s1, s2, lexicon) for s1, s2 in regions}
    return sorted(cands, key=_rank_key)


def detect_repairs(words, lexicon, span_cap=DEFAULT_SPAN_CAP) -> list:
    """The accepted repairs for ``words``: the best candidate, plus the best of
    any further candidates that overlap none already accepted.  Returned in
    sentence order."""
    accepted = []
    for c in score_candidates(words, lexicon, span_cap):
        if not any(c.overlaps(a) for a in accepted):
            accepted.append(c)
    return sorted(accepted, key=lambda c: c.reparandum.start)


def apply_repairs(words, candidates) -> list:
    out = list(words)
    for c in sorted(candidates, key=lambda c: c.reparandum.start, reverse=True):
        del out[c.reparandum.start:c.reparandum.end]
    return out


def expand_hypotheses(nbest, lexicon, penalty=DEFAULT_PENALTY, span_cap=DEFAULT_SPAN_CAP) -> list:
    """Originals unchanged, followed by one repaired variant per original that
    has a detected repair.  Repaired variants score ``min(original) - penalty``.
    """
    if not nbest:
        raise ValueError("empty N-best list")
    if penalty <= 0:
        raise ValueError("penalty must be positive")
    originals = list(nbest)
    low = min(h.acoustic_score for h in originals) - penalty
    repaired = []
    for h in originals:
        if h.is_repaired:
            continue
        cands = detect_repairs(h.words, lexicon, span_cap)
        if not cands:
            continue
        new_words = apply_repairs(h.words, cands)
        if not new_words or tuple(new_words) == h.words:
            continue
        repaired.append(Hypothesis(tuple(new_words), low, rank=0,
                                   source_rank=h.rank, repairs=tuple(cands)))
    return originals + repaired
