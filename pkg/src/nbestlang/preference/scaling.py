"""Scaling factors: total scores, selection, the similarity target, and the
two training phases (least squares, then hill climbing on top-1 accuracy)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..grammar.trees import spans

DEFAULT_RIDGE = 1e-6
DEFAULT_MAX_SWEEPS = 50
DEFAULT_DELTA = 0.1


@dataclass
class ScalingFactors:
    weights: dict                       # name -> weight, in registry order
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.weights:
            raise ValueError("no scaling factors")

    @property
    def names(self) -> tuple:
        return tuple(self.weights)

    def vector(self) -> np.ndarray:
        return np.array([self.weights[n] for n in self.weights], dtype=float)

    def scaled(self, c: float) -> "ScalingFactors":
        return ScalingFactors({k: c * v for k, v in self.weights.items()}, dict(self.meta))


def total_score(vector: dict, w: ScalingFactors) -> float:
    if set(vector) != set(w.weights):
        raise ValueError("preference vector and scaling factors have different functions")
    return math.fsum(w.weights[k] * vector[k] for k in w.weights)


def tiebreak_key(hypothesis, index):
    """Originals before repaired hypotheses, then better acoustic score, then input order."""
    return (hypothesis.is_repaired, -hypothesis.acoustic_score, index)


def select_index(candidates, w: ScalingFactors):
    """Index of the best ``(analysis, vector)`` pair, or None if there are none."""
    best = None
    for i, (an, vec) in enumerate(candidates):
        key = (-total_score(vec, w), tiebreak_key(an.hypothesis, i))
        if best is None or key < best[0]:
            best = (key, i)
    return None if best is None else best[1]


def select_best(candidates, w: ScalingFactors):
    if not candidates:
        raise ValueError("no candidates to select from")
    return candidates[select_index(candidates, w)][0]


# -- similarity -------------------------------------------------------------------


def edit_distance(a, b) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def bracket_f1(tree, ref) -> float:
    from collections import Counter

    a, b = Counter(spans(tree)), Counter(spans(ref))
    common = sum((a & b).values())
    if common == 0:
        return 0.0
    p, r = common / sum(a.values()), common / sum(b.values())
    return 2 * p * r / (p + r)


def similarity(candidate, reference, word_weight=0.5) -> float:
    """Blend of word-sequence similarity and labeled-bracket F1, in [0, 1]."""
    cw, rw = list(candidate.words), list(reference.words)
    denom = max(len(cw), len(rw)) or 1
    word_sim = 1.0 - edit_distance(cw, rw) / denom
    return word_weight * word_sim + (1.0 - word_weight) * bracket_f1(candidate.tree, reference.tree)


# -- phase 1 ----------------------------------------------------------------------


def _stack(data, names):
    rows, targets = [], []
    for sentence in data:
        for vec, target in sentence:
            rows.append([vec[n] for n in names])
            targets.append(target)
    return np.array(rows, dtype=float).reshape(len(rows), len(names)), np.array(targets, dtype=float)


def residual(w: ScalingFactors, data) -> float:
    X, t = _stack(data, w.names)
    r = X @ w.vector() - t
    return float(r @ r)


def train_scaling_phase1(data, names, ridge=DEFAULT_RIDGE) -> ScalingFactors:
    """Least-squares weights making total scores approximate the targets.

    ``data`` is a list (per sentence) of ``(vector, target)`` pairs.  A
    rank-deficient design falls back to ridge regression with strength
    ``ridge``; with ``ridge == 0`` it is an error.
    """
    names = tuple(names)
    X, t = _stack(data, names)
    if X.shape[0] < len(names):
        raise ValueError(f"{X.shape[0]} data points for {len(names)} functions")
    rank = int(np.linalg.matrix_rank(X))
    meta = {"phase": 1, "points": int(X.shape[0]), "rank": rank}
    if rank == len(names):
        w = np.linalg.lstsq(X, t, rcond=None)[0]
        meta["method"] = "lstsq"
    elif ridge > 0:
        w = np.linalg.solve(X.T @ X + ridge * np.eye(len(names)), X.T @ t)
        meta["method"] = "ridge"
        meta["ridge"] = ridge
    else:
        raise ValueError(f"design matrix has rank {rank} < {len(names)} and ridge is disabled")
    if not np.any(w):
        raise ValueError("least squares produced all-zero weights")
    r = X @ w - t
    meta["residual"] = float(r @ r)
    return ScalingFactors({n: float(x) for n, x in zip(names, w)}, meta)


# -- phase 2 ----------------------------------------------------------------------


class _Problem:
    """Candidate matrices per sentence, rows pre-sorted into tie-break order so
    that the first maximum is the selected candidate."""

    def __init__(self, data, names):
        self.blocks = []
        self.correct = []
        for vectors, correct, keys in data:
            order = sorted(range(len(vectors)), key=lambda i: keys[i])
            M = np.array([[vectors[i][n] for n in names] for i in order], dtype=float)
            self.blocks.append(M.reshape(len(order), len(names)))
            self.correct.append(order.index(correct))
        self.bounds = np.cumsum([0] + [len(b) for b in self.blocks])
        self.X = np.vstack(self.blocks) if self.blocks else np.zeros((0, len(names)))

    def objective(self, w) -> int:
        s = self.X @ w
        hits = 0
        for k, c in enumerate(self.correct):
            seg = s[self.bounds[k]:self.bounds[k + 1]]
            hits += int(np.argmax(seg) == c)
        return hits


def _phase2_data(data):
    out = []
    for item in data:
        vectors, correct = item[0], item[1]
        keys = item[2] if len(item) > 2 else list(range(len(vectors)))
        if correct is None:
            continue
        out.append((vectors, correct, keys))
    return out


def top1_count(w: ScalingFactors, data) -> int:
    return _Problem(_phase2_data(data), w.names).objective(w.vector())


def train_scaling_phase2(w0: ScalingFactors, data, max_sweeps=DEFAULT_MAX_SWEEPS,
                         delta=DEFAULT_DELTA) -> ScalingFactors:
    """Coordinate hill climbing on the number of sentences whose marked
    candidate is selected.

    ``data`` items are ``(vectors, correct_index[, tiebreak_keys])``;
    items with ``correct_index`` None are ignored.  For each weight in turn
    the moves x2, x0.5, +d and -d are tried (d = ``delta`` times the largest
    absolute weight); the best strictly improving move is kept, ties going
    to the smaller change.  Stops after a sweep with no improvement.
    """
    names = w0.names
    prob = _Problem(_phase2_data(data), names)
    w = w0.vector().copy()
    current = prob.objective(w)
    trajectory = [current]
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        improved = False
        for f in range(len(w)):
            step = delta * float(np.max(np.abs(w))) or delta
            x = w[f]
            moves = [x + step, x - step]
            if x != 0:
                moves += [2 * x, 0.5 * x]
            best = None
            for m in moves:
                trial = w.copy()
                trial[f] = m
                obj = prob.objective(trial)
                if obj > current:
                    key = (-obj, abs(m - x))
                    if best is None or key < best[0]:
                        best = (key, m, obj)
            if best is not None:
                w[f] = best[1]
                current = best[2]
                improved = True
        trajectory.append(current)
        if not improved:
            break
    meta = dict(w0.meta)
    meta.update({"phase": 2, "sweeps": sweeps, "objective": trajectory,
                 "sentences": len(prob.correct)})
    return ScalingFactors({n: float(x) for n, x in zip(names, w)}, meta)
