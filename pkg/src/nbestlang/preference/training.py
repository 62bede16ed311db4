"""End-to-end preference training from analysed N-best lists with gold labels."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .functions import DEFAULT_FUNCTIONS
from .model import PreferenceModel
from .scaling import (DEFAULT_DELTA, DEFAULT_MAX_SWEEPS, DEFAULT_RIDGE, ScalingFactors,
                      similarity, tiebreak_key, top1_count, train_scaling_phase1,
                      train_scaling_phase2)
from .tables import DEFAULT_ALPHA, train_object_scores

log = logging.getLogger(__name__)

SLT0_SPEECH_GRID = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass
class TrainingUtterance:
    """All analyses of one utterance's expanded N-best list.

    ``gold`` is the reference analysis (target for similarity) and
    ``gold_index`` the position in ``analyses`` of the analysis marked
    correct, or None if no candidate is correct.
    """

    utt_id: str
    analyses: list
    acoustic_max: float
    reference_words: tuple
    gold: object = None
    gold_index: int | None = None


def object_examples(utterances, kind):
    """``(objects, is_good)`` examples for one table kind.

    Triples and rules are counted per analysis; N-grams once per distinct
    hypothesis string, good when the string is the reference.
    """
    if kind in ("triple", "rule"):
        for u in utterances:
            for i, an in enumerate(u.analyses):
                yield an.objects(kind), i == u.gold_index
    else:
        for u in utterances:
            seen = set()
            for an in u.analyses:
                words = an.hypothesis.words
                if words in seen:
                    continue
                seen.add(words)
                yield an.objects(kind), words == tuple(u.reference_words)


def _train_tables(utterances, kinds, alpha, slt0):
    return {k: train_object_scores(k, object_examples(utterances, k), alpha, frequency_only=slt0)
            for k in kinds}


def _phase2_items(utterances, models):
    items = []
    for u, model in zip(utterances, models):
        vectors = [model.vector(an, u.acoustic_max) for an in u.analyses]
        keys = [tiebreak_key(an.hypothesis, i) for i, an in enumerate(u.analyses)]
        items.append((vectors, u.gold_index, keys))
    return items


def center_sentence(vectors, targets):
    """Subtract the sentence means from every vector component and target.

    Selection compares candidates of one sentence only, so a per-sentence
    offset is irrelevant to it; removing it lets the least-squares fit
    spend its parameters on differences between candidates.
    """
    n = len(vectors)
    names = list(vectors[0])
    mean = {k: math.fsum(v[k] for v in vectors) / n for k in names}
    tmean = math.fsum(targets) / n
    return [({k: v[k] - mean[k] for k in names}, t - tmean) for v, t in zip(vectors, targets)]


def train_model(utterances, functions=DEFAULT_FUNCTIONS, alpha=DEFAULT_ALPHA,
                ridge=DEFAULT_RIDGE, max_sweeps=DEFAULT_MAX_SWEEPS, delta=DEFAULT_DELTA,
                word_weight=0.5, slt0=False, folds=5) -> PreferenceModel:
    """Object tables from all utterances, then scaling factors.

    With ``folds > 1`` the preference vectors used to fit the scaling
    factors are cross-fitted: utterance ``i`` is scored with tables trained
    on the utterances outside fold ``i % folds``, so the weights are not
    fitted to in-sample object scores.
    """
    utterances = [u for u in utterances if u.analyses]
    if not utterances:
        raise ValueError("no analysed training utterances")
    kinds = sorted({f.arg for f in functions if f.type == "combining"})
    tables = _train_tables(utterances, kinds, alpha, slt0)
    settings = {"alpha": alpha, "ridge": ridge, "max_sweeps": max_sweeps, "delta": delta,
                "word_weight": word_weight, "slt0": slt0, "folds": folds}
    model = PreferenceModel(tuple(functions), tables, None, settings)
    if folds > 1 and len(utterances) >= folds:
        fold_models = []
        for f in range(folds):
            rest = [u for i, u in enumerate(utterances) if i % folds != f]
            fold_models.append(PreferenceModel(tuple(functions),
                                               _train_tables(rest, kinds, alpha, slt0)))
        scorers = [fold_models[i % folds] for i in range(len(utterances))]
    else:
        scorers = [model] * len(utterances)
    items = _phase2_items(utterances, scorers)
    if slt0:
        model.weights = _slt0_weights(model, items)
        log.info("slt0 speech weight %s top1 %s", model.weights.weights["speech"],
                 model.weights.meta["objective"])
        return model

    phase1_data = []
    for u, (vectors, _, _) in zip(utterances, items):
        if u.gold is None:
            continue
        targets = [similarity(an, u.gold, word_weight) for an in u.analyses]
        phase1_data.append(center_sentence(vectors, targets))
    w1 = train_scaling_phase1(phase1_data, model.names, ridge)
    log.info("phase 1 residual %.6g top1 %d", w1.meta["residual"], top1_count(w1, items))
    w2 = train_scaling_phase2(w1, items, max_sweeps, delta)
    log.info("phase 2 objective trajectory %s", w2.meta["objective"])
    model.weights = w2
    return model


def _slt0_weights(model, items) -> ScalingFactors:
    """Fixed unit weights (structural flags count against an analysis) and a
    speech weight tuned separately by grid search on top-1 accuracy."""
    base = {}
    for f in model.functions:
        base[f.name] = -1.0 if f.type == "structural" else 1.0
    best = None
    for s in SLT0_SPEECH_GRID:
        w = ScalingFactors({**base, **{f.name: s for f in model.functions if f.type == "speech"}})
        obj = top1_count(w, items)
        if best is None or obj > best[0]:
            best = (obj, w)
    obj, w = best
    w.meta = {"phase": "slt0", "objective": [obj]}
    return w
