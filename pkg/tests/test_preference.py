import json
import math
import random
from types import SimpleNamespace

import numpy as np
import pytest

from nbestlang.errors import DataError
from nbestlang.grammar import parse_chart
from nbestlang.preference import (DEFAULT_FUNCTIONS, FunctionSpec, ObjectScoreTable,
                                  PreferenceModel, ScalingFactors, bracket_f1, combining_score,
                                  edit_distance, preference_vector, residual, select_best,
                                  select_index, similarity, smoothed_score, top1_count,
                                  total_score, train_object_scores, train_scaling_phase1,
                                  train_scaling_phase2)
from nbestlang.preference.training import center_sentence
from nbestlang.repair import Hypothesis
from oracles import load_separable, normal_equations

LOG_HALF = math.log(0.5)


# -- object score tables ---------------------------------------------------------


@pytest.mark.parametrize("g,b,expected", [
    (0, 0, math.log(0.5)),
    (3, 1, math.log(3.5 / 5.0)),
    (0, 4, math.log(0.5 / 5.0)),
    (10, 0, math.log(10.5 / 11.0)),
])
def test_smoothed_score_values(g, b, expected):
    assert smoothed_score(g, b, 0.5) == pytest.approx(expected, abs=1e-12)


def test_scores_are_monotone_in_counts():
    assert smoothed_score(3, 1, 0.5) > smoothed_score(2, 1, 0.5)
    assert smoothed_score(2, 2, 0.5) < smoothed_score(2, 1, 0.5)


def test_table_training_counts_once_per_example():
    examples = [(["x", "x", "y"], True), (["y"], False), (["z"], False)]
    t = train_object_scores("rule", examples)
    assert t.counts == {"x": (1, 0), "y": (1, 1), "z": (0, 1)}
    assert t.score("x") == pytest.approx(math.log(1.5 / 2.0))
    assert t.score("unseen") == LOG_HALF


def test_table_training_needs_both_classes():
    with pytest.raises(ValueError):
        train_object_scores("rule", [(["x"], True)])
    with pytest.raises(ValueError):
        train_object_scores("rule", [(["x"], False)])
    with pytest.raises(ValueError):
        ObjectScoreTable("quad")


def test_frequency_only_ignores_bad_examples():
    t = train_object_scores("rule", [(["x"], True), (["x", "y"], True), (["x"], False)],
                            frequency_only=True)
    assert t.counts == {"x": (2, 0), "y": (1, 0)}
    assert t.score("x") == pytest.approx(math.log(2.5 / 3.0))


def test_combining_sum_and_average():
    t = train_object_scores("rule", [(["a"], True), (["b"], False)])
    objs = {"a": 2, "b": 1}
    s = 2 * t.score("a") + t.score("b")
    assert combining_score(objs, t, "sum") == pytest.approx(s)
    assert combining_score(objs, t, "average") == pytest.approx(s / 3)
    assert combining_score({}, t, "sum") == 0.0
    assert combining_score({}, t, "average") == LOG_HALF
    with pytest.raises(ValueError):
        combining_score(objs, t, "median")
    with pytest.raises(ValueError):
        combining_score(objs, t, "sum", kind="triple")


# -- preference vectors and selection ------------------------------------------


def _an(words, acoustic, source="general", repaired=False, flags=None, tree=None):
    h = Hypothesis(tuple(words.split()), acoustic, rank=1, source_rank=1 if repaired else None)
    return SimpleNamespace(hypothesis=h, source=source, structural=flags or {}, tree=tree,
                           words=h.words, objects=lambda kind: {})


def test_preference_vector_components():
    funcs = (FunctionSpec("speech", "speech"), FunctionSpec("spec", "source"),
             FunctionSpec("nm", "structural", "num_mismatch"))
    v = preference_vector(_an("a b", -4.0, "specialized", flags={"num_mismatch": 2}), funcs, {},
                          acoustic_max=-1.0)
    assert v == {"speech": -3.0, "spec": 1.0, "nm": 2.0}


def test_speech_function_is_required():
    with pytest.raises(ValueError):
        PreferenceModel((FunctionSpec("spec", "source"),))
    with pytest.raises(ValueError):
        PreferenceModel((FunctionSpec("speech", "speech"), FunctionSpec("speech", "source")))


def test_total_score_is_dot_product():
    w = ScalingFactors({"a": 2.0, "b": -1.0})
    assert total_score({"a": 3.0, "b": 4.0}, w) == 2.0
    with pytest.raises(ValueError):
        total_score({"a": 1.0}, w)


def test_selection_tiebreaks():
    w = ScalingFactors({"x": 1.0})
    orig_low = _an("a", -5.0)
    orig_high = _an("b", -2.0)
    repaired = _an("c", -1.0, repaired=True)
    same = {"x": 0.0}
    # equal totals: originals first, then the better acoustic score
    assert select_index([(repaired, same), (orig_low, same), (orig_high, same)], w) == 2
    assert select_index([(orig_low, same), (_an("d", -5.0), same)], w) == 0
    assert select_best([(orig_low, {"x": 1.0}), (orig_high, same)], w) is orig_low
    assert select_index([], w) is None
    with pytest.raises(ValueError):
        select_best([], w)


def test_scale_invariance_of_selection():
    rng = random.Random(1)
    for _ in range(50):
        w = ScalingFactors({k: rng.uniform(-2, 2) for k in "abc"})
        cands = [(_an(f"w{i}", -float(i)), {k: rng.uniform(-1, 1) for k in "abc"})
                 for i in range(5)]
        assert select_index(cands, w) == select_index(cands, w.scaled(3.7))


# -- similarity --------------------------------------------------------------------


@pytest.mark.parametrize("a,b,d", [
    ("", "", 0), ("a b c", "a b c", 0), ("a b c", "a c", 1), ("a b", "c d", 2),
    ("k i t t e n", "s i t t i n g", 3),
])
def test_edit_distance(a, b, d):
    assert edit_distance(a.split(), b.split()) == d
    assert edit_distance(b.split(), a.split()) == d


def test_similarity_extremes(grammar, lexicon):
    ts = parse_chart(grammar, "show me the flights to boston".split(), lexicon)
    ref = _an("show me the flights to boston", 0.0, tree=ts[0])
    same = _an("show me the flights to boston", 0.0, tree=ts[0])
    other = _an("show me the flights to boston", 0.0, tree=ts[1])
    assert similarity(same, ref) == 1.0
    assert 0.5 < similarity(other, ref) < 1.0
    assert similarity(other, ref, word_weight=1.0) == 1.0
    assert bracket_f1(ts[1], ts[0]) == pytest.approx(2 * similarity(other, ref) - 1)


# -- phase 1 -------------------------------------------------------------------------


def _random_phase1(seed, names, n_sent=8, per=4, dup=None):
    rng = random.Random(seed)
    data = []
    for _ in range(n_sent):
        s = []
        for _ in range(per):
            v = {n: rng.uniform(-1, 1) for n in names}
            if dup:
                v[dup[1]] = 2 * v[dup[0]]
            s.append((v, rng.uniform(0, 1)))
        data.append(s)
    return data


def test_phase1_matches_normal_equations_oracle():
    names = ("a", "b", "c")
    for seed in range(5):
        data = _random_phase1(seed, names)
        w = train_scaling_phase1(data, names)
        assert w.meta["method"] == "lstsq"
        oracle = normal_equations(data, names)
        assert list(w.vector()) == pytest.approx(oracle, abs=1e-9)
        assert w.meta["residual"] == pytest.approx(residual(w, data), abs=1e-9)


def test_phase1_ridge_fallback_matches_oracle():
    names = ("a", "b", "c")
    data = _random_phase1(7, names, dup=("a", "b"))
    w = train_scaling_phase1(data, names, ridge=1e-3)
    assert w.meta["method"] == "ridge" and w.meta["rank"] == 2
    assert list(w.vector()) == pytest.approx(normal_equations(data, names, 1e-3), abs=1e-8)
    with pytest.raises(ValueError):
        train_scaling_phase1(data, names, ridge=0.0)


def test_phase1_needs_enough_points():
    with pytest.raises(ValueError):
        train_scaling_phase1([[({"a": 1.0, "b": 2.0}, 1.0)]], ("a", "b"))


def test_center_sentence_removes_offsets():
    out = center_sentence([{"a": 1.0}, {"a": 3.0}], [0.0, 1.0])
    assert out == [({"a": -1.0}, -0.5), ({"a": 1.0}, 0.5)]


# -- phase 2 -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def separable():
    return load_separable()


def test_separable_set_phase2_reaches_all(separable):
    names, p1, items = separable
    w1 = train_scaling_phase1(p1, names, ridge=0.0)
    assert top1_count(w1, items) == 4
    w2 = train_scaling_phase2(w1, items)
    assert top1_count(w2, items) == len(items) == 6
    assert w2.meta["objective"][0] == 4 and w2.meta["objective"][-1] == 6


def test_phase2_is_monotone_and_never_worse():
    rng = random.Random(4)
    names = ("a", "b", "c")
    for _ in range(10):
        items = []
        for _ in range(12):
            cands = [{n: rng.uniform(-1, 1) for n in names} for _ in range(4)]
            items.append((cands, rng.randrange(4)))
        w0 = ScalingFactors({n: rng.uniform(-1, 1) for n in names})
        w = train_scaling_phase2(w0, items)
        traj = w.meta["objective"]
        assert traj == sorted(traj)
        assert traj[0] == top1_count(w0, items)
        assert traj[-1] == top1_count(w, items)


def test_phase2_skips_unmarked_sentences():
    items = [([{"a": 1.0}, {"a": 0.0}], 0), ([{"a": 1.0}, {"a": 0.0}], None)]
    w = train_scaling_phase2(ScalingFactors({"a": 1.0}), items)
    assert w.meta["sentences"] == 1


def test_phase2_uses_tiebreak_keys():
    # equal scores: the key order decides which candidate counts as selected
    items = [([{"a": 0.0}, {"a": 0.0}], 1, [(False, 0, 1), (False, 0, 0)])]
    assert top1_count(ScalingFactors({"a": 1.0}), items) == 1


# -- model file ------------------------------------------------------------------------


def test_model_round_trip(trained_model):
    text = trained_model.to_json()
    again = PreferenceModel.from_json(text)
    assert again.to_json() == text
    assert again.weights.weights == trained_model.weights.weights
    for kind, t in trained_model.tables.items():
        assert again.tables[kind].scores == t.scores


def test_model_has_every_default_function(trained_model):
    assert trained_model.names == tuple(f.name for f in DEFAULT_FUNCTIONS)
    assert all(np.isfinite(v) for v in trained_model.weights.weights.values())


@pytest.mark.parametrize("text", [
    "not json",
    json.dumps({"format": "other", "version": 1}),
    json.dumps({"format": "nbestlang-preference-model", "version": 99}),
])
def test_model_file_errors(text):
    with pytest.raises(DataError):
        PreferenceModel.from_json(text)
