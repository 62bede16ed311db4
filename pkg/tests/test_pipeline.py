import io
import json
import random

import pytest

from nbestlang.cli import main
from nbestlang.errors import DataError
from nbestlang.grammar import validate, words
from nbestlang.pipeline import (Config, CorpusSpec, evaluate, generate_corpus, parse_config,
                                parse_nbest, parse_references, run_utterance, sample_trees)
from nbestlang.pipeline.config import apply_overrides
from nbestlang.pipeline.core import MATRIX_COLS, MATRIX_ROWS, gold_analysis
from nbestlang.pipeline.corpus import corrupt, disfluent
from nbestlang.pipeline.io import Reference, Utterance, format_nbest, format_references
from nbestlang.repair import Hypothesis


# -- config -------------------------------------------------------------------------


def test_config_text_round_trip():
    cfg = Config(nbest=3, repair=False, ridge=0.01)
    assert parse_config(cfg.to_text()) == cfg


def test_config_comments_and_overrides():
    cfg = parse_config("# comment\nnbest = 7   # trailing\n\nrepair = off\n")
    assert cfg.nbest == 7 and cfg.repair is False
    assert apply_overrides(cfg, [("repair-penalty", "2.5")]).repair_penalty == 2.5


@pytest.mark.parametrize("text", [
    "colour = blue", "nbest = many", "nbest 3", "nbest = 0", "alpha = -1",
    "similarity_word_weight = 1.5", "repair = maybe",
])
def test_bad_config_rejected(text):
    with pytest.raises(DataError):
        parse_config(text)


# -- file formats ----------------------------------------------------------------------


NBEST = "u1\t2\t-5.0\tshow me flights\nu1\t1\t-4.0\tshow me the flights\n# c\nu2\t1\t-1\tlist fares\n"


def test_nbest_parsing_sorts_ranks():
    utts = parse_nbest(NBEST)
    assert [u.id for u in utts] == ["u1", "u2"]
    assert [h.rank for h in utts[0].nbest] == [1, 2]
    assert utts[0].nbest[0].text == "show me the flights"
    assert parse_nbest(format_nbest(utts))[0].nbest == utts[0].nbest


@pytest.mark.parametrize("text", [
    "u1\t1\t-4.0\n", "u1\tx\t-4.0\ta\n", "u1\t0\t-4.0\ta\n", "u1\t1\t-4.0\t \n",
    "u1\t1\t-4\ta\nu1\t1\t-5\tb\n",
])
def test_bad_nbest_rejected(text):
    with pytest.raises(DataError):
        parse_nbest(text)


def test_reference_parsing():
    refs = parse_references("u1\tShow me the flights\nu2\tlist fares\t(np_bare leaf:x)\t1\n")
    assert refs["u1"].words == ("show", "me", "the", "flights")
    assert refs["u1"].has_repair is False and refs["u1"].tree == ""
    assert refs["u2"].has_repair is True
    again = parse_references(format_references(refs.values()))
    assert again == refs


@pytest.mark.parametrize("text", ["u1\n", "u1\ta\tt\t2\n", "u1\ta\nu1\tb\n", "u1\t \n"])
def test_bad_references_rejected(text):
    with pytest.raises(DataError):
        parse_references(text)


# -- corpus generator --------------------------------------------------------------------


def test_sampled_trees_are_valid_and_distinct(grammar, lexicon):
    trees = sample_trees(grammar, lexicon, 30, seed=3)
    assert len({" ".join(words(t)) for t in trees}) == 30
    assert all(validate(grammar, t) for t in trees)


def test_sampling_is_seeded(grammar, lexicon):
    a = [t.to_bracket() for t in sample_trees(grammar, lexicon, 10, seed=9)]
    b = [t.to_bracket() for t in sample_trees(grammar, lexicon, 10, seed=9)]
    assert a == b


def test_exclusion(grammar, lexicon, treebank):
    seen = {tuple(words(t)) for t in treebank}
    trees = sample_trees(grammar, lexicon, 20, seed=11, exclude=[words(t) for t in treebank])
    assert not seen & {tuple(words(t)) for t in trees}


def test_corruptions_change_words():
    rng = random.Random(2)
    base = "show me the flights from boston to denver".split()
    for _ in range(50):
        assert corrupt(base, rng) != base
        assert len(disfluent(base, rng)) > len(base)


def test_generated_corpus_shape(grammar, lexicon):
    utts = generate_corpus(grammar, lexicon, CorpusSpec(n_utterances=15, nbest=6, seed=4,
                                                        p_repair=0.5))
    assert len(utts) == 15
    for u in utts:
        assert [h.rank for h in u.nbest] == list(range(1, len(u.nbest) + 1))
        scores = [h.acoustic_score for h in u.nbest]
        assert scores == sorted(scores, reverse=True)
        assert u.reference is not None and u.reference.tree
    assert any(u.reference.has_repair for u in utts)


# -- selection and evaluation ----------------------------------------------------------------


def _utt(uid, texts, ref, tree="", repair=False):
    hyps = [Hypothesis(tuple(t.split()), -float(i), rank=i + 1) for i, t in enumerate(texts)]
    return Utterance(uid, hyps, Reference(uid, tuple(ref.split()), tree, repair))


def test_run_utterance_selects_parsable(bundle, trained_model, config):
    u = _utt("a", ["show me flights the", "show me the flights"], "show me the flights")
    res = run_utterance(u, bundle, trained_model, config)
    assert res.outcome == "selected"
    assert res.chosen_hypothesis.text == "show me the flights"
    rec = json.loads(res.to_json())
    assert rec["chosen"] == "show me the flights"
    assert len(rec["candidates"]) == len(res.analyses)


def test_run_utterance_without_analysis(bundle, trained_model, config):
    res = run_utterance(_utt("b", ["flights flights the"], "x"), bundle, trained_model, config)
    assert res.outcome == "no-analysis-found"
    assert res.chosen_hypothesis is None


def test_repaired_hypothesis_wins_when_original_fails(bundle, trained_model, config):
    u = _utt("c", ["show me the the flights"], "show me the flights", repair=True)
    res = run_utterance(u, bundle, trained_model, config)
    assert [h.is_repaired for h in res.hypotheses] == [False, True]
    assert res.chosen_hypothesis.is_repaired
    assert res.chosen_hypothesis.text == "show me the flights"
    off = run_utterance(u, bundle, trained_model, config.replace(repair=False))
    assert off.outcome == "no-analysis-found"


def test_fallback_switch(bundle, config):
    sent = "show me the flights".split()
    assert bundle.parse(sent, config)[1] == "general"
    assert bundle.parse(sent, config.replace(fallback_general=False)) == ([], "specialized")


def test_trivial_evaluation(bundle, trained_model, config):
    utts = [_utt("t1", ["show me the flights"], "show me the flights"),
            _utt("t2", ["list fares"], "list fares")]
    rep = evaluate(utts, bundle, trained_model, config)
    assert (rep.n, rep.combined, rep.speech_only, rep.first_parsable, rep.oracle) == (2, 2, 2, 2, 2)
    assert all(rep.matrix[r][c] == 0 for r in MATRIX_ROWS for c in MATRIX_COLS)
    assert json.loads(rep.to_json())["rates"]["combined"] == 1.0


def test_evaluation_requires_references(bundle, trained_model, config):
    with pytest.raises(DataError):
        evaluate([Utterance("x", [Hypothesis(("a",), 0.0, 1)])], bundle, trained_model, config)


def test_gold_tree_must_match_words(bundle, treebank):
    good = Reference("g", tuple(words(treebank[0])), treebank[0].to_bracket())
    assert gold_analysis(good, bundle).tree == treebank[0]
    bad = Reference("g", ("show", "me"), treebank[0].to_bracket())
    with pytest.raises(DataError):
        gold_analysis(bad, bundle)


# -- command line ---------------------------------------------------------------------------


def _run(*argv):
    out = io.StringIO()
    return main(list(argv), out), out.getvalue()


def test_cli_usage_error():
    assert _run()[0] == 1
    assert _run("frobnicate")[0] == 1
    assert _run("select", "--nbest", "x")[0] == 1


def test_cli_data_errors(tmp_path):
    missing = str(tmp_path / "missing")
    assert _run("train", "--nbest", missing, "--refs", missing, "--out", missing)[0] == 2
    assert _run("repair", "--set", "colour=blue", "--input", missing)[0] == 2
    bad = tmp_path / "bad.model"
    bad.write_text("{}")
    nb = tmp_path / "a.nbest"
    nb.write_text("u1\t1\t0\tshow me the flights\n")
    assert _run("select", "--nbest", str(nb), "--model", str(bad))[0] == 2
    empty = tmp_path / "empty.tb"
    empty.write_text("")
    assert _run("specialize", "--treebank", str(empty), "--out", str(tmp_path / "b"))[0] == 2


def test_cli_repair(tmp_path):
    f = tmp_path / "in.txt"
    f.write_text("i want a flight from boston from denver to boston\nshow me fares\n")
    code, out = _run("repair", "--input", str(f))
    assert code == 0
    first, second = map(json.loads, out.splitlines())
    assert first["repaired"] == "i want a flight from denver to boston"
    assert second["candidates"] == [] and second["repaired"] is None


def test_cli_parse_and_specialize(tmp_path):
    f = tmp_path / "in.txt"
    f.write_text("give me a flight to oakland\n")
    code, out = _run("parse", "--input", str(f))
    assert code == 0 and out.startswith("# give me a flight to oakland\t")
    code, out = _run("specialize", "--out", str(tmp_path / "bundle"), "--threshold", "2")
    assert code == 0 and json.loads(out)["treebank_coverage"] <= 1.0
    code, out = _run("parse", "--with", "specialized", "--bundle", str(tmp_path / "bundle"),
                     "--input", str(f))
    assert code == 0


def test_cli_gen_train_select_evaluate(tmp_path):
    prefix = str(tmp_path / "c")
    assert _run("gen-corpus", "-n", "40", "--seed", "5", "--out", prefix)[0] == 0
    model = str(tmp_path / "m.json")
    code, out = _run("train", "--nbest", prefix + ".nbest", "--refs", prefix + ".ref",
                     "--out", model, "--set", "crossfit_folds=1")
    assert code == 0 and "objective trajectory" in out
    code, out = _run("select", "--nbest", prefix + ".nbest", "--model", model, "--set", "nbest=3")
    assert code == 0 and len(out.splitlines()) == 40
    report = tmp_path / "r.json"
    code, out = _run("evaluate", "--nbest", prefix + ".nbest", "--refs", prefix + ".ref",
                     "--model", model, "--json", str(report))
    assert code == 0 and "combined selection" in out
    assert json.loads(report.read_text())["n"] == 40
