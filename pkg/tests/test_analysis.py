import collections

import pytest

from nbestlang.analysis import (BOS, EOS, analyze, count_num_mismatch, extract_triples,
                                head_leaf, parse_record, structural_flags, word_ngrams)
from nbestlang.grammar import parse_chart
from nbestlang.repair import Hypothesis


def _parse(grammar, lexicon, text):
    return parse_chart(grammar, text.split(), lexicon)


def test_object_triple(grammar, lexicon):
    (t,) = _parse(grammar, lexicon, "show me the flights")
    trips = extract_triples(t, grammar, lexicon)
    assert ("show", 2, "flight") in trips


def test_pp_attachment_gives_distinct_triples(grammar, lexicon):
    found = [extract_triples(t, grammar, lexicon)
             for t in _parse(grammar, lexicon, "show me the flights to boston")]
    assert len(found) == 2
    flat = [set(f) for f in found]
    assert any(("flight", "to", "*place") in f for f in flat)
    assert any(("show", "to", "*place") in f for f in flat)
    assert not any(("flight", "to", "*place") in f and ("show", "to", "*place") in f
                   for f in flat)


def test_sem_class_abstraction_shares_triples(grammar, lexicon):
    a = extract_triples(_parse(grammar, lexicon, "list flights to boston")[0], grammar, lexicon)
    b = extract_triples(_parse(grammar, lexicon, "list flights to denver")[0], grammar, lexicon)
    assert set(a) == set(b)


def test_head_leaf_follows_head_daughters(grammar, lexicon):
    (t,) = _parse(grammar, lexicon, "show me the flights")
    assert head_leaf(t, grammar).word == "show"


@pytest.mark.parametrize("text,expected", [
    ("what is the first flights to boston", 1),
    ("what is the first flight to boston", 0),
    ("what are the flights to boston", 0),
])
def test_num_mismatch(grammar, lexicon, text, expected):
    trees = _parse(grammar, lexicon, text)
    assert trees
    assert {count_num_mismatch(t, grammar) for t in trees} == {expected}
    assert structural_flags(trees[0], grammar) == {"num_mismatch": expected}


def test_custom_flag_registry(grammar, lexicon):
    (t,) = _parse(grammar, lexicon, "show me the flights")
    flags = structural_flags(t, grammar, {"depth_one": lambda tree, g: 1})
    assert flags == {"depth_one": 1}


def test_word_ngrams_padding():
    assert word_ngrams(["a", "b"], 1) == collections.Counter(
        {(BOS,): 1, ("a",): 1, ("b",): 1, (EOS,): 1})
    assert word_ngrams(["a", "b"], 3) == collections.Counter(
        {(BOS, "a", "b"): 1, ("a", "b", EOS): 1})
    assert word_ngrams(["a"], 4) == collections.Counter()


def test_word_ngram_counts():
    grams = word_ngrams("to boston to boston".split(), 2)
    assert grams[("to", "boston")] == 2
    assert sum(grams.values()) == 5


@pytest.mark.parametrize("n", [0, 5])
def test_word_ngrams_order_range(n):
    with pytest.raises(ValueError):
        word_ngrams(["a"], n)


def test_analysis_record_round_trip(grammar, lexicon):
    t = _parse(grammar, lexicon, "show me the flights to boston")[0]
    hyp = Hypothesis(tuple("show me the flights to boston".split()), -3.0, rank=2)
    an = analyze("u1", 0, hyp, t, grammar, lexicon, source="specialized")
    assert an.words == hyp.words
    assert an.objects("rule") == collections.Counter(an.rules_used)
    assert sum(an.objects("ngram1").values()) == len(hyp.words) + 2
    utt, rank, source, tree, trips, flags = parse_record(an.to_record(), grammar, lexicon)
    assert (utt, rank, source) == ("u1", "2", "specialized")
    assert tree == t
    assert trips == an.triples
    assert flags == an.structural


def test_unknown_object_kind(grammar, lexicon):
    t = _parse(grammar, lexicon, "show me the flights")[0]
    an = analyze("u", 0, Hypothesis(("show", "me", "the", "flights"), 0.0), t, grammar, lexicon)
    with pytest.raises(KeyError):
        an.objects("quadruple")
