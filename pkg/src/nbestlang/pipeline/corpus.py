"""Synthetic ATIS-style data: grammar derivations sampled with domain-shaped
word choices, recognizer-style N-best lists built by corrupting them, and
optional injected restart repairs.

Every sampled sentence is a derivation of the general grammar; the
skeleton is realized (and thereby checked) against the grammar before use.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..errors import InternalError
from ..grammar.trees import realize, words as tree_words
from ..repair import Hypothesis
from .io import Reference, Utterance

CITIES = ("boston", "denver", "oakland", "dallas", "atlanta", "pittsburgh",
          "philadelphia", "baltimore")
DAYS = ("monday", "tuesday", "wednesday", "thursday", "friday")
AIRLINES = ("delta", "united", "american")
DIGITS = ("one", "two", "three", "four", "five", "six", "seven", "eight", "nine")

NUMBER_SWAPS = {
    "flight": "flights", "fare": "fares", "airline": "airlines", "ticket": "tickets",
    "is": "are", "does": "do", "goes": "go", "leaves": "leave", "flies": "fly",
    "arrives": "arrive", "a": "the",
}
NUMBER_SWAPS.update({v: k for k, v in list(NUMBER_SWAPS.items()) if v != "the"})
FUNCTION_SWAPS = {
    "to": ("two", "the", "in", "at"), "for": ("four", "from"), "from": ("for", "in", "on"),
    "on": ("in", "and", "from"), "the": ("a", "to", "that"), "a": ("the", "to", "of"),
    "me": ("the", "any"), "show": ("so", "list"), "list": ("is", "show"),
    "what": ("which", "what's"), "which": ("what",), "i": ("a", "and"),
    "want": ("one", "what"), "need": ("me",), "are": ("or",), "is": ("it", "as"),
    "fly": ("flights",), "flights": ("fly", "flight"),
}
INSERTIONS = ("the", "a", "and", "to", "uh", "of", "in")


# -- sentence sampling -------------------------------------------------------------


class SentenceSampler:
    """Draws derivation skeletons ``(rule_id, children)`` for the toy grammar."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def pick(self, items, weights=None):
        return self.rng.choices(items, weights=weights, k=1)[0]

    # noun phrases

    def route_pps(self, min_pps=0):
        r = self.rng
        a, b = r.sample(CITIES, 2)
        pattern = self.pick(["from_to", "to", "from", "to_from", "none"], [6, 3, 2, 1, 1])
        pps = []
        if pattern in ("from_to", "from"):
            pps.append(("pp_p", ["from", ("np_pn", [a])]))
        if pattern in ("from_to", "to", "to_from"):
            pps.append(("pp_p", ["to", ("np_pn", [b])]))
        if pattern == "to_from":
            pps.append(("pp_p", ["from", ("np_pn", [a])]))
        if r.random() < 0.3:
            pps.append(("pp_p", ["on", ("np_pn", [self.pick(DAYS)])]))
        if len(pps) < min_pps:
            pps.append(("pp_p", ["to", ("np_pn", [b])]))
        return pps

    def nbar(self, noun, adj=None, pps=()):
        n1 = ("n1_n", [noun])
        if adj:
            n1 = ("n1_adj", [adj, n1])
        sk = ("nbar_n1", [n1])
        for pp in pps:
            sk = ("nbar_pp", [sk, pp])
        return sk

    def noun(self, num):
        base = self.pick(["flight", "fare", "ticket", "airline"], [10, 4, 1, 1])
        return base if num == "sg" else base + "s"

    def flight_np(self, num, det=None, min_pps=0, allow_bare=True):
        noun = self.noun(num)
        adj = None
        if self.rng.random() < 0.25:
            adj = self.pick(["cheapest", "first", "earliest", "last", "nonstop"])
        pps = self.route_pps(min_pps) if not noun.startswith("airline") else (
            [("pp_p", ["to", ("np_pn", [self.pick(CITIES)])])] if self.rng.random() < 0.5 else [])
        if det is None:
            if adj in ("cheapest", "first", "earliest", "last"):
                det = "the"
            elif num == "sg":
                det = self.pick(["the", "a"], [2, 3])
            else:
                det = self.pick(["the", "", "any"], [3, 3, 1]) if allow_bare else "the"
        nb = self.nbar(noun, adj, pps)
        return ("np_det", [det, nb]) if det else ("np_bare", [nb])

    def flight_code_np(self):
        digits = [self.pick(DIGITS) for _ in range(self.rng.randint(2, 4))]
        seq = ("numseq_one", [digits[-1]])
        for d in reversed(digits[:-1]):
            seq = ("numseq_more", [d, seq])
        return ("np_bare", [("nbar_code", ["flight", seq])])

    def motion_vp(self, verb, min_pps=1):
        vp = ("vp_intr", [verb])
        for pp in self.route_pps(min_pps):
            vp = ("vp_pp", [vp, pp])
        return vp

    # sentences

    def sentence(self):
        kind = self.pick(
            ["show", "list", "want", "want_fly", "do_have", "does_fly", "what_is",
             "which_fly", "what_do_have", "frag", "code", "is_nonstop"],
            [14, 6, 8, 5, 6, 3, 7, 5, 3, 5, 2, 1])
        num = self.pick(["sg", "pl"], [2, 3])
        me = ("np_pro", ["me"])
        if kind == "show":
            v = self.pick(["show", "give", "tell"], [6, 2, 1])
            return ("s_imp", [("vp_ditr", [v, me, self.flight_np(num)])])
        if kind == "list":
            return ("s_imp", [("vp_tr", [self.pick(["list", "show"]), self.flight_np(num)])])
        if kind == "want":
            return ("s_decl", [("np_pro", ["i"]),
                               ("vp_tr", [self.pick(["want", "need"], [3, 1]),
                                          self.flight_np("sg", min_pps=1)])])
        if kind == "want_fly":
            return ("s_decl", [("np_pro", ["i"]),
                               ("vp_inf", [self.pick(["want", "need"], [3, 1]), "to",
                                           self.motion_vp(self.pick(["fly", "go"]))])])
        if kind == "do_have":
            return ("s_ynq", ["do", ("np_pro", ["you"]),
                              ("vp_tr", ["have", self.flight_np(num, min_pps=1)])])
        if kind == "does_fly":
            return ("s_ynq", ["does", ("np_pn", [self.pick(AIRLINES)]), self.motion_vp("fly")])
        if kind == "what_is":
            cop = "is" if num == "sg" else "are"
            return ("s_whcop", [("np_wh", ["what"]), cop,
                                self.flight_np(num, det="the", min_pps=1)])
        if kind == "which_fly":
            wh = self.pick(["which", "what"])
            if num == "sg":
                subj = ("np_det", [wh, self.nbar(self.pick(["flight", "airline"]))])
                verb = self.pick(["goes", "flies", "leaves", "arrives"])
            else:
                subj = ("np_det", [wh, self.nbar(self.pick(["flights", "airlines"]))])
                verb = self.pick(["go", "fly", "leave", "arrive"])
            return ("s_whsubj", [subj, self.motion_vp(verb)])
        if kind == "what_do_have":
            vp = ("vp_gap", ["have"])
            for pp in self.route_pps(1):
                vp = ("vp_pp", [vp, pp])
            return ("s_whq", [("np_det", ["what", self.nbar("flights")]), "do",
                              ("np_pro", ["you"]), vp])
        if kind == "frag":
            return ("s_frag", [self.flight_np(num, min_pps=1)])
        if kind == "code":
            return ("s_imp", [("vp_ditr", ["show", me, self.flight_code_np()])])
        return ("s_qcop", ["is", ("np_det", ["the", self.nbar("flight", pps=self.route_pps(1))]),
                           "nonstop"])


def sample_tree(grammar, lexicon, rng):
    sk = SentenceSampler(rng).sentence()
    trees = realize(grammar, sk, lexicon)
    if not trees:
        raise InternalError(f"sampled skeleton is not a derivation: {sk!r}")
    return trees[0]


def sample_trees(grammar, lexicon, n, seed, distinct=True, exclude=()) -> list:
    """``n`` sampled trees; with ``distinct`` no word string repeats or
    occurs in ``exclude`` (word strings)."""
    rng = random.Random(seed)
    out, seen = [], {" ".join(e) if not isinstance(e, str) else e for e in exclude}
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > 100 * n:
            raise InternalError("could not sample enough distinct sentences")
        t = sample_tree(grammar, lexicon, rng)
        key = " ".join(tree_words(t))
        if distinct and key in seen:
            continue
        seen.add(key)
        out.append(t)
    return out


# -- recognizer simulation ---------------------------------------------------------


def corrupt(words, rng) -> list:
    """One recognizer-style error: a number, city, day or function-word
    confusion, a deletion, an insertion or a doubled word."""
    w = list(words)
    op = rng.choices(["number", "city", "day", "class", "function", "delete", "insert",
                      "double"], weights=[5, 4, 2, 2, 6, 3, 3, 1], k=1)[0]
    idx = list(range(len(w)))
    if op == "number":
        cand = [i for i in idx if w[i] in NUMBER_SWAPS]
        if cand:
            i = rng.choice(cand)
            w[i] = NUMBER_SWAPS[w[i]]
            return w
        op = "function"
    if op in ("city", "day", "class"):
        pool = CITIES if op == "city" else DAYS
        cand = [i for i in idx if w[i] in (CITIES + DAYS if op == "class" else pool)]
        if cand:
            i = rng.choice(cand)
            if op == "class":
                pool = DAYS if w[i] in CITIES else CITIES
            w[i] = rng.choice([x for x in pool if x != w[i]])
            return w
        op = "function"
    if op == "function":
        cand = [i for i in idx if w[i] in FUNCTION_SWAPS]
        if cand:
            i = rng.choice(cand)
            w[i] = rng.choice(FUNCTION_SWAPS[w[i]])
            return w
        op = "delete"
    if op == "delete" and len(w) > 2:
        del w[rng.randrange(len(w))]
        return w
    if op == "double":
        i = rng.randrange(len(w))
        w.insert(i, w[i])
        return w
    w.insert(rng.randrange(len(w) + 1), rng.choice(INSERTIONS))
    return w


def disfluent(words, rng) -> list:
    """A restart: the opening words, possibly changed and followed by an
    editing word, then the whole intended sentence."""
    w = list(words)
    k = rng.randint(2, min(4, len(w) - 1))
    prefix = w[:k]
    if rng.random() < 0.4:
        j = rng.randrange(1, k)
        alt = NUMBER_SWAPS.get(prefix[j])
        if prefix[j] in CITIES:
            alt = rng.choice([c for c in CITIES if c != prefix[j]])
        if alt:
            prefix[j] = alt
    marker = rng.choice(["no", "sorry"]) if rng.random() < 0.3 else None
    return prefix + ([marker] if marker else []) + w


@dataclass
class CorpusSpec:
    n_utterances: int = 200
    nbest: int = 10
    seed: int = 1
    p_correct_in_list: float = 0.85
    p_correct_first: float = 0.6
    p_repair: float = 0.1
    gap_mean: float = 2.0


def make_utterance(uid, tree, spec: CorpusSpec, rng) -> Utterance:
    ref_words = tuple(tree_words(tree))
    has_repair = rng.random() < spec.p_repair and len(ref_words) >= 3
    spoken = tuple(disfluent(ref_words, rng)) if has_repair else ref_words
    others, seen = [], {spoken, ref_words}
    tries = 0
    while len(others) < spec.nbest - 1 and tries < 200:
        tries += 1
        w = corrupt(spoken, rng)
        if rng.random() < 0.3:
            w = corrupt(w, rng)
        w = tuple(w)
        if w not in seen:
            seen.add(w)
            others.append(w)
    include = rng.random() < spec.p_correct_in_list
    ordered = list(others)
    if include:
        if rng.random() < spec.p_correct_first:
            pos = 0
        else:
            pos = rng.randint(1, min(4, len(ordered)))
        ordered.insert(pos, spoken)
    ordered = ordered[:spec.nbest]
    score = -round(40.0 + 6.0 * len(spoken) + rng.uniform(0, 10), 2)
    hyps = []
    for r, w in enumerate(ordered, 1):
        hyps.append(Hypothesis(w, round(score, 2), rank=r))
        score -= max(0.01, rng.expovariate(1.0 / spec.gap_mean))
    ref = Reference(uid, ref_words, tree.to_bracket(), has_repair)
    return Utterance(uid, hyps, ref)


def generate_corpus(grammar, lexicon, spec: CorpusSpec, prefix="u") -> list:
    """``spec.n_utterances`` utterances with references, deterministic in ``spec.seed``."""
    rng = random.Random(spec.seed)
    trees = sample_trees(grammar, lexicon, spec.n_utterances, rng.randrange(2**31), distinct=False)
    width = len(str(spec.n_utterances))
    return [make_utterance(f"{prefix}{i:0{width}d}", t, spec, rng)
            for i, t in enumerate(trees, 1)]
