"""N-best and reference file formats.

N-best: ``utt_id<TAB>rank<TAB>acoustic_score<TAB>words`` per line.
Reference: ``utt_id<TAB>words[<TAB>gold tree bracket[<TAB>repair flag 0|1]]``.
Blank lines and lines starting with ``#`` are ignored in both.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DataError
from ..repair import Hypothesis


@dataclass
class Reference:
    utt_id: str
    words: tuple
    tree: str = ""              # bracketed general-grammar tree, may be empty
    has_repair: bool = False


@dataclass
class Utterance:
    id: str
    nbest: list                 # Hypothesis, rank order
    reference: Reference | None = None

    def truncated(self, n) -> "Utterance":
        return Utterance(self.id, self.nbest[:n], self.reference)


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        if line.strip() and not line.lstrip().startswith("#"):
            yield lineno, line


def parse_nbest(text, source="<nbest>") -> list:
    """Utterances in order of first appearance, hypotheses sorted by rank."""
    groups: dict = {}
    for lineno, line in _lines(text):
        fields = line.split("\t")
        if len(fields) != 4:
            raise DataError(f"{source}:{lineno}: expected 4 tab-separated fields")
        uid, rank, score, words = fields
        try:
            rank_i, score_f = int(rank), float(score)
        except ValueError:
            raise DataError(f"{source}:{lineno}: bad rank or score") from None
        if rank_i < 1:
            raise DataError(f"{source}:{lineno}: rank must be >= 1")
        toks = tuple(words.split())
        if not toks:
            raise DataError(f"{source}:{lineno}: empty hypothesis")
        hyps = groups.setdefault(uid, {})
        if rank_i in hyps:
            raise DataError(f"{source}:{lineno}: duplicate rank {rank_i} for {uid}")
        hyps[rank_i] = Hypothesis(toks, score_f, rank=rank_i)
    return [Utterance(uid, [h[r] for r in sorted(h)]) for uid, h in groups.items()]


def format_nbest(utterances) -> str:
    out = []
    for u in utterances:
        for h in u.nbest:
            out.append(f"{u.id}\t{h.rank}\t{h.acoustic_score:.2f}\t{h.text}\n")
    return "".join(out)


def parse_references(text, source="<references>") -> dict:
    refs = {}
    for lineno, line in _lines(text):
        fields = line.split("\t")
        if not 2 <= len(fields) <= 4:
            raise DataError(f"{source}:{lineno}: expected 2 to 4 tab-separated fields")
        uid, words = fields[0], tuple(w.lower() for w in fields[1].split())
        if not words:
            raise DataError(f"{source}:{lineno}: empty reference")
        tree = fields[2].strip() if len(fields) > 2 else ""
        flag = fields[3].strip() if len(fields) > 3 else "0"
        if flag not in ("0", "1"):
            raise DataError(f"{source}:{lineno}: repair flag must be 0 or 1")
        if uid in refs:
            raise DataError(f"{source}:{lineno}: duplicate reference for {uid}")
        refs[uid] = Reference(uid, words, tree, flag == "1")
    return refs


def format_references(refs) -> str:
    return "".join(f"{r.utt_id}\t{' '.join(r.words)}\t{r.tree}\t{int(r.has_repair)}\n"
                   for r in refs)


def attach_references(utterances, refs, required=True) -> list:
    out = []
    for u in utterances:
        ref = refs.get(u.id)
        if ref is None and required:
            raise DataError(f"no reference for utterance {u.id}")
        out.append(Utterance(u.id, u.nbest, ref))
    return out


def read_text(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def load_corpus(nbest_path, ref_path=None, required=True) -> list:
    utts = parse_nbest(read_text(nbest_path), str(nbest_path))
    if ref_path is None:
        return utts
    return attach_references(utts, parse_references(read_text(ref_path), str(ref_path)), required)
