"""The registry of preference functions and per-analysis score vectors."""

from __future__ import annotations

from dataclasses import dataclass

from .tables import combining_score


@dataclass(frozen=True)
class FunctionSpec:
    """One preference function.

    ``type`` is one of ``speech``, ``source`` (1 if the specialized grammar
    produced the analysis), ``structural`` (``arg`` names a flag) or
    ``combining`` (``arg`` names an object kind, ``mode`` is sum|average).
    """

    name: str
    type: str
    arg: str = ""
    mode: str = "sum"

    def to_json(self) -> dict:
        return {"name": self.name, "type": self.type, "arg": self.arg, "mode": self.mode}

    @classmethod
    def from_json(cls, d) -> "FunctionSpec":
        return cls(d["name"], d["type"], d.get("arg", ""), d.get("mode", "sum"))


DEFAULT_FUNCTIONS = (
    FunctionSpec("speech", "speech"),
    FunctionSpec("specialized", "source"),
    FunctionSpec("num_mismatch", "structural", "num_mismatch"),
    FunctionSpec("triples", "combining", "triple", "sum"),
    FunctionSpec("rules", "combining", "rule", "average"),
    FunctionSpec("ngram1", "combining", "ngram1", "average"),
    FunctionSpec("ngram2", "combining", "ngram2", "average"),
    FunctionSpec("ngram3", "combining", "ngram3", "average"),
    FunctionSpec("ngram4", "combining", "ngram4", "average"),
)


def speech_function(hypothesis) -> float:
    """The recognizer's acoustic score; repaired hypotheses already carry the
    default-low score assigned during expansion."""
    return float(hypothesis.acoustic_score)


def preference_vector(analysis, functions, tables, acoustic_max=0.0) -> dict:
    """Score one analysis under every registered function.

    ``acoustic_max`` is the best acoustic score in the utterance's list;
    the speech function is reported relative to it.
    """
    out = {}
    for f in functions:
        if f.type == "speech":
            v = speech_function(analysis.hypothesis) - acoustic_max
        elif f.type == "source":
            v = 1.0 if analysis.source == "specialized" else 0.0
        elif f.type == "structural":
            v = float(analysis.structural.get(f.arg, 0))
        elif f.type == "combining":
            v = combining_score(analysis.objects(f.arg), tables[f.arg], f.mode)
        else:
            raise ValueError(f"unknown preference function type {f.type!r}")
        out[f.name] = v
    return out


def validate_functions(functions):
    names = [f.name for f in functions]
    if len(set(names)) != len(names):
        raise ValueError("duplicate preference function names")
    if not any(f.type == "speech" for f in functions):
        raise ValueError("the speech function must be registered")
    return tuple(functions)
