"""Trained preference model and its JSON container file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import DataError
from .functions import DEFAULT_FUNCTIONS, FunctionSpec, preference_vector, validate_functions
from .scaling import ScalingFactors
from .tables import ObjectScoreTable

FORMAT = "nbestlang-preference-model"
VERSION = 1


@dataclass
class PreferenceModel:
    functions: tuple = DEFAULT_FUNCTIONS
    tables: dict = field(default_factory=dict)     # kind -> ObjectScoreTable
    weights: ScalingFactors | None = None
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        self.functions = validate_functions(self.functions)

    @property
    def names(self) -> tuple:
        return tuple(f.name for f in self.functions)

    def vector(self, analysis, acoustic_max=0.0) -> dict:
        return preference_vector(analysis, self.functions, self.tables, acoustic_max)

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> str:
        tables = {}
        for kind in sorted(self.tables):
            t = self.tables[kind]
            rows = [[_encode(o), g, b, t.scores[o]] for o, (g, b) in t.counts.items()]
            rows.sort(key=lambda r: json.dumps(r[0]))
            tables[kind] = {"alpha": t.alpha, "frequency_only": t.frequency_only,
                            "total_good": t.total_good, "objects": rows}
        data = {
            "format": FORMAT,
            "version": VERSION,
            "functions": [f.to_json() for f in self.functions],
            "tables": tables,
            "weights": None if self.weights is None else
            {"values": [[k, v] for k, v in self.weights.weights.items()],
             "training": self.weights.meta},
            "settings": self.settings,
        }
        return json.dumps(data, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text, source="<model>") -> "PreferenceModel":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{source}: not a JSON model file ({exc})") from None
        if d.get("format") != FORMAT:
            raise DataError(f"{source}: not a preference model file")
        if d.get("version") != VERSION:
            raise DataError(f"{source}: unsupported model version {d.get('version')!r}")
        functions = tuple(FunctionSpec.from_json(f) for f in d["functions"])
        tables = {}
        for kind, td in d["tables"].items():
            t = ObjectScoreTable(kind, td["alpha"], frequency_only=td["frequency_only"],
                                 total_good=td["total_good"])
            for obj, g, b, s in td["objects"]:
                o = _decode(kind, obj)
                t.counts[o] = (g, b)
                t.scores[o] = s
            tables[kind] = t
        w = d.get("weights")
        weights = None if w is None else ScalingFactors({k: v for k, v in w["values"]}, w["training"])
        return cls(functions, tables, weights, d.get("settings", {}))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "PreferenceModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read(), str(path))


def _encode(obj):
    return list(obj) if isinstance(obj, tuple) else obj


def _decode(kind, obj):
    if kind == "rule":
        return obj
    return tuple(obj)
