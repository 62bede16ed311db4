"""Run configuration: a ``key = value`` text file with command-line overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..errors import DataError


@dataclass
class Config:
    nbest: int = 5                      # hypotheses kept per utterance for `select`
    eval_nbest: int = 10                # ... for `train` and `evaluate`
    repair: bool = True
    repair_penalty: float = 10.0
    repair_span_cap: int = 8
    fallback_general: bool = True
    max_trees: int = 20                 # analyses kept per hypothesis
    max_stacks: int = 20000
    threshold: int = 1                  # minimum pattern count for specialized rules
    alpha: float = 0.5
    ridge: float = 1e-6
    max_sweeps: int = 50
    phase2_delta: float = 0.1
    similarity_word_weight: float = 0.5
    crossfit_folds: int = 5             # 1 disables cross-fitting of object scores
    slt0: bool = False

    def replace(self, **kw) -> "Config":
        return dataclasses.replace(self, **kw)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {_fmt(getattr(self, f.name))}\n" for f in dataclasses.fields(self))


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _convert(name, typ, text):
    text = text.strip()
    try:
        if typ == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if typ == "int":
            return int(text)
        if typ == "float":
            return float(text)
    except ValueError:
        raise DataError(f"config key {name!r}: bad {typ} value {text!r}") from None
    return text


_TYPES = {f.name: f.type if isinstance(f.type, str) else f.type.__name__
          for f in dataclasses.fields(Config)}


def apply_overrides(config: Config, pairs, source="<overrides>") -> Config:
    """Apply ``(key, value-text)`` pairs, rejecting unknown keys."""
    updates = {}
    for key, value in pairs:
        key = key.strip().replace("-", "_")
        if key not in _TYPES:
            raise DataError(f"{source}: unknown config key {key!r}")
        updates[key] = _convert(key, _TYPES[key], value)
    cfg = config.replace(**updates)
    validate(cfg)
    return cfg


def parse_config(text, source="<config>", base=None) -> Config:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DataError(f"{source}:{lineno}: expected 'key = value'")
        pairs.append((key, value))
    return apply_overrides(base or Config(), pairs, source)


def load_config(path) -> Config:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def validate(cfg: Config):
    if cfg.nbest < 1 or cfg.eval_nbest < 1:
        raise DataError("nbest limits must be at least 1")
    if cfg.repair_penalty <= 0:
        raise DataError("repair_penalty must be positive")
    if cfg.alpha <= 0:
        raise DataError("alpha must be positive")
    if cfg.ridge < 0 or cfg.threshold < 1 or cfg.max_trees < 1 or cfg.max_sweeps < 0 or cfg.crossfit_folds < 1:
        raise DataError("ridge, max_sweeps must be >= 0; threshold, max_trees, crossfit_folds >= 1")
    if not 0.0 <= cfg.similarity_word_weight <= 1.0:
        raise DataError("similarity_word_weight must lie in [0, 1]")
