"""Finite feature structures with rule-scoped variables.

Values are atoms (``str``), :class:`Var`, or nested :class:`FeatureStructure`.
A feature that is absent is unconstrained.
"""

from __future__ import annotations

from collections.abc import Mapping


class Var:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return hash(("Var", self.name))

    def __repr__(self):
        return self.name


class FeatureStructure(Mapping):
    """Immutable, hashable feature map."""

    __slots__ = ("_d", "_hash")

    def __init__(self, data=()):
        self._d = dict(data)
        self._hash = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._d.items(), key=lambda kv: kv[0])))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, FeatureStructure):
            return self._d == other._d
        return NotImplemented

    def __repr__(self):
        return format_fs(self)


EMPTY = FeatureStructure()


class _Fail:
    def __repr__(self):
        return "FAIL"


FAIL = _Fail()


def format_value(v) -> str:
    if isinstance(v, FeatureStructure):
        return format_fs(v)
    return str(v)


def format_fs(fs) -> str:
    return "[" + ",".join(f"{k}={format_value(fs[k])}" for k in sorted(fs)) + "]"


def _walk(v, env):
    last = None
    while isinstance(v, Var) and v in env:
        last = v
        v = env[v]
    return v, last


def _occurs(var, v, env):
    v, _ = _walk(v, env)
    if v == var:
        return True
    if isinstance(v, FeatureStructure):
        return any(_occurs(var, x, env) for x in v.values())
    return False


def unify_into(a, b, env: dict):
    """Unify two values, extending ``env`` in place.

    Returns the unified value or :data:`FAIL`. On failure ``env`` may be
    partially extended, so callers pass a copy when they need to back out.
    """
    a, la = _walk(a, env)
    b, lb = _walk(b, env)
    if isinstance(a, Var):
        if a == b:
            return a
        if _occurs(a, b, env):
            return FAIL
        env[a] = b
        return b
    if isinstance(b, Var):
        if _occurs(b, a, env):
            return FAIL
        env[b] = a
        return a
    if isinstance(a, FeatureStructure):
        if not isinstance(b, FeatureStructure):
            return FAIL
        merged = dict(a._d)
        for k, bv in b._d.items():
            if k in merged:
                r = unify_into(merged[k], bv, env)
                if r is FAIL:
                    return FAIL
                merged[k] = r
            else:
                merged[k] = bv
        out = FeatureStructure(merged)
        # a variable chain that ended in a partial structure now points at the merge
        if la is not None:
            env[la] = out
        if lb is not None:
            env[lb] = out
        return out
    if isinstance(b, FeatureStructure):
        return FAIL
    return a if a == b else FAIL


def resolve(v, env, drop_unbound=False):
    """Substitute bindings in ``v``.

    With ``drop_unbound`` features whose value is still an unbound variable are
    removed (an unbound variable constrains nothing on its own).
    """
    v, _ = _walk(v, env)
    if isinstance(v, FeatureStructure):
        out = {}
        for k, x in v._d.items():
            r = resolve(x, env, drop_unbound)
            if drop_unbound and isinstance(r, Var):
                continue
            out[k] = r
        return FeatureStructure(out)
    return v


def unify(a: FeatureStructure, b: FeatureStructure):
    """Most general unifier of two structures, or ``None`` on failure."""
    env: dict = {}
    r = unify_into(a, b, env)
    if r is FAIL:
        return None
    return resolve(r, env)


def variables(v, acc=None) -> list:
    """Variables in ``v`` in left-to-right (sorted-key) first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(v, Var):
        if v not in acc:
            acc.append(v)
    elif isinstance(v, FeatureStructure):
        for k in sorted(v):
            variables(v[k], acc)
    return acc


def rename(v, mapping):
    if isinstance(v, Var):
        return mapping.get(v, v)
    if isinstance(v, FeatureStructure):
        return FeatureStructure({k: rename(x, mapping) for k, x in v._d.items()})
    return v


def subsumes(general, specific) -> bool:
    """True if ``general`` is at most as informative as ``specific``.

    Variables in ``general`` may bind to anything in ``specific``; variables in
    ``specific`` are treated as constants.
    """
    env: dict = {}

    def match(g, s):
        if isinstance(g, Var):
            if g in env:
                return env[g] == s
            env[g] = s
            return True
        if isinstance(g, FeatureStructure):
            if not isinstance(s, FeatureStructure):
                return False
            return all(k in s and match(gv, s[k]) for k, gv in g._d.items())
        return g == s

    return match(general, specific)
