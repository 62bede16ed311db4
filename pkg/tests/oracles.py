"""Independent reference computations and frozen data shared by the tests."""

import json
import pathlib

DATA = pathlib.Path(__file__).parent / "data"

# Six ATIS-style self-repairs: (uttered, corrected reading).
REPAIRS = [
    ("list list flights between oakland and denver",
     "list flights between oakland and denver"),
    ("does this does this flight serve breakfast",
     "does this flight serve breakfast"),
    ("could i have more details on flight d l sixteen d l seven two six",
     "could i have more details on flight d l seven two six"),
    ("show me round trip fares for flight two sorry flight four four oh zero",
     "show me round trip fares for flight four four oh zero"),
    ("i want a flight from boston from denver to boston",
     "i want a flight from denver to boston"),
    ("ok what types of aircraft do does delta fly",
     "ok what types of aircraft does delta fly"),
]


def gauss_solve(A, b):
    """Plain Gauss-Jordan elimination with partial pivoting."""
    n = len(A)
    M = [list(map(float, row)) + [float(v)] for row, v in zip(A, b)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        M[c], M[p] = M[p], M[c]
        for r in range(n):
            if r != c:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def normal_equations(data, names, ridge=0.0):
    """Least-squares weights from (X^T X + ridge I) w = X^T t, without numpy."""
    rows = [[v[n] for n in names] for s in data for v, _ in s]
    t = [tv for s in data for _, tv in s]
    k = len(names)
    A = [[sum(r[i] * r[j] for r in rows) + (ridge if i == j else 0.0) for j in range(k)]
         for i in range(k)]
    b = [sum(r[i] * tv for r, tv in zip(rows, t)) for i in range(k)]
    return gauss_solve(A, b)


def load_separable():
    """``(names, phase1_data, phase2_items)`` for the frozen separable set.

    Phase 1 selects the marked candidate in 4 of 6 sentences; weights
    reaching 6 of 6 exist.
    """
    d = json.loads((DATA / "separable.json").read_text())
    names = tuple(d["names"])
    p1 = [[(c, t) for c, t in zip(s["candidates"], s["targets"])] for s in d["sentences"]]
    items = [(s["candidates"], s["correct"]) for s in d["sentences"]]
    return names, p1, items
