"""Exception classes shared across the package.

The CLI maps these onto exit codes: DataError -> 2, InternalError -> 3.
"""


class NBestLangError(Exception):
    pass


class DataError(NBestLangError):
    """Malformed or inconsistent input data (files, corpora, treebanks)."""


class InternalError(NBestLangError):
    """An internal invariant was violated."""
