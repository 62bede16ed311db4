from .ebl import Chunk, Stub, collapse_chunk, cut_tree, expand_tree, glue, specialize_grammar
from .lr import LRTable, compile_lr, parse_lr

__all__ = [
    "Chunk", "LRTable", "Stub", "collapse_chunk", "compile_lr", "cut_tree",
    "expand_tree", "glue", "parse_lr", "specialize_grammar",
]
