"""Selecting among speech recognizer N-best hypotheses with a specialized
unification grammar, speech-repair expansion and trained preference scores."""

__version__ = "0.1.0"
