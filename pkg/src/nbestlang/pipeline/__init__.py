from .config import Config, load_config, parse_config
from .core import (EvalReport, GrammarBundle, SelectionResult, build_bundle, evaluate,
                   run_utterance, specialize_command, train_pipeline)
from .corpus import CorpusSpec, generate_corpus, sample_trees
from .io import Reference, Utterance, load_corpus, parse_nbest, parse_references

__all__ = [
    "Config", "CorpusSpec", "EvalReport", "GrammarBundle", "Reference", "SelectionResult",
    "Utterance", "build_bundle", "evaluate", "generate_corpus", "load_config", "load_corpus",
    "parse_config", "parse_nbest", "parse_references", "run_utterance", "sample_trees",
    "specialize_command", "train_pipeline",
]
