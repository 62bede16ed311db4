from .core import Constituent, Grammar, Rule, default_grammar, format_rule, parse_rule
from .featstruct import FeatureStructure, Var, unify
from .chart import parse_chart
from .trees import Leaf, Node, load_treebank, parse_bracket, realize, validate, words

__all__ = [
    "Constituent", "FeatureStructure", "Grammar", "Leaf", "Node", "Rule", "Var",
    "default_grammar", "format_rule", "load_treebank", "parse_bracket", "parse_chart",
    "parse_rule", "realize", "unify", "validate", "words",
]
