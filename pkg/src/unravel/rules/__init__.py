"""PART rule induction over discretized skipgram features."""

from .io import (
    RuleFormatError,
    load_decision_list,
    parse_decision_list,
    render_decision_list,
    save_decision_list,
)
from .part import (
    CF_GRID,
    MIN_INSTANCES_GRID,
    DecisionList,
    InductionError,
    Rule,
    Test,
    extract_rule,
    induce_decision_list,
    tune_params,
)
from .tree import InductionParams, Leaf, PartialTree, add_errs, build_partial_tree

__all__ = [
    "CF_GRID",
    "DecisionList",
    "InductionError",
    "InductionParams",
    "Leaf",
    "MIN_INSTANCES_GRID",
    "PartialTree",
    "Rule",
    "RuleFormatError",
    "Test",
    "add_errs",
    "build_partial_tree",
    "extract_rule",
    "induce_decision_list",
    "load_decision_list",
    "parse_decision_list",
    "render_decision_list",
    "save_decision_list",
    "tune_params",
]
