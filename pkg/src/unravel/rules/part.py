"""PART decision lists: repeatedly extract the best leaf of a partial
C4.5 tree, keep it as a rule, and recurse on the uncovered instances.

The extracted rule is the expanded leaf covering the most instances
(ties: higher accuracy a/b, then fewer tests, then the lexicographically
smallest rendered conjunction). A rule with an empty conjunction would
match everything, so its class becomes the default and induction stops;
if the residual empties out exactly, the default falls back to the
global training majority.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureTable
from ..metrics import macro_f1
from ..skipgrams import LEVELS
from .tree import InductionParams, Leaf, PartialTree, build_partial_tree

CF_GRID = (0.1, 0.25, 0.5)
MIN_INSTANCES_GRID = (2, 5, 10, 25)


@dataclass(frozen=True)
class Test:
    key: str
    level: int  # code into LEVELS

    def render(self) -> str:
        return f"{self.key}={LEVELS[self.level]}"


@dataclass(frozen=True)
class Rule:
    tests: tuple[Test, ...]
    consequent: str
    a: int
    b: int

    def __post_init__(self):
        if not (1 <= self.a <= self.b):
            raise ValueError("rule coverage must satisfy 1 ≤ a ≤ b")
        keys = [t.key for t in self.tests]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate skipgram key in one conjunction")

    def matches(self, codes: np.ndarray, key_index: dict) -> bool:
        return all(codes[key_index[t.key]] == t.level for t in self.tests)


@dataclass
class DecisionList:
    rules: list[Rule]
    default: str
    params: InductionParams
    keys: tuple[str, ...] = ()
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self._index:
            self._index = {k: i for i, k in enumerate(self.keys)}

    def classify(self, codes: np.ndarray) -> str:
        for rule in self.rules:
            if rule.matches(codes, self._index):
                return rule.consequent
        return self.default

    def classify_table(self, table: FeatureTable) -> list[str]:
        if table.keys != self.keys:
            missing = {t.key for r in self.rules for t in r.tests} - set(table.keys)
            if missing:
                raise ValueError(f"table lacks rule columns: {sorted(missing)[:3]}")
            index = {k: i for i, k in enumerate(table.keys)}
            return [
                next(
                    (r.consequent for r in self.rules if r.matches(row, index)),
                    self.default,
                )
                for row in table.levels
            ]
        return [self.classify(row) for row in table.levels]


class InductionError(RuntimeError):
    pass


def extract_rule(tree: PartialTree, key_names) -> Rule:
    """Best expanded leaf as a rule: max coverage b, then higher a/b,
    then fewer tests, then lexicographic rendering."""
    candidates = [leaf for leaf in tree.leaves if leaf.b >= 1]
    if not candidates:
        raise InductionError("partial tree has no expanded leaf with coverage")

    def sort_key(leaf: Leaf):
        rendered = tuple(
            (key_names[col], LEVELS[level]) for col, level in leaf.tests
        )
        return (-leaf.b, -(leaf.a / leaf.b), len(leaf.tests), rendered)

    best = min(candidates, key=sort_key)
    return Rule(
        tests=tuple(Test(key_names[col], level) for col, level in best.tests),
        consequent=best.label,
        a=best.a,
        b=best.b,
    )


def _global_majority(labels: list[str]) -> str:
    counts: dict[str, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    return min(counts, key=lambda c: (-counts[c], c))


def induce_decision_list(table: FeatureTable, params: InductionParams) -> DecisionList:
    if not table.labels:
        raise InductionError("cannot induce rules from an empty table")
    codes = table.levels
    labels = list(table.labels)
    keep = np.arange(len(labels))
    rules: list[Rule] = []
    default: str | None = None

    while len(keep) > 0:
        tree = build_partial_tree(
            codes[keep], [labels[i] for i in keep], table.keys, params
        )
        rule = extract_rule(tree, table.keys)
        if not rule.tests:
            # matches every residual instance: the leaf majority becomes
            # the default class and the residual is fully absorbed
            default = rule.consequent
            keep = keep[:0]
            break
        key_index = {k: i for i, k in enumerate(table.keys)}
        matched = np.asarray(
            [rule.matches(codes[i], key_index) for i in keep], dtype=bool
        )
        if not matched.any():
            raise InductionError(
                f"extracted rule matches no residual instance: {rule}"
            )
        rules.append(rule)
        keep = keep[~matched]

    if default is None:
        default = _global_majority(list(table.labels))
    return DecisionList(rules=rules, default=default, params=params, keys=table.keys)


def tune_params(
    train_table: FeatureTable,
    valid_table: FeatureTable,
    cf_grid=CF_GRID,
    min_instances_grid=MIN_INSTANCES_GRID,
) -> InductionParams:
    """Grid search scored by validation macro-F1; ties prefer simpler
    lists (larger M, then larger CF)."""
    if train_table.keys != valid_table.keys:
        raise InductionError("train and validation tables must share columns")
    classes = tuple(sorted(set(train_table.labels) | set(valid_table.labels)))
    best = None
    for cf in cf_grid:
        for m in min_instances_grid:
            params = InductionParams(cf=cf, min_instances=m)
            decision_list = induce_decision_list(train_table, params)
            score = macro_f1(
                valid_table.labels, decision_list.classify_table(valid_table), classes
            )
            ranked = (score, m, cf)
            if best is None or ranked > best[0]:
                best = (ranked, params)
    return best[1]
