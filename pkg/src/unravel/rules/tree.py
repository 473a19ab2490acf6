"""Partially expanded C4.5 decision trees over level-coded features.

`build_partial_tree` grows a multiway tree the way the PART rule
learner needs it: the split attribute maximizes gain ratio among
attributes whose information gain reaches the mean positive gain;
children are expanded in order of increasing label entropy; once a
child comes back as an internal node, the remaining siblings stay
unexpanded; when every child is a leaf, the node collapses to a leaf if
its pessimistic error estimate does not exceed the subtree's sum.

Error estimates use the C4.5 upper confidence bound on the binomial
error ("AddErrs"): the extra errors added to the observed count `e` out
of `n` at confidence factor CF. CF ≥ 1 turns the estimate off (zero
added errors), which disables pruning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from ..skipgrams import LEVELS

N_LEVELS = len(LEVELS)


@dataclass(frozen=True)
class InductionParams:
    cf: float = 0.25
    min_instances: int = 2

    def __post_init__(self):
        if not 0.0 < self.cf <= 1.0:
            raise ValueError("confidence factor must be in (0, 1]")
        if self.min_instances < 1:
            raise ValueError("min instances per leaf must be ≥ 1")


@dataclass(frozen=True)
class Leaf:
    """An expanded leaf: its root-to-leaf tests and training coverage."""

    tests: tuple[tuple[int, int], ...]  # (column, level code) conjunction
    label: str
    a: int  # instances of the majority label
    b: int  # all instances at the leaf


@dataclass
class PartialTree:
    leaves: list[Leaf]
    root_collapsed: bool  # the whole tree reduced to a single leaf


def add_errs(n: float, e: float, cf: float) -> float:
    """C4.5 pessimistic additional error count for e errors in n."""
    if cf >= 1.0:
        return 0.0
    if e < 1e-9:
        return n * (1.0 - cf ** (1.0 / n))
    if e < 1.0 - 1e-9:
        v0 = n * (1.0 - cf ** (1.0 / n))
        return v0 + e * (add_errs(n, 1.0, cf) - v0)
    if e + 0.5 >= n:
        return 0.67 * (n - e)
    z = NormalDist().inv_cdf(1.0 - cf)
    f = (e + 0.5) / n
    pr = (
        f
        + z * z / (2.0 * n)
        + z * math.sqrt(f / n - f * f / n + z * z / (4.0 * n * n))
    ) / (1.0 + z * z / n)
    return pr * n - e


def _entropy_from_counts(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


class _Induction:
    """One tree construction over an instance subset of a coded table."""

    def __init__(self, codes, label_idx, key_names, class_names, params):
        self.codes = codes  # (n, k) uint8
        self.labels = label_idx  # (n,) int
        self.keys = key_names
        self.classes = class_names
        self.params = params

    def label_counts(self, idx: np.ndarray) -> np.ndarray:
        return np.bincount(self.labels[idx], minlength=len(self.classes))

    def majority(self, counts: np.ndarray) -> tuple[int, int]:
        """(class index, count); ties to the lexicographically first name."""
        best = int(np.argmax(counts))  # class_names are sorted, so argmax
        return best, int(counts[best])  # at the first max is the tie rule

    def leaf_estimate(self, b: int, a: int) -> float:
        e = b - a
        return e + add_errs(b, e, self.params.cf)

    def choose_split(self, idx: np.ndarray, used: frozenset) -> int | None:
        counts = self.label_counts(idx)
        base_entropy = _entropy_from_counts(counts)
        n = len(idx)
        gains: dict[int, float] = {}
        split_infos: dict[int, float] = {}
        for col in range(self.codes.shape[1]):
            if col in used:
                continue
            col_codes = self.codes[idx, col].astype(np.int64)
            joint = np.bincount(
                col_codes * len(self.classes) + self.labels[idx],
                minlength=N_LEVELS * len(self.classes),
            ).reshape(N_LEVELS, len(self.classes))
            subset_sizes = joint.sum(axis=1)
            nonempty = subset_sizes > 0
            if int(nonempty.sum()) < 2:
                continue
            remainder = sum(
                subset_sizes[v] / n * _entropy_from_counts(joint[v])
                for v in range(N_LEVELS)
                if nonempty[v]
            )
            gains[col] = base_entropy - remainder
            p = subset_sizes[nonempty] / n
            split_infos[col] = float(-(p * np.log2(p)).sum())
        if not gains:
            return None
        positive = [g for g in gains.values() if g > 1e-12]
        threshold = sum(positive) / len(positive) if positive else 0.0
        best_col = None
        best_ratio = -math.inf
        for col, gain in gains.items():
            if gain < threshold - 1e-12:
                continue
            ratio = gain / split_infos[col]
            if ratio > best_ratio + 1e-12:
                best_col, best_ratio = col, ratio
            elif abs(ratio - best_ratio) <= 1e-12 and (
                best_col is None or self.keys[col] < self.keys[best_col]
            ):
                best_col = col
        return best_col

    def expand(
        self, idx: np.ndarray, tests: tuple, used: frozenset, out: list[Leaf]
    ) -> tuple[bool, float]:
        """Expand one node; append its expanded leaves to `out`.

        Returns (node ended as a leaf, pessimistic error of what was
        appended)."""
        counts = self.label_counts(idx)
        cls, a = self.majority(counts)
        b = len(idx)
        as_leaf_est = self.leaf_estimate(b, a)

        def make_leaf() -> tuple[bool, float]:
            out.append(Leaf(tests=tests, label=self.classes[cls], a=a, b=b))
            return True, as_leaf_est

        if a == b or b < self.params.min_instances:
            return make_leaf()
        col = self.choose_split(idx, used)
        if col is None:
            return make_leaf()

        col_codes = self.codes[idx, col]
        subsets = [idx[col_codes == level] for level in range(N_LEVELS)]
        order = sorted(
            (level for level in range(N_LEVELS) if len(subsets[level]) > 0),
            key=lambda level: (
                _entropy_from_counts(self.label_counts(subsets[level])),
                level,
            ),
        )

        child_used = used | {col}
        children_leaves: list[Leaf] = []
        subtree_est = 0.0
        all_leaves = True
        for level in order:
            is_leaf, est = self.expand(
                subsets[level], tests + ((col, level),), child_used, children_leaves
            )
            subtree_est += est
            if not is_leaf:
                all_leaves = False
                break

        if all_leaves and as_leaf_est <= subtree_est:
            # subtree replacement: discard the children, keep one leaf
            return make_leaf()
        out.extend(children_leaves)
        return False, subtree_est


def build_partial_tree(
    codes: np.ndarray,
    labels: list[str],
    key_names,
    params: InductionParams,
) -> PartialTree:
    if len(labels) == 0:
        raise ValueError("cannot build a tree from zero instances")
    if codes.shape[0] != len(labels):
        raise ValueError("feature rows and labels differ in length")
    class_names = tuple(sorted(set(labels)))
    name_to_idx = {name: i for i, name in enumerate(class_names)}
    label_idx = np.asarray([name_to_idx[lab] for lab in labels], dtype=np.int64)
    induction = _Induction(codes, label_idx, tuple(key_names), class_names, params)
    leaves: list[Leaf] = []
    root_is_leaf, _ = induction.expand(
        np.arange(len(labels)), tuple(), frozenset(), leaves
    )
    return PartialTree(leaves=leaves, root_collapsed=root_is_leaf)
