"""Partial-tree induction, PART extraction, decision lists, rule files."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from oracles import add_errs_reference, gain_ratio_argmax
from unravel.features import FeatureTable
from unravel.rules import (
    CF_GRID,
    MIN_INSTANCES_GRID,
    DecisionList,
    InductionError,
    InductionParams,
    Leaf,
    PartialTree,
    Rule,
    RuleFormatError,
    Test as RuleTest,
    add_errs,
    build_partial_tree,
    extract_rule,
    induce_decision_list,
    load_decision_list,
    parse_decision_list,
    render_decision_list,
    save_decision_list,
    tune_params,
)
from unravel.rules.part import _global_majority
from unravel.rules.tree import _Induction
from unravel.skipgrams import LEVELS

L = {name: code for code, name in enumerate(LEVELS)}
UNPRUNED = InductionParams(cf=1.0, min_instances=1)


def make_table(rows, labels, keys=None) -> FeatureTable:
    codes = np.asarray(rows, dtype=np.uint8)
    keys = tuple(keys) if keys else tuple(f"a{i}" for i in range(codes.shape[1]))
    return FeatureTable(
        keys=keys,
        doc_ids=[f"doc-{i}" for i in range(len(labels))],
        labels=list(labels),
        levels=codes,
    )


class TestAddErrs:
    def test_hand_value_zero_errors(self):
        """AddErrs(n=10, e=0, CF=0.25) = 10 (1 - 0.25^(1/10)) ~= 1.2945."""
        assert add_errs(10, 0, 0.25) == pytest.approx(1.29449, abs=1e-4)

    def test_cf_one_disables_estimate(self):
        assert add_errs(10, 3, 1.0) == 0.0

    def test_interpolation_below_one_error(self):
        v0 = add_errs(10, 0, 0.25)
        v1 = add_errs(10, 1, 0.25)
        assert add_errs(10, 0.5, 0.25) == pytest.approx((v0 + v1) / 2)

    def test_near_total_error_branch(self):
        assert add_errs(4, 3.6, 0.25) == pytest.approx(0.67 * 0.4)

    def test_matches_reference_on_grid(self):
        for n in (1, 2, 5, 10, 40, 100):
            for e in (0, 0.5, 1, 2, n // 2, max(n - 1, 0)):
                if e > n:
                    continue
                for cf in (0.1, 0.25, 0.5, 1.0):
                    assert add_errs(n, e, cf) == pytest.approx(
                        add_errs_reference(n, e, cf), abs=1e-9
                    ), (n, e, cf)

    def test_monotone_decreasing_in_cf(self):
        values = [add_errs(20, 4, cf) for cf in (0.1, 0.25, 0.5)]
        assert values[0] > values[1] > values[2] > 0


class TestInductionParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            InductionParams(cf=0.0)
        with pytest.raises(ValueError):
            InductionParams(cf=1.5)
        with pytest.raises(ValueError):
            InductionParams(min_instances=0)
        assert InductionParams(cf=1.0, min_instances=1) is not None


class TestBuildPartialTree:
    def test_pure_labels_single_leaf(self):
        table = make_table([[1], [2], [3]], ["x", "x", "x"])
        tree = build_partial_tree(table.levels, table.labels, table.keys, UNPRUNED)
        assert tree.root_collapsed
        assert len(tree.leaves) == 1
        assert tree.leaves[0] == Leaf(tests=(), label="x", a=3, b=3)

    def test_below_min_instances_majority_leaf(self):
        table = make_table([[1], [2], [2]], ["x", "y", "x"])
        params = InductionParams(cf=1.0, min_instances=5)
        tree = build_partial_tree(table.levels, table.labels, table.keys, params)
        assert tree.root_collapsed
        assert tree.leaves[0] == Leaf(tests=(), label="x", a=2, b=3)

    def test_majority_tie_is_lexicographic(self):
        table = make_table([[1], [2]], ["y", "x"])
        params = InductionParams(cf=1.0, min_instances=5)
        tree = build_partial_tree(table.levels, table.labels, table.keys, params)
        assert tree.leaves[0].label == "x"

    def test_zero_instances_rejected(self):
        with pytest.raises(ValueError, match="zero instances"):
            build_partial_tree(
                np.zeros((0, 1), dtype=np.uint8), [], ("a0",), UNPRUNED
            )

    def test_hand_crafted_gain_ratio_beats_info_gain(self):
        """Both attributes split perfectly; the binary one has lower split
        info, hence higher gain ratio, and must be chosen as root."""
        rows = [
            [0, 0], [1, 0], [2, 1], [3, 1],
            [0, 0], [1, 0], [2, 1], [3, 1],
        ]
        labels = ["A", "A", "B", "B", "A", "A", "B", "B"]
        table = make_table(rows, labels)
        tree = build_partial_tree(table.levels, table.labels, table.keys, UNPRUNED)
        assert not tree.root_collapsed
        root_cols = {leaf.tests[0][0] for leaf in tree.leaves}
        assert root_cols == {1}

    def test_xor_table_still_splits(self):
        """XOR: every single attribute has zero gain; the mean-positive-gain
        gate must fall back to zero so induction can proceed."""
        rows = [[0, 0], [0, 1], [1, 0], [1, 1]]
        labels = ["A", "B", "B", "A"]
        table = make_table(rows, labels)
        tree = build_partial_tree(table.levels, table.labels, table.keys, UNPRUNED)
        assert not tree.root_collapsed

    def test_children_expanded_in_entropy_order_partial_stop(self):
        """First expanded child that returns an internal node stops sibling
        expansion, so some subsets never become leaves."""
        # attr1 is balanced against the labels at the root (zero gain), so
        # the root must split on attr0:
        #   attr0=0 -> pure A (entropy 0, expanded first, leaf)
        #   attr0=1 -> mixed (entropy 1, level 1), attr1 resolves it ->
        #              internal child -> stops sibling expansion
        #   attr0=2 -> mixed (entropy 1, level 2), never expanded
        rows = [
            [0, 0], [0, 1],
            [1, 0], [1, 1],
            [2, 0], [2, 1],
        ]
        labels = ["A", "A", "A", "B", "B", "A"]
        table = make_table(rows, labels)
        tree = build_partial_tree(table.levels, table.labels, table.keys, UNPRUNED)
        assert not tree.root_collapsed
        assert tree.leaves == [
            Leaf(tests=((0, 0),), label="A", a=2, b=2),
            Leaf(tests=((0, 1), (1, 0)), label="A", a=1, b=1),
            Leaf(tests=((0, 1), (1, 1)), label="B", a=1, b=1),
        ]
        covered = sum(leaf.b for leaf in tree.leaves)
        assert covered < len(labels)  # attr0=2 subset left unexpanded

    def test_prunes_useless_subtree(self):
        # attr0 splits into two mixed halves whose majorities agree with
        # the root majority; at CF=1 the subtree adds no error reduction,
        # so the node collapses to a single leaf.
        rows = [[0], [0], [0], [1], [1], [1]]
        labels = ["A", "A", "B", "A", "A", "B"]
        table = make_table(rows, labels)
        tree = build_partial_tree(table.levels, table.labels, table.keys, UNPRUNED)
        assert tree.root_collapsed
        assert tree.leaves[0] == Leaf(tests=(), label="A", a=4, b=6)

    def test_split_choice_matches_oracle_randomized(self):
        """choose_split vs the independent gain-ratio oracle on random
        tables (the acceptance suite runs the exhaustive sweep)."""
        rng = np.random.default_rng(17)
        checked = 0
        for _ in range(300):
            n_attrs = int(rng.integers(1, 4))
            n_rows = int(rng.integers(2, 13))
            codes = rng.integers(0, 3, size=(n_rows, n_attrs)).astype(np.uint8)
            labels = ["AB"[i] for i in rng.integers(0, 2, size=n_rows)]
            keys = tuple(f"a{i}" for i in range(n_attrs))
            classes = tuple(sorted(set(labels)))
            to_idx = {c: i for i, c in enumerate(classes)}
            induction = _Induction(
                codes,
                np.asarray([to_idx[lab] for lab in labels], dtype=np.int64),
                keys,
                classes,
                UNPRUNED,
            )
            got = induction.choose_split(np.arange(n_rows), frozenset())
            rows = [tuple(int(v) for v in row) for row in codes]
            want = gain_ratio_argmax(rows, labels, list(range(n_attrs)))
            assert got == want, (rows, labels)
            checked += 1
        assert checked == 300


class TestExtractRule:
    def test_single_leaf_tree_empty_conjunction(self):
        tree = PartialTree(
            leaves=[Leaf(tests=(), label="x", a=4, b=5)], root_collapsed=True
        )
        rule = extract_rule(tree, ("a0",))
        assert rule.tests == ()
        assert (rule.a, rule.b) == (4, 5)

    def test_max_coverage_wins(self):
        tree = PartialTree(
            leaves=[
                Leaf(tests=((0, 1),), label="x", a=3, b=3),
                Leaf(tests=((0, 2),), label="y", a=8, b=10),
            ],
            root_collapsed=False,
        )
        assert extract_rule(tree, ("a0",)).consequent == "y"

    def test_coverage_tie_higher_accuracy_wins(self):
        tree = PartialTree(
            leaves=[
                Leaf(tests=((0, 1),), label="x", a=8, b=10),
                Leaf(tests=((0, 2),), label="y", a=10, b=10),
            ],
            root_collapsed=False,
        )
        assert extract_rule(tree, ("a0",)).consequent == "y"

    def test_accuracy_tie_fewer_tests_wins(self):
        tree = PartialTree(
            leaves=[
                Leaf(tests=((0, 1), (1, 2)), label="x", a=5, b=5),
                Leaf(tests=((0, 2),), label="y", a=5, b=5),
            ],
            root_collapsed=False,
        )
        assert extract_rule(tree, ("a0", "a1")).consequent == "y"

    def test_final_tie_lexicographic_rendering(self):
        tree = PartialTree(
            leaves=[
                Leaf(tests=((1, 1),), label="x", a=5, b=5),
                Leaf(tests=((0, 1),), label="y", a=5, b=5),
            ],
            root_collapsed=False,
        )
        assert extract_rule(tree, ("a0", "a1")).consequent == "y"

    def test_no_leaves_rejected(self):
        with pytest.raises(InductionError, match="no expanded leaf"):
            extract_rule(PartialTree(leaves=[], root_collapsed=False), ())


class TestRuleAndList:
    def test_rule_validation(self):
        with pytest.raises(ValueError, match="coverage"):
            Rule(tests=(), consequent="x", a=0, b=0)
        with pytest.raises(ValueError, match="coverage"):
            Rule(tests=(), consequent="x", a=5, b=4)
        with pytest.raises(ValueError, match="duplicate"):
            Rule(
                tests=(RuleTest("k", 1), RuleTest("k", 2)),
                consequent="x",
                a=1,
                b=1,
            )

    def test_first_match_order(self):
        dlist = DecisionList(
            rules=[
                Rule(tests=(RuleTest("a0", 1),), consequent="first", a=1, b=1),
                Rule(tests=(RuleTest("a0", 1),), consequent="third", a=1, b=1),
            ],
            default="fallback",
            params=UNPRUNED,
            keys=("a0",),
        )
        assert dlist.classify(np.array([1], dtype=np.uint8)) == "first"
        assert dlist.classify(np.array([2], dtype=np.uint8)) == "fallback"

    def test_all_zero_row_fires_all_absent_rule(self):
        keys = ("tachypnea", "meningitis", "no infection", "pneumonia", "fever")
        dlist = DecisionList(
            rules=[
                Rule(
                    tests=tuple(RuleTest(k, L["0"]) for k in keys),
                    consequent="non_septic",
                    a=9,
                    b=9,
                )
            ],
            default="septic",
            params=UNPRUNED,
            keys=keys,
        )
        row = np.full(5, L["0"], dtype=np.uint8)
        assert dlist.classify(row) == "non_septic"

    def test_classify_table_with_reordered_columns(self):
        dlist = DecisionList(
            rules=[Rule(tests=(RuleTest("b", L["+"]),), consequent="x", a=1, b=1)],
            default="y",
            params=UNPRUNED,
            keys=("a", "b"),
        )
        table = make_table(
            [[L["+"], L["0"]], [L["0"], L["+"]]], ["x", "y"], keys=("b", "a")
        )
        assert dlist.classify_table(table) == ["x", "y"]

    def test_classify_table_missing_rule_column_rejected(self):
        dlist = DecisionList(
            rules=[Rule(tests=(RuleTest("zz", 1),), consequent="x", a=1, b=1)],
            default="y",
            params=UNPRUNED,
            keys=("zz",),
        )
        table = make_table([[1]], ["x"], keys=("other",))
        with pytest.raises(ValueError, match="lacks rule columns"):
            dlist.classify_table(table)


class TestInduceDecisionList:
    def test_separable_feature(self):
        rows = [[L["++"]], [L["++"]], [L["0"]], [L["0"]], [L["0"]]]
        labels = ["septic", "septic", "non_septic", "non_septic", "non_septic"]
        table = make_table(rows, labels)
        dlist = induce_decision_list(table, UNPRUNED)
        assert dlist.classify_table(table) == labels
        assert len(dlist.rules) <= 2

    def test_empty_table_rejected(self):
        table = make_table(np.zeros((0, 1), dtype=np.uint8), [])
        with pytest.raises(InductionError, match="empty table"):
            induce_decision_list(table, UNPRUNED)

    def test_single_class_collapses_to_default(self):
        table = make_table([[1], [2]], ["x", "x"])
        dlist = induce_decision_list(table, UNPRUNED)
        assert dlist.rules == []
        assert dlist.default == "x"

    def test_coverage_audit(self):
        """Replaying the list over its training rows reproduces each
        rule's stored (a, b)."""
        rng = np.random.default_rng(23)
        rows = rng.integers(0, 5, size=(60, 4)).astype(np.uint8)
        labels = [
            "pos" if (r[0] == 1) or (r[1] >= 3 and r[2] != 0) else "neg"
            for r in rows
        ]
        table = make_table(rows, labels)
        for params in (UNPRUNED, InductionParams(cf=0.25, min_instances=2)):
            dlist = induce_decision_list(table, params)
            index = {k: i for i, k in enumerate(table.keys)}
            remaining = list(range(len(labels)))
            for rule in dlist.rules:
                hit = [i for i in remaining if rule.matches(rows[i], index)]
                assert len(hit) == rule.b
                assert sum(labels[i] == rule.consequent for i in hit) == rule.a
                remaining = [i for i in remaining if i not in set(hit)]

    def test_unpruned_fidelity_on_consistent_tables(self):
        rng = np.random.default_rng(29)
        for _ in range(40):
            n_rows = int(rng.integers(1, 21))
            rows = rng.integers(0, 3, size=(n_rows, 3)).astype(np.uint8)
            # deterministic labeling function => consistent by construction
            labels = [
                "A" if (int(r[0]) + 2 * int(r[1]) + int(r[2])) % 3 else "B"
                for r in rows
            ]
            table = make_table(rows, labels)
            dlist = induce_decision_list(table, UNPRUNED)
            assert dlist.classify_table(table) == labels

    def test_row_order_invariance(self):
        rng = np.random.default_rng(31)
        rows = rng.integers(0, 4, size=(40, 3)).astype(np.uint8)
        labels = ["pos" if r[0] >= 2 else "neg" for r in rows]
        table = make_table(rows, labels)
        base = induce_decision_list(table, InductionParams(cf=0.25, min_instances=2))
        perm = rng.permutation(40)
        shuffled = make_table(rows[perm], [labels[i] for i in perm])
        other = induce_decision_list(
            shuffled, InductionParams(cf=0.25, min_instances=2)
        )
        assert base.rules == other.rules
        assert base.default == other.default

    def test_pure_residual_becomes_default(self):
        # Perfectly separable: the larger class is extracted as a rule,
        # the residual is pure, so its empty-conjunction leaf supplies the
        # default instead of a second rule.
        rows = [[L["++"]], [L["++"]], [L["++"]], [L["0"]], [L["0"]]]
        labels = ["septic", "septic", "septic", "non_septic", "non_septic"]
        dlist = induce_decision_list(make_table(rows, labels), UNPRUNED)
        assert [r.consequent for r in dlist.rules] == ["septic"]
        assert dlist.rules[0].tests == (RuleTest("a0", L["++"]),)
        assert dlist.default == "non_septic"

    def test_global_majority_tie_breaks_lexicographically(self):
        assert _global_majority(["b", "a", "b", "a"]) == "a"
        assert _global_majority(["z", "z", "y"]) == "z"


class TestTuneParams:
    def test_single_point_grid(self):
        table = make_table([[1], [0]], ["x", "y"])
        params = tune_params(
            table, table, cf_grid=(0.25,), min_instances_grid=(5,)
        )
        assert params == InductionParams(cf=0.25, min_instances=5)

    def test_tie_prefers_larger_m_then_larger_cf(self):
        # One perfectly separating binary attribute: every grid point with
        # M <= n reaches perfect validation F1; the tie rule must pick the
        # largest M, then the largest CF.
        rows = [[L["++"]], [L["0"]]] * 20
        labels = ["septic", "non_septic"] * 20
        table = make_table(rows, labels)
        params = tune_params(table, table)
        assert params.min_instances == MIN_INSTANCES_GRID[-1]
        assert params.cf == CF_GRID[-1]

    def test_heavy_pruning_penalized(self):
        # 24 training rows: M=25 forces an immediate default-only list,
        # which scores worse on validation than any M <= 10 point.
        rows = [[L["++"]], [L["0"]]] * 12
        labels = ["septic", "non_septic"] * 12
        train = make_table(rows, labels)
        valid = make_table(rows[:6], labels[:6])
        params = tune_params(train, valid)
        assert params.min_instances == 10

    def test_mismatched_columns_rejected(self):
        t1 = make_table([[1]], ["x"], keys=("a",))
        t2 = make_table([[1]], ["x"], keys=("b",))
        with pytest.raises(InductionError, match="share columns"):
            tune_params(t1, t2)

    def test_grid_matches_contract(self):
        assert CF_GRID == (0.1, 0.25, 0.5)
        assert MIN_INSTANCES_GRID == (2, 5, 10, 25)


class TestRuleFiles:
    @staticmethod
    def _list() -> DecisionList:
        return DecisionList(
            rules=[
                Rule(
                    tests=(
                        RuleTest("no infection", L["--"]),
                        RuleTest("pneumonia", L["0"]),
                    ),
                    consequent="non_septic",
                    a=41,
                    b=44,
                ),
                Rule(tests=(RuleTest("pneumonia", L["++"]),), consequent="septic", a=9, b=9),
            ],
            default="septic",
            params=InductionParams(),
            keys=("no infection", "pneumonia"),
        )

    def test_rendering(self):
        text = render_decision_list(self._list())
        assert text == (
            'IF "no infection"=-- AND "pneumonia"=0 THEN non_septic (41/44)\n'
            'IF "pneumonia"=++ THEN septic (9/9)\n'
            "DEFAULT septic\n"
        )

    def test_round_trip_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "r1.rules", tmp_path / "r2.rules"
        save_decision_list(self._list(), str(p1))
        save_decision_list(load_decision_list(str(p1)), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_parse_recovers_structure(self):
        parsed = parse_decision_list(render_decision_list(self._list()))
        assert parsed.rules == self._list().rules
        assert parsed.default == "septic"

    def test_escaped_key_round_trip(self, tmp_path):
        tricky = DecisionList(
            rules=[
                Rule(
                    tests=(RuleTest('say "no" now', L["+"]),),
                    consequent="septic",
                    a=1,
                    b=2,
                )
            ],
            default="non_septic",
            params=InductionParams(),
            keys=('say "no" now',),
        )
        path = tmp_path / "tricky.rules"
        save_decision_list(tricky, str(path))
        loaded = load_decision_list(str(path))
        assert loaded.rules == tricky.rules
        save_decision_list(loaded, str(path) + ".2")
        assert (
            (tmp_path / "tricky.rules").read_bytes()
            == (tmp_path / "tricky.rules.2").read_bytes()
        )

    def test_missing_default_rejected(self):
        with pytest.raises(RuleFormatError, match="missing DEFAULT"):
            parse_decision_list('IF "k"=+ THEN x (1/1)\n')

    def test_content_after_default_rejected(self):
        with pytest.raises(RuleFormatError, match="content after DEFAULT"):
            parse_decision_list('DEFAULT x\nIF "k"=+ THEN y (1/1)\n')

    def test_unknown_level_rejected(self):
        with pytest.raises(RuleFormatError, match="unknown level"):
            parse_decision_list('IF "k"=+++ THEN x (1/1)\nDEFAULT x\n')

    def test_unparseable_line_reports_position(self):
        with pytest.raises(RuleFormatError, match="<string>:1"):
            parse_decision_list("WHENEVER k THEN x\nDEFAULT x\n")

    def test_unquoted_key_rejected(self):
        with pytest.raises(RuleFormatError, match="bad quoted key"):
            parse_decision_list("IF k=+ THEN x (1/1)\nDEFAULT x\n")
