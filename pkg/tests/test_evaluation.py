"""Fidelity scoring, both explanation pipelines, and report files."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from unravel.corpus import Corpus, Document
from unravel.evaluation import (
    PRESENT,
    SPLITS,
    ExplanationRun,
    FidelityReport,
    complexity,
    fidelity,
    fit_importance_features,
    frequency_feature_table,
    frequency_vocab,
    parse_report,
    render_report,
    rule_coverage,
    run_protocol,
    score_run,
)
from unravel.features import FeatureTable
from unravel.rnn.model import CLASS_NAMES
from unravel.rules import DecisionList, InductionParams, Rule, Test as RuleTest
from unravel.rules.io import render_decision_list
from unravel.skipgrams import ABSENT, LEVELS

L = {name: code for code, name in enumerate(LEVELS)}


def make_table(rows, labels, keys=None) -> FeatureTable:
    codes = np.asarray(rows, dtype=np.uint8)
    keys = tuple(keys) if keys else tuple(f"a{i}" for i in range(codes.shape[1]))
    return FeatureTable(
        keys=keys,
        doc_ids=[f"doc-{i}" for i in range(len(labels))],
        labels=list(labels),
        levels=codes,
    )


def make_list(rules, default, keys) -> DecisionList:
    return DecisionList(
        rules=rules, default=default, params=InductionParams(), keys=tuple(keys)
    )


class TestFidelity:
    def test_perfect_agreement_is_one(self):
        table = make_table(
            [[L["++"]], [L["0"]], [L["++"]]],
            ["septic", "non_septic", "septic"],
        )
        dlist = make_list(
            [Rule(tests=(RuleTest("a0", L["++"]),), consequent="septic", a=2, b=2)],
            "non_septic",
            table.keys,
        )
        assert fidelity(dlist, table) == 1.0

    def test_all_one_class_on_even_split_is_one_third(self):
        """Defaulting to one class on a 50/50 prediction split: the hit
        class gets F1 2/3, the missed class 0, macro 1/3."""
        table = make_table(
            [[L["0"]]] * 4, ["septic", "septic", "non_septic", "non_septic"]
        )
        dlist = make_list([], "non_septic", table.keys)
        assert fidelity(dlist, table) == pytest.approx(1 / 3)

    def test_degenerate_single_class_table(self):
        """A class absent from both sides contributes F1 = 1."""
        table = make_table([[L["0"]], [L["0"]]], ["septic", "septic"])
        dlist = make_list([], "septic", table.keys)
        assert fidelity(dlist, table) == 1.0


class TestComplexity:
    def test_defaulted_list_is_zero(self):
        assert complexity(make_list([], "septic", ("a0",))) == 0

    def test_counts_non_default_rules(self):
        rules = [
            Rule(tests=(RuleTest("a0", L["++"]),), consequent="septic", a=1, b=1),
            Rule(tests=(RuleTest("a0", L["--"]),), consequent="non_septic", a=1, b=1),
        ]
        assert complexity(make_list(rules, "septic", ("a0",))) == 2


class TestRuleCoverage:
    def test_first_match_attribution(self):
        # row 0 matches both rules but is counted only for the first
        table = make_table(
            [[L["++"], L["+"]], [L["0"], L["+"]], [L["0"], L["0"]]],
            ["septic", "septic", "non_septic"],
        )
        rules = [
            Rule(tests=(RuleTest("a0", L["++"]),), consequent="septic", a=1, b=1),
            Rule(tests=(RuleTest("a1", L["+"]),), consequent="septic", a=2, b=2),
        ]
        dlist = make_list(rules, "non_septic", table.keys)
        assert rule_coverage(dlist, table) == [1, 1, 1]

    def test_counts_sum_to_rows(self):
        table = make_table([[L["0"]]] * 5, ["septic"] * 5)
        dlist = make_list([], "septic", table.keys)
        assert rule_coverage(dlist, table) == [5]

    def test_missing_rule_column_rejected(self):
        table = make_table([[L["0"]]], ["septic"], keys=("other",))
        dlist = make_list(
            [Rule(tests=(RuleTest("a0", L["+"]),), consequent="septic", a=1, b=1)],
            "septic",
            ("a0",),
        )
        with pytest.raises(ValueError, match="lacks rule columns"):
            rule_coverage(dlist, table)


class TestFidelityReport:
    @staticmethod
    def _report(**overrides) -> FidelityReport:
        values = dict(
            kind="saliency",
            fidelity={"train": 1.0, "valid": 1.0, "test": 1.0},
            complexity=1,
            rule_count=2,
            coverage=[3, 1],
            confusion={
                (r, o): 0 for r in CLASS_NAMES for o in CLASS_NAMES
            },
        )
        values.update(overrides)
        return FidelityReport(**values)

    def test_valid_report_accepted(self):
        assert self._report().rule_count == 2

    def test_fidelity_range_checked(self):
        with pytest.raises(ValueError, match="outside"):
            self._report(fidelity={"train": 1.2, "valid": 1.0, "test": 1.0})

    def test_rule_count_includes_default(self):
        with pytest.raises(ValueError, match="default"):
            self._report(rule_count=0, complexity=0)
        with pytest.raises(ValueError, match="complexity plus"):
            self._report(rule_count=3)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            self._report(kind="magic")


def _doc(doc_id: str, *sentences, split=None, label=None) -> Document:
    return Document(
        id=doc_id,
        sentences=tuple(tuple(s) for s in sentences),
        label=label,
        split=split,
    )


class TestFrequencyVocab:
    def test_document_frequency_ranking(self):
        docs = [
            _doc("d1", ["x"]),
            _doc("d2", ["x"]),
            _doc("d3", ["x"]),
            _doc("d4", ["y"]),
            _doc("d5", ["y"]),
            _doc("d6", ["z"]),
        ]
        vocab = frequency_vocab(docs, limit=2)
        assert vocab.keys == ("x", "y")
        assert vocab.weights == {"x": 3.0, "y": 2.0}

    def test_repeats_within_document_count_once(self):
        vocab = frequency_vocab([_doc("d1", ["x", "x"])], limit=10)
        assert vocab.weights["x"] == 1.0
        assert vocab.weights["x x"] == 1.0

    def test_ties_break_lexicographically(self):
        vocab = frequency_vocab([_doc("d1", ["b"]), _doc("d2", ["a"])], limit=2)
        assert vocab.keys == ("a", "b")


class TestFrequencyFeatureTable:
    def test_binary_levels_and_predicted_labels(self, small_corpus, small_model_vocab):
        model, vocab = small_model_vocab
        docs = small_corpus.split_docs("test")[:6]
        sg_vocab = frequency_vocab(docs, limit=40)
        table = frequency_feature_table(docs, model, vocab, sg_vocab)
        assert set(np.unique(table.levels)) <= {ABSENT, PRESENT}
        assert table.labels == [
            CLASS_NAMES[model.predict(vocab.encode(d))] for d in docs
        ]
        assert table.keys == sg_vocab.keys

    def test_out_of_vocab_document_is_all_absent(self, small_model_vocab):
        model, vocab = small_model_vocab
        fit_docs = [_doc("d1", ["alpha", "beta"])]
        sg_vocab = frequency_vocab(fit_docs, limit=10)
        table = frequency_feature_table(
            [_doc("d2", ["gamma", "delta"])], model, vocab, sg_vocab
        )
        assert np.all(table.levels == ABSENT)

    def test_threaded_equals_serial(self, small_corpus, small_model_vocab):
        model, vocab = small_model_vocab
        docs = small_corpus.split_docs("valid")[:5]
        sg_vocab = frequency_vocab(docs, limit=30)
        serial = frequency_feature_table(docs, model, vocab, sg_vocab, threads=1)
        threaded = frequency_feature_table(docs, model, vocab, sg_vocab, threads=4)
        assert serial == threaded


@pytest.fixture(scope="session")
def saliency_run(small_corpus, small_model_vocab) -> ExplanationRun:
    model, vocab = small_model_vocab
    return run_protocol(model, vocab, small_corpus, kind="saliency", vocab_limit=150)


@pytest.fixture(scope="session")
def frequency_run(small_corpus, small_model_vocab) -> ExplanationRun:
    model, vocab = small_model_vocab
    return run_protocol(model, vocab, small_corpus, kind="frequency", vocab_limit=150)


class TestRunProtocol:
    def test_unknown_kind_rejected(self, small_corpus, small_model_vocab):
        model, vocab = small_model_vocab
        with pytest.raises(ValueError, match="feature kind"):
            run_protocol(model, vocab, small_corpus, kind="magic")

    def test_missing_split_rejected(self, small_corpus, small_model_vocab):
        model, vocab = small_model_vocab
        crippled = Corpus(
            documents=[d for d in small_corpus.documents if d.split != "valid"],
            generation_seed=small_corpus.generation_seed,
            keyword_sets=small_corpus.keyword_sets,
        )
        with pytest.raises(ValueError, match="no valid split"):
            run_protocol(model, vocab, crippled)

    def test_split_leakage_asserts(self, small_corpus, small_model_vocab):
        model, vocab = small_model_vocab
        train_id = small_corpus.split_docs("train")[0].id
        leaked = []
        planted = False
        for doc in small_corpus.documents:
            if doc.split == "test" and not planted:
                leaked.append(replace(doc, id=train_id))
                planted = True
            else:
                leaked.append(doc)
        corpus = Corpus(
            documents=leaked,
            generation_seed=small_corpus.generation_seed,
            keyword_sets=small_corpus.keyword_sets,
        )
        with pytest.raises(AssertionError, match="split leakage"):
            run_protocol(model, vocab, corpus)

    @pytest.mark.parametrize("kind", ["saliency", "frequency"])
    def test_report_shape(self, kind, saliency_run, frequency_run, small_corpus):
        run = saliency_run if kind == "saliency" else frequency_run
        n_test = len(small_corpus.split_docs("test"))
        report = run.report
        assert report.kind == kind
        assert set(report.fidelity) == set(SPLITS)
        assert report.complexity == len(run.decision_list.rules)
        assert report.rule_count == report.complexity + 1
        assert sum(report.coverage) == n_test
        assert sum(report.confusion.values()) == n_test

    def test_tables_share_columns_and_predict_labels(self, saliency_run):
        keys = {saliency_run.tables[split].keys for split in SPLITS}
        assert len(keys) == 1
        for split in SPLITS:
            assert set(saliency_run.tables[split].labels) <= set(CLASS_NAMES)

    def test_frequency_tables_are_binary(self, frequency_run):
        for split in SPLITS:
            codes = set(np.unique(frequency_run.tables[split].levels))
            assert codes <= {ABSENT, PRESENT}
        assert frequency_run.thresholds is None

    def test_scores_match_recomputation(self, saliency_run):
        assert saliency_run.report.fidelity == score_run(
            "saliency", saliency_run.decision_list, saliency_run.tables
        ).fidelity

    def test_test_labels_never_influence_rules(
        self, small_corpus, small_model_vocab, saliency_run
    ):
        """Garbage test-split corpus labels must leave vocabulary,
        thresholds, and the rule file unchanged."""
        model, vocab = small_model_vocab
        garbled = Corpus(
            documents=[
                replace(d, label="garbage-label") if d.split == "test" else d
                for d in small_corpus.documents
            ],
            generation_seed=small_corpus.generation_seed,
            keyword_sets=small_corpus.keyword_sets,
        )
        rerun = run_protocol(model, vocab, garbled, kind="saliency", vocab_limit=150)
        assert rerun.sg_vocab == saliency_run.sg_vocab
        assert rerun.thresholds == saliency_run.thresholds
        assert render_decision_list(rerun.decision_list) == render_decision_list(
            saliency_run.decision_list
        )
        assert rerun.report.fidelity == saliency_run.report.fidelity

    def test_fit_importance_features_deterministic(
        self, small_corpus, small_model_vocab
    ):
        model, vocab = small_model_vocab
        docs = small_corpus.split_docs("valid")  # small, fast
        first = fit_importance_features(model, vocab, docs, vocab_limit=60)
        second = fit_importance_features(model, vocab, docs, vocab_limit=60)
        assert first[0] == second[0]
        assert first[1] == second[1]


class TestReportRendering:
    @staticmethod
    def _render(report=None) -> str:
        report = report or TestFidelityReport._report()
        return render_report(
            report,
            model_info={"checkpoint": "model.bin", "d_e": 100, "d_h": 50},
            explanation_info={
                "pooling": "dot",
                "vocab_limit": 500,
                "rule_file": "rules.txt",
            },
            provenance={"seed": 7, "package_version": "0.1.0"},
        )

    def test_sections_in_stable_order(self):
        text = self._render()
        positions = [
            text.index(f"[{name}]")
            for name in ("model", "explanation", "fidelity", "complexity", "provenance")
        ]
        assert positions == sorted(positions)

    def test_round_trips_through_parse(self):
        sections = parse_report(self._render())
        assert sections["model"]["d_h"] == "50"
        assert sections["explanation"]["features"] == "saliency"
        assert sections["explanation"]["rule_file"] == "rules.txt"
        assert sections["fidelity"]["test"] == "1.000000"
        assert sections["complexity"]["rules"] == "1"
        assert sections["complexity"]["rule_lines"] == "2"
        assert sections["complexity"]["rule_1_test_coverage"] == "3"
        assert sections["complexity"]["default_test_coverage"] == "1"
        assert sections["provenance"]["seed"] == "7"

    def test_rendering_is_deterministic(self):
        assert self._render() == self._render()

    def test_rule_file_key_required(self):
        with pytest.raises(ValueError, match="rule_file"):
            render_report(
                TestFidelityReport._report(),
                model_info={},
                explanation_info={"pooling": "dot"},
                provenance={},
            )

    def test_confusion_rendered_per_class_pair(self):
        report = TestFidelityReport._report(
            confusion={
                ("non_septic", "non_septic"): 5,
                ("non_septic", "septic"): 1,
                ("septic", "non_septic"): 2,
                ("septic", "septic"): 6,
            }
        )
        sections = parse_report(self._render(report))
        assert sections["fidelity"]["test_confusion_non_septic_as_septic"] == "1"
        assert sections["fidelity"]["test_confusion_septic_as_non_septic"] == "2"

    def test_parse_rejects_stray_lines(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_report("not a section\n")
