"""Explanation scoring and the transferable-explanation protocol.

Fidelity is the macro-F1 agreement between a decision list's outputs and
the model predictions the feature rows are labeled with; complexity is
the number of non-default rules. Two pipelines share the same inducer
and report format and differ only in feature construction:

    saliency:  gradient-pooled skipgram importance, five levels
    frequency: presence/absence of the most document-frequent training
               skipgrams, two levels (absent 0, present ++)

Both follow the same protocol: vocabulary, thresholds, and rules are
fitted on training-split predictions, the pruning grid is tuned on
validation predictions, and the test split is touched exactly once, for
the final score.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus.generator import Corpus, Document
from .features import FeatureTable, build_feature_table
from .metrics import confusion_matrix, macro_f1
from .rnn.model import CLASS_NAMES, LstmModel
from .rnn.vocab import Vocab
from .rules import (
    CF_GRID,
    MIN_INSTANCES_GRID,
    DecisionList,
    induce_decision_list,
    tune_params,
)
from .saliency import document_saliency
from .skipgrams import (
    ABSENT,
    LEVELS,
    TOP_PER_DOC,
    SkipgramVocab,
    Thresholds,
    enumerate_skipgrams,
    fit_discretizer,
    score_skipgrams,
    select_document_top,
    select_global_vocab,
)

SPLITS = ("train", "valid", "test")
FEATURE_KINDS = ("saliency", "frequency")
PRESENT = LEVELS.index("++")
DEFAULT_VOCAB_LIMIT = 500


def fidelity(decision_list: DecisionList, table: FeatureTable) -> float:
    """Macro-F1 of the list's outputs against the table's row labels
    (model predictions). A class absent from both sides scores 1."""
    return macro_f1(table.labels, decision_list.classify_table(table), CLASS_NAMES)


def complexity(decision_list: DecisionList) -> int:
    """Number of non-default rules."""
    return len(decision_list.rules)


def rule_coverage(decision_list: DecisionList, table: FeatureTable) -> list[int]:
    """First-match row count per rule; the last entry is the default's."""
    missing = {
        t.key for rule in decision_list.rules for t in rule.tests
    } - set(table.keys)
    if missing:
        raise ValueError(f"table lacks rule columns: {sorted(missing)[:3]}")
    index = {k: i for i, k in enumerate(table.keys)}
    counts = [0] * (len(decision_list.rules) + 1)
    for row in table.levels:
        for i, rule in enumerate(decision_list.rules):
            if rule.matches(row, index):
                counts[i] += 1
                break
        else:
            counts[-1] += 1
    return counts


@dataclass
class FidelityReport:
    kind: str  # feature construction, one of FEATURE_KINDS
    fidelity: dict[str, float]  # per split
    complexity: int  # non-default rules
    rule_count: int  # list lines including the default
    coverage: list[int]  # test-split first-match counts, default last
    confusion: dict  # (model class, list class) -> test-split count

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        for split, value in self.fidelity.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{split} fidelity {value} outside [0, 1]")
        if self.rule_count < 1:
            raise ValueError("rule count must include the default rule")
        if self.rule_count != self.complexity + 1:
            raise ValueError("rule count must be complexity plus the default")


@dataclass
class ExplanationRun:
    """Everything a protocol run fits plus its scores, ready to persist."""

    kind: str
    sg_vocab: SkipgramVocab
    thresholds: Thresholds | None  # None for the frequency pipeline
    tables: dict[str, FeatureTable]
    decision_list: DecisionList
    report: FidelityReport


# --------------------------------------------------------- saliency features
def fit_importance_features(
    model: LstmModel,
    vocab: Vocab,
    train_docs: list[Document],
    method: str = "dot",
    top_per_doc: int = TOP_PER_DOC,
    vocab_limit: int = DEFAULT_VOCAB_LIMIT,
) -> tuple[SkipgramVocab, Thresholds]:
    """Skipgram vocabulary and discretization thresholds from the
    training split: per-document top-k by |score| feed both the global
    vocabulary and the per-sign median thresholds."""
    retained_lists = []
    for document in train_docs:
        saliency = document_saliency(model, vocab, document, method)
        scored = score_skipgrams(
            enumerate_skipgrams(document.flat_tokens()), saliency.scores
        )
        retained_lists.append(select_document_top(scored, top_per_doc))
    sg_vocab = select_global_vocab(retained_lists, vocab_limit)
    thresholds = fit_discretizer(
        [item.score for retained in retained_lists for item in retained]
    )
    return sg_vocab, thresholds


# -------------------------------------------------------- frequency features
def frequency_vocab(train_docs: list[Document], limit: int) -> SkipgramVocab:
    """The `limit` skipgrams contained in the most training documents;
    the weight of a key is its document count, ties lexicographic."""
    doc_freq: dict[str, int] = {}
    for document in train_docs:
        keys = {sg.key for sg in enumerate_skipgrams(document.flat_tokens())}
        for key in keys:
            doc_freq[key] = doc_freq.get(key, 0) + 1
    order = sorted(doc_freq, key=lambda k: (-doc_freq[k], k))[:limit]
    return SkipgramVocab(order, {k: float(doc_freq[k]) for k in order})


def frequency_feature_table(
    documents,
    model: LstmModel,
    vocab: Vocab,
    sg_vocab: SkipgramVocab,
    threads: int = 1,
) -> FeatureTable:
    """Binary presence table: only the absent (0) and present (++) levels
    occur; rows are labeled with model predictions, no gradients used."""

    def work(document: Document) -> tuple[str, np.ndarray]:
        label = CLASS_NAMES[model.predict(vocab.encode(document))]
        codes = np.full(len(sg_vocab), ABSENT, dtype=np.uint8)
        for sg in enumerate_skipgrams(document.flat_tokens()):
            col = sg_vocab.index.get(sg.key)
            if col is not None:
                codes[col] = PRESENT
        return label, codes

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, documents))
    else:
        rows = [work(d) for d in documents]
    levels = (
        np.stack([codes for _, codes in rows])
        if rows
        else np.zeros((0, len(sg_vocab)), dtype=np.uint8)
    )
    return FeatureTable(
        keys=sg_vocab.keys,
        doc_ids=[d.id for d in documents],
        labels=[label for label, _ in rows],
        levels=levels,
    )


# --------------------------------------------------------------- the protocol
def run_protocol(
    model: LstmModel,
    vocab: Vocab,
    corpus: Corpus,
    kind: str = "saliency",
    method: str = "dot",
    top_per_doc: int = TOP_PER_DOC,
    vocab_limit: int = DEFAULT_VOCAB_LIMIT,
    cf_grid=CF_GRID,
    min_instances_grid=MIN_INSTANCES_GRID,
    threads: int = 1,
) -> ExplanationRun:
    """Fit on train predictions, tune on valid predictions, score once
    on test predictions."""
    if kind not in FEATURE_KINDS:
        raise ValueError(f"unknown feature kind {kind!r}")
    splits = {name: corpus.split_docs(name) for name in SPLITS}
    for name in SPLITS:
        if not splits[name]:
            raise ValueError(f"corpus has no {name} split")
    test_ids = {d.id for d in splits["test"]}
    fitting_ids = {d.id for d in splits["train"]} | {d.id for d in splits["valid"]}
    assert not test_ids & fitting_ids, (
        f"split leakage: test ids seen during fitting: "
        f"{sorted(test_ids & fitting_ids)[:3]}"
    )

    if kind == "saliency":
        sg_vocab, thresholds = fit_importance_features(
            model, vocab, splits["train"], method, top_per_doc, vocab_limit
        )
        tables = {
            name: build_feature_table(
                docs, model, vocab, sg_vocab, thresholds, method, threads
            )
            for name, docs in splits.items()
        }
    else:
        sg_vocab = frequency_vocab(splits["train"], vocab_limit)
        thresholds = None
        tables = {
            name: frequency_feature_table(docs, model, vocab, sg_vocab, threads)
            for name, docs in splits.items()
        }

    params = tune_params(
        tables["train"], tables["valid"], cf_grid, min_instances_grid
    )
    decision_list = induce_decision_list(tables["train"], params)
    report = score_run(kind, decision_list, tables)
    return ExplanationRun(
        kind=kind,
        sg_vocab=sg_vocab,
        thresholds=thresholds,
        tables=tables,
        decision_list=decision_list,
        report=report,
    )


def score_run(
    kind: str, decision_list: DecisionList, tables: dict[str, FeatureTable]
) -> FidelityReport:
    test_table = tables["test"]
    return FidelityReport(
        kind=kind,
        fidelity={name: fidelity(decision_list, tables[name]) for name in SPLITS},
        complexity=complexity(decision_list),
        rule_count=complexity(decision_list) + 1,
        coverage=rule_coverage(decision_list, test_table),
        confusion=confusion_matrix(
            test_table.labels,
            decision_list.classify_table(test_table),
            CLASS_NAMES,
        ),
    )


# ------------------------------------------------------------------- reports
def render_report(
    report: FidelityReport,
    model_info: dict,
    explanation_info: dict,
    provenance: dict,
) -> str:
    """Key-value report with a stable section and key order. `model_info`
    and `provenance` are rendered verbatim; `explanation_info` must
    contain the rule file path under the key `rule_file`."""
    if "rule_file" not in explanation_info:
        raise ValueError("explanation_info must name the rule_file")
    lines = ["[model]"]
    lines.extend(f"{key} = {value}" for key, value in model_info.items())
    lines.append("")
    lines.append("[explanation]")
    lines.append(f"features = {report.kind}")
    lines.extend(f"{key} = {value}" for key, value in explanation_info.items())
    lines.append("")
    lines.append("[fidelity]")
    for split in SPLITS:
        lines.append(f"{split} = {report.fidelity[split]:.6f}")
    for model_class in CLASS_NAMES:
        for list_class in CLASS_NAMES:
            count = report.confusion[(model_class, list_class)]
            lines.append(
                f"test_confusion_{model_class}_as_{list_class} = {count}"
            )
    lines.append("")
    lines.append("[complexity]")
    lines.append(f"rules = {report.complexity}")
    lines.append(f"rule_lines = {report.rule_count}")
    for i, count in enumerate(report.coverage[:-1], start=1):
        lines.append(f"rule_{i}_test_coverage = {count}")
    lines.append(f"default_test_coverage = {report.coverage[-1]}")
    lines.append("")
    lines.append("[provenance]")
    lines.extend(f"{key} = {value}" for key, value in provenance.items())
    return "\n".join(lines) + "\n"


def save_report(text: str, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def parse_report(text: str) -> dict[str, dict[str, str]]:
    """Sections to key-value maps; values stay strings."""
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1], {})
            continue
        if current is None or " = " not in line:
            raise ValueError(f"line {line_no}: not a section or key-value line")
        key, value = line.split(" = ", 1)
        current[key] = value
    return sections
