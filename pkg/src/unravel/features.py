"""Discretized skipgram feature tables labeled with model predictions.

One row per document: the level code of every vocabulary skipgram plus
the class the model predicts for that document. Train/valid/test tables
share the identical column order because the vocabulary is frozen after
fitting on the training split.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus.generator import Document
from .rnn.model import CLASS_NAMES, LstmModel
from .rnn.vocab import Vocab
from .saliency import document_saliency
from .skipgrams import LEVELS, SkipgramVocab, Thresholds, document_levels


@dataclass
class FeatureTable:
    keys: tuple[str, ...]
    doc_ids: list[str]
    labels: list[str]  # model predictions, one of CLASS_NAMES
    levels: np.ndarray  # (n_docs, n_keys) uint8 level codes

    def __post_init__(self):
        if self.levels.shape != (len(self.doc_ids), len(self.keys)):
            raise ValueError("feature table shape mismatch")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FeatureTable)
            and self.keys == other.keys
            and self.doc_ids == other.doc_ids
            and self.labels == other.labels
            and np.array_equal(self.levels, other.levels)
        )


def document_row(
    document: Document,
    model: LstmModel,
    vocab: Vocab,
    sg_vocab: SkipgramVocab,
    thresholds: Thresholds,
    method: str,
) -> tuple[str, np.ndarray]:
    tokens = document.flat_tokens()
    saliency = document_saliency(model, vocab, document, method)
    label = CLASS_NAMES[saliency.target_class]
    codes = document_levels(tokens, saliency.scores, sg_vocab, thresholds)
    return label, codes


def build_feature_table(
    documents,
    model: LstmModel,
    vocab: Vocab,
    sg_vocab: SkipgramVocab,
    thresholds: Thresholds,
    method: str = "dot",
    threads: int = 1,
) -> FeatureTable:
    def work(document):
        return document_row(document, model, vocab, sg_vocab, thresholds, method)

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


def save_feature_table(table: FeatureTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(json.dumps(key) for key in table.keys))
        fh.write("\n")
        for doc_id, label, codes in zip(table.doc_ids, table.labels, table.levels):
            fields = [doc_id, label]
            fields.extend(LEVELS[c] for c in codes)
            fh.write("\t".join(fields))
            fh.write("\n")


class FeatureTableFormatError(ValueError):
    pass


def load_feature_table(path: str) -> FeatureTable:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header:
            raise FeatureTableFormatError(f"{path}: missing header line")
        try:
            keys = tuple(json.loads(part) for part in header.split("\t"))
        except json.JSONDecodeError as exc:
            raise FeatureTableFormatError(f"{path}: bad header: {exc}") from exc
        level_code = {level: i for i, level in enumerate(LEVELS)}
        doc_ids: list[str] = []
        labels: list[str] = []
        rows: list[list[int]] = []
        for line_no, line in enumerate(fh, start=2):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2 + len(keys):
                raise FeatureTableFormatError(
                    f"{path}:{line_no}: expected {2 + len(keys)} fields, "
                    f"got {len(fields)}"
                )
            if fields[1] not in CLASS_NAMES:
                raise FeatureTableFormatError(
                    f"{path}:{line_no}: unknown label {fields[1]!r}"
                )
            try:
                codes = [level_code[f] for f in fields[2:]]
            except KeyError as exc:
                raise FeatureTableFormatError(
                    f"{path}:{line_no}: unknown level {exc.args[0]!r}"
                ) from exc
            doc_ids.append(fields[0])
            labels.append(fields[1])
            rows.append(codes)
    levels = (
        np.asarray(rows, dtype=np.uint8)
        if rows
        else np.zeros((0, len(keys)), dtype=np.uint8)
    )
    return FeatureTable(keys=keys, doc_ids=doc_ids, labels=labels, levels=levels)
