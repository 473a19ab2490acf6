"""Corpus serialization: one JSON object per line, metadata in a sidecar.

Line keys appear in the fixed order id, sentences, label, gold, split so
that a regenerated corpus is byte-identical. `gold` holds sorted
[sentence, token] index pairs. Generation metadata (seed, septic
fraction, label noise, split sizes) lives next to the corpus in
``<path>.meta`` so the data file itself stays pure.
"""

from __future__ import annotations

import json
import os

from .generator import Corpus, Document
from .keywords import KeywordSets

_REQUIRED_KEYS = ("id", "sentences", "label", "gold", "split")
_SPLITS = ("train", "valid", "test")


class CorpusFormatError(ValueError):
    def __init__(self, path: str, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


def document_to_record(doc: Document) -> dict:
    return {
        "id": doc.id,
        "sentences": [list(sent) for sent in doc.sentences],
        "label": doc.label,
        "gold": sorted([s, t] for s, t in doc.gold_terms),
        "split": doc.split,
    }


def save_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(json.dumps(document_to_record(doc), ensure_ascii=False))
            fh.write("\n")
    meta = dict(corpus.metadata)
    with open(path + ".meta", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_record(path: str, line_no: int, line: str) -> Document:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(path, line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(record, dict):
        raise CorpusFormatError(path, line_no, "line is not a JSON object")
    for key in _REQUIRED_KEYS:
        if key not in record:
            raise CorpusFormatError(path, line_no, f"missing key {key!r}")
    if not isinstance(record["id"], str) or not record["id"]:
        raise CorpusFormatError(path, line_no, "id must be a non-empty string")
    sentences = record["sentences"]
    if not isinstance(sentences, list) or not sentences:
        raise CorpusFormatError(path, line_no, "sentences must be a non-empty list")
    parsed_sentences = []
    for sent in sentences:
        if not isinstance(sent, list) or not all(
            isinstance(tok, str) and tok for tok in sent
        ):
            raise CorpusFormatError(
                path, line_no, "each sentence must be a list of non-empty strings"
            )
        parsed_sentences.append(tuple(sent))
    label = record["label"]
    if label not in ("septic", "non_septic"):
        raise CorpusFormatError(path, line_no, f"unknown label {label!r}")
    split = record["split"]
    if split not in _SPLITS:
        raise CorpusFormatError(path, line_no, f"unknown split {split!r}")
    gold = record["gold"]
    if not isinstance(gold, list):
        raise CorpusFormatError(path, line_no, "gold must be a list of index pairs")
    gold_pairs = set()
    for pair in gold:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, int) and v >= 0 for v in pair)
        ):
            raise CorpusFormatError(path, line_no, f"bad gold index pair {pair!r}")
        s, t = pair
        if s >= len(parsed_sentences) or t >= len(parsed_sentences[s]):
            raise CorpusFormatError(
                path, line_no, f"gold index [{s}, {t}] outside document"
            )
        gold_pairs.add((s, t))
    return Document(
        id=record["id"],
        sentences=tuple(parsed_sentences),
        label=label,
        gold_terms=frozenset(gold_pairs),
        split=split,
    )


def load_documents(path: str) -> list[Document]:
    documents = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                raise CorpusFormatError(path, line_no, "blank line")
            documents.append(_parse_record(path, line_no, line))
    if not documents:
        raise CorpusFormatError(path, 0, "corpus file is empty")
    return documents


def load_corpus(path: str) -> Corpus:
    documents = load_documents(path)
    metadata: dict = {}
    meta_path = path + ".meta"
    if os.path.exists(meta_path):
        with open(meta_path, "r", encoding="utf-8") as fh:
            metadata = json.load(fh)
    return Corpus(
        documents=documents,
        generation_seed=metadata.get("seed"),
        keyword_sets=KeywordSets(),
        metadata=metadata,
    )
