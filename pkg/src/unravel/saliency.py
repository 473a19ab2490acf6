"""Word-importance scores from input gradients, and their evaluation.

A document's gradient matrix (one row per token, d_e columns) is pooled
into one signed scalar per token three ways:

    l2:  Σ_dim grad²          (non-negative; the squared norm)
    sum: Σ_dim grad
    dot: Σ_dim emb ⊙ grad     (first-order score of erasing the word)

Scores are ranked by absolute value against the corpus' gold terms, and
rendered as standalone XHTML heatmaps (blue positive, red negative,
opacity proportional to |score| normalized per document).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .corpus.generator import Document
from .rnn.model import GradientMatrix

POOLING_METHODS = ("l2", "sum", "dot")

_POSITIVE_RGB = "59,76,192"  # blue
_NEGATIVE_RGB = "180,4,38"  # red


@dataclass
class SaliencyMap:
    doc_id: str
    scores: np.ndarray  # (T,) signed floats
    method: str
    target_class: int


def pool(
    grads: GradientMatrix, embs: np.ndarray, method: str, doc_id: str = ""
) -> SaliencyMap:
    values = grads.values
    if embs.shape != values.shape:
        raise ValueError(
            f"embeddings {embs.shape} do not match gradients {values.shape}"
        )
    if method == "l2":
        scores = np.sum(np.square(values, dtype=np.float64), axis=1)
    elif method == "sum":
        scores = np.sum(values, axis=1, dtype=np.float64)
    elif method == "dot":
        scores = np.sum(
            np.multiply(values, embs, dtype=np.float64), axis=1
        )
    else:
        raise ValueError(f"unknown pooling method {method!r}")
    if not np.all(np.isfinite(scores)):
        raise ValueError("non-finite saliency scores")
    return SaliencyMap(
        doc_id=doc_id,
        scores=scores,
        method=method,
        target_class=grads.target_class,
    )


def rank_positions(scores: np.ndarray) -> list[int]:
    """Positions by descending |score|; ties go to the earlier position."""
    return sorted(range(len(scores)), key=lambda t: (-abs(scores[t]), t))


def topk_gold_accuracy(saliency: SaliencyMap, gold: set) -> float:
    """|top-k by absolute score ∩ gold| / k with k = |gold|."""
    if not gold:
        raise ValueError("gold set is empty; caller must filter such documents")
    k = len(gold)
    top = set(rank_positions(saliency.scores)[:k])
    return len(top & gold) / k


def flatten_gold(document: Document) -> set:
    """Gold (sentence, token) pairs as positions into the concatenated
    token sequence, matching the encoder's sentence concatenation."""
    offsets = []
    total = 0
    for sent in document.sentences:
        offsets.append(total)
        total += len(sent)
    return {offsets[s] + t for s, t in document.gold_terms}


def document_saliency(model, vocab, document: Document, method: str) -> SaliencyMap:
    ids = vocab.encode(document)
    grads = model.input_gradients(ids)
    embs = model.params["E"][ids]
    return pool(grads, embs, method, doc_id=document.id)


def mean_gold_accuracy(model, vocab, documents, method: str) -> float:
    """Mean top-k gold accuracy over documents with non-empty gold sets."""
    accuracies = []
    for document in documents:
        gold = flatten_gold(document)
        if not gold:
            continue
        saliency = document_saliency(model, vocab, document, method)
        accuracies.append(topk_gold_accuracy(saliency, gold))
    if not accuracies:
        raise ValueError("no documents with gold terms")
    return float(np.mean(accuracies))


# ------------------------------------------------------------------ dumps
def save_saliency(maps: list[SaliencyMap], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in maps:
            record = {
                "doc_id": m.doc_id,
                "method": m.method,
                "target_class": m.target_class,
                "scores": [float(s) for s in m.scores],
            }
            fh.write(json.dumps(record))
            fh.write("\n")


def load_saliency(path: str) -> list[SaliencyMap]:
    maps = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            maps.append(
                SaliencyMap(
                    doc_id=record["doc_id"],
                    scores=np.asarray(record["scores"], dtype=np.float64),
                    method=record["method"],
                    target_class=int(record["target_class"]),
                )
            )
    return maps


# ---------------------------------------------------------------- heatmaps
def export_heatmap(saliency: SaliencyMap, document: Document) -> str:
    """Standalone XHTML with one paragraph per sentence; token background
    opacity is |score| / max |score| over the document."""
    scores = saliency.scores
    total_tokens = sum(len(s) for s in document.sentences)
    if total_tokens != len(scores):
        raise ValueError(
            f"document has {total_tokens} tokens but saliency has {len(scores)}"
        )
    peak = float(np.max(np.abs(scores))) if len(scores) else 0.0
    lines = [
        '<?xml version="1.0" encoding="utf-8"?>',
        '<html xmlns="http://www.w3.org/1999/xhtml">',
        "<head>",
        f"<title>Saliency heatmap {escape(saliency.doc_id)}"
        f" ({escape(saliency.method)})</title>",
        "</head>",
        '<body style="font-family: sans-serif; line-height: 1.8;">',
        f"<h1>{escape(saliency.doc_id)} &#183; {escape(saliency.method)}"
        f" &#183; class {saliency.target_class}</h1>",
    ]
    pos = 0
    for sent in document.sentences:
        spans = []
        for token in sent:
            score = float(scores[pos])
            alpha = abs(score) / peak if peak > 0.0 else 0.0
            rgb = _POSITIVE_RGB if score >= 0.0 else _NEGATIVE_RGB
            spans.append(
                f'<span style="background-color: rgba({rgb},{alpha:.4f})" '
                f'title="{score:.6g}">{escape(token)}</span>'
            )
            pos += 1
        lines.append("<p>" + " ".join(spans) + "</p>")
    lines.append("</body>")
    lines.append("</html>")
    return "\n".join(lines) + "\n"
