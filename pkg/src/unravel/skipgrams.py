"""Skipgram importance features over token saliency.

A skipgram selects 1–4 token positions spanning at most two skipped
positions in total. Its identity is the selected tokens joined by
spaces (gap pattern discarded), its score the mean saliency of the
selected positions. Per document, each distinct key keeps its
highest-|score| occurrence, the 50 strongest keys per training document
feed a global vocabulary (total absolute importance), and scores are
discretized into five levels using per-sign medians of the training
score distribution:

    --   score < t_neg              -    t_neg ≤ score < 0
    0    skipgram absent            +    0 ≤ score ≤ t_pos
    ++   score > t_pos

Feature tables are labeled with the model's predictions, never the
corpus labels: the rule learner downstream explains the model, not the
data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from statistics import median

import numpy as np

MAX_LENGTH = 4
MAX_SKIP = 2
TOP_PER_DOC = 50

LEVELS = ("--", "-", "0", "+", "++")
ABSENT = LEVELS.index("0")


@dataclass(frozen=True, slots=True)
class Skipgram:
    key: str
    positions: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.positions)

    @property
    def span(self) -> int:
        return self.positions[-1] - self.positions[0] + 1


@dataclass(frozen=True, slots=True)
class ScoredSkipgram:
    key: str
    score: float
    first_position: int
    span: int


@dataclass(frozen=True)
class Thresholds:
    t_neg: float
    t_pos: float


class SkipgramVocab:
    def __init__(self, keys, weights: dict[str, float]):
        self.keys = tuple(keys)
        self.weights = dict(weights)
        self.index = {k: i for i, k in enumerate(self.keys)}
        if len(self.index) != len(self.keys):
            raise ValueError("duplicate skipgram keys in vocabulary")

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key: str) -> bool:
        return key in self.index

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SkipgramVocab)
            and self.keys == other.keys
            and self.weights == other.weights
        )


def _position_sets(length: int):
    """Index tuples in (first position, length, span, positions) order."""
    for first in range(length):
        for size in range(1, MAX_LENGTH + 1):
            window = range(first + 1, min(first + size + MAX_SKIP, length))
            group = []
            for rest in combinations(window, size - 1):
                positions = (first, *rest)
                group.append(positions)
            group.sort(key=lambda p: (p[-1] - p[0] + 1, p))
            yield from group


def enumerate_skipgrams(tokens) -> list[Skipgram]:
    if not tokens:
        raise ValueError("cannot enumerate skipgrams of an empty sequence")
    lowered = [t.lower() for t in tokens]
    return [
        Skipgram(" ".join(lowered[p] for p in positions), positions)
        for positions in _position_sets(len(tokens))
    ]


def score_skipgrams(skipgrams, saliency_scores) -> list[ScoredSkipgram]:
    """Mean saliency per skipgram; duplicate keys in one document collapse
    to the occurrence with the largest |score| (first enumerated wins ties)."""
    scores = np.asarray(saliency_scores, dtype=np.float64)
    best: dict[str, ScoredSkipgram] = {}
    for sg in skipgrams:
        positions = sg.positions
        if positions[-1] >= len(scores):
            raise ValueError(f"skipgram positions {positions} exceed saliency length")
        total = 0.0
        for p in positions:
            total += scores[p]
        scored = ScoredSkipgram(
            key=sg.key,
            score=total / len(positions),
            first_position=positions[0],
            span=positions[-1] - positions[0] + 1,
        )
        held = best.get(sg.key)
        if held is None or abs(scored.score) > abs(held.score):
            best[sg.key] = scored
    return list(best.values())


def select_document_top(scored, k: int = TOP_PER_DOC) -> list[ScoredSkipgram]:
    ranked = sorted(
        scored, key=lambda s: (-abs(s.score), s.first_position, s.span, s.key)
    )
    return ranked[:k]


def select_global_vocab(per_doc_retained, limit: int) -> SkipgramVocab:
    """Keys with the highest total |score| across retained training lists."""
    weights: dict[str, float] = {}
    for retained in per_doc_retained:
        for scored in retained:
            weights[scored.key] = weights.get(scored.key, 0.0) + abs(scored.score)
    order = sorted(weights, key=lambda k: (-weights[k], k))[:limit]
    return SkipgramVocab(order, {k: weights[k] for k in order})


class DegenerateThresholdError(ValueError):
    pass


def fit_discretizer(training_scores) -> Thresholds:
    positives = [s for s in training_scores if s > 0.0]
    negatives = [s for s in training_scores if s < 0.0]
    if not positives or not negatives:
        raise DegenerateThresholdError(
            "retained training scores are one-signed; thresholds need both "
            "positive and negative scores — check that the saliency pooling "
            "method produces signed scores (l2 does not) or enlarge the corpus"
        )
    return Thresholds(t_neg=float(median(negatives)), t_pos=float(median(positives)))


def discretize(score: float | None, thresholds: Thresholds) -> int:
    """Level code for a present score, or the absent level for None."""
    if score is None:
        return ABSENT
    if score > thresholds.t_pos:
        return LEVELS.index("++")
    if score >= 0.0:
        return LEVELS.index("+")
    if score >= thresholds.t_neg:
        return LEVELS.index("-")
    return LEVELS.index("--")


def document_levels(tokens, saliency_scores, vocab: SkipgramVocab,
                    thresholds: Thresholds) -> np.ndarray:
    """Level codes over the vocabulary for one document, using every
    in-vocabulary occurrence (absence, not rank, decides the 0 level)."""
    codes = np.full(len(vocab), ABSENT, dtype=np.uint8)
    scored = score_skipgrams(enumerate_skipgrams(tokens), saliency_scores)
    for item in scored:
        col = vocab.index.get(item.key)
        if col is not None:
            codes[col] = discretize(item.score, thresholds)
    return codes


# -------------------------------------------------------------- persistence
def save_skipgram_vocab(vocab: SkipgramVocab, thresholds: Thresholds, path: str) -> None:
    payload = {
        "t_neg": thresholds.t_neg,
        "t_pos": thresholds.t_pos,
        "keys": list(vocab.keys),
        "weights": [vocab.weights[k] for k in vocab.keys],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_skipgram_vocab(path: str) -> tuple[SkipgramVocab, Thresholds]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    vocab = SkipgramVocab(
        payload["keys"], dict(zip(payload["keys"], payload["weights"]))
    )
    return vocab, Thresholds(t_neg=payload["t_neg"], t_pos=payload["t_pos"])
