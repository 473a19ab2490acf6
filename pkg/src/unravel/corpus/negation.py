"""Rule-based negation detection over tokenized sentences.

A keyword occurrence counts as negated when a trigger ends at most five
tokens before it and nothing in between breaks the scope (punctuation or
"but"). Triggers after the keyword never negate. The reported span runs
from the trigger's first token up to the keyword, covering the scope words
("no signs of" for "no signs of infection"), because those words carry the
negation context downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .keywords import NEGATION_TRIGGERS, Phrase, breaks_scope

SCOPE_WINDOW = 5


@dataclass(frozen=True)
class NegationAnnotation:
    keyword_position: int
    negated: bool
    trigger_span: tuple[int, int] | None  # [start, end) or None if affirmative


def find_phrase(tokens: tuple[str, ...] | list[str], phrase: Phrase) -> list[int]:
    """Start indices of every occurrence of `phrase` as a token window."""
    n = len(phrase)
    return [
        i
        for i in range(len(tokens) - n + 1)
        if tuple(tokens[i : i + n]) == tuple(phrase)
    ]


def _trigger_ends(tokens) -> list[tuple[int, int]]:
    """(start, end_exclusive) spans of every trigger occurrence."""
    spans = []
    for trig in NEGATION_TRIGGERS:
        for start in find_phrase(tokens, trig):
            spans.append((start, start + len(trig)))
    spans.sort()
    return spans


def detect_negation(
    tokens: tuple[str, ...] | list[str], keyword_positions: list[int]
) -> list[NegationAnnotation]:
    """Annotate each keyword occurrence (given by start index) in one sentence."""
    for pos in keyword_positions:
        if not 0 <= pos < len(tokens):
            raise IndexError(f"keyword position {pos} outside sentence")
    triggers = _trigger_ends(tokens)
    annotations = []
    for pos in keyword_positions:
        best: tuple[int, int] | None = None
        for t_start, t_end in triggers:
            if t_end > pos:
                continue
            if pos - (t_end - 1) > SCOPE_WINDOW:
                continue
            if any(breaks_scope(tok) for tok in tokens[t_end:pos]):
                continue
            # keep the trigger closest to the keyword
            if best is None or t_start > best[0]:
                best = (t_start, t_end)
        if best is None:
            annotations.append(NegationAnnotation(pos, False, None))
        else:
            annotations.append(NegationAnnotation(pos, True, (best[0], pos)))
    return annotations
