"""Keyword sets and negation triggers for the synthetic sepsis corpus.

Two keyword families drive document labeling: infection terms, and groups
of inflammatory-response terms where any phrase in a group satisfies that
group's criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Phrase = tuple[str, ...]

INFECTION_TERMS: tuple[Phrase, ...] = (
    ("pneumonia",),
    ("empyema",),
    ("meningitis",),
    ("endocarditis",),
    ("infection",),
)

# One group per criterion; phrases within a group are interchangeable (OR).
INFLAMMATION_GROUPS: tuple[tuple[Phrase, ...], ...] = (
    (("hypothermia",), ("hyperthermia",)),
    (("leukocytosis",), ("leukopenia",)),
    (("altered", "mental", "status"),),
    (("tachycardia",),),
    (("tachypnea",),),
    (("hyperglycemia",),),
)

# Multi-token triggers match as consecutive token windows.
NEGATION_TRIGGERS: tuple[Phrase, ...] = (
    ("no",),
    ("not",),
    ("without",),
    ("denies",),
    ("negative",),
    ("ruled", "out"),
    ("unlikely",),
)

# A trigger's scope ends at the first of these between trigger and keyword.
SCOPE_BREAKER_WORDS: frozenset[str] = frozenset({"but"})

# Tokens made purely of non-alphanumeric characters break negation scope.
def is_punctuation(token: str) -> bool:
    return len(token) > 0 and not any(ch.isalnum() for ch in token)


def breaks_scope(token: str) -> bool:
    return token in SCOPE_BREAKER_WORDS or is_punctuation(token)


@dataclass(frozen=True)
class KeywordSets:
    """Infection phrases plus inflammation phrase groups.

    Infection terms and inflammation terms must be disjoint, every group
    non-empty, with at least 4 infection entries and 6 groups.
    """

    infection_terms: tuple[Phrase, ...] = INFECTION_TERMS
    inflammation_groups: tuple[tuple[Phrase, ...], ...] = INFLAMMATION_GROUPS

    def __post_init__(self) -> None:
        if len(self.infection_terms) < 4:
            raise ValueError("need at least 4 infection terms")
        if len(self.inflammation_groups) < 6:
            raise ValueError("need at least 6 inflammation groups")
        if any(len(group) == 0 for group in self.inflammation_groups):
            raise ValueError("inflammation groups must be non-empty")
        infl = {p for group in self.inflammation_groups for p in group}
        if infl & set(self.infection_terms):
            raise ValueError("infection and inflammation terms must be disjoint")

    def all_phrases(self) -> tuple[Phrase, ...]:
        phrases = list(self.infection_terms)
        for group in self.inflammation_groups:
            phrases.extend(group)
        return tuple(phrases)

    def keyword_tokens(self) -> frozenset[str]:
        return frozenset(tok for phrase in self.all_phrases() for tok in phrase)


def trigger_tokens() -> frozenset[str]:
    return frozenset(tok for trig in NEGATION_TRIGGERS for tok in trig)
