"""Synthetic sepsis corpus: sentence pools, document assembly, labeling.

A document is septic when it has a non-negated infection keyword and at
least two inflammation criteria with a non-negated keyword. Labels always
come from the rule-based negation detector, so sentences whose negation
the detector cannot see (out-of-scope triggers) make the stored label
disagree with the writer's intent. That mismatch is the corpus' label
noise and is reported in the metadata, never corrected.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .keywords import KeywordSets, Phrase
from .negation import detect_negation, find_phrase
from .templates import TemplateGrammar, default_templates

SENTENCES_PER_DOC = 17
MIN_SENTENCE_LEN = 3
MAX_SENTENCE_LEN = 15

SEPTIC = "septic"
NON_SEPTIC = "non_septic"

Tokens = tuple[str, ...]


class GenerationError(ValueError):
    pass


@dataclass
class CarrierPool:
    """Sentences mentioning one keyword group, split by negation behavior."""

    affirmative: list[Tokens]
    negated_detected: list[Tokens]
    negated_missed: list[Tokens]

    def non_empty(self) -> bool:
        return bool(self.affirmative) and bool(
            self.negated_detected or self.negated_missed
        )


@dataclass
class SentencePool:
    infection: CarrierPool
    inflammation: list[CarrierPool]
    other_sentences: list[Tokens]

    @property
    def infection_sentences(self) -> list[Tokens]:
        p = self.infection
        return p.affirmative + p.negated_detected + p.negated_missed

    @property
    def inflammation_sentences(self) -> list[list[Tokens]]:
        return [
            p.affirmative + p.negated_detected + p.negated_missed
            for p in self.inflammation
        ]


@dataclass
class Document:
    id: str
    sentences: tuple[Tokens, ...]
    label: str | None = None
    gold_terms: frozenset[tuple[int, int]] = frozenset()
    split: str | None = None

    def flat_tokens(self) -> list[str]:
        return [tok for sent in self.sentences for tok in sent]


@dataclass
class Corpus:
    documents: list[Document]
    generation_seed: int | None
    keyword_sets: KeywordSets
    split_fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    metadata: dict = field(default_factory=dict)

    def split_docs(self, split: str) -> list[Document]:
        return [d for d in self.documents if d.split == split]


@dataclass(frozen=True)
class GeneratorConfig:
    keyword_docs: int = 2000
    distractor_docs: int = 800
    seed: int = 7
    # fraction of infection / inflammation carrier sentences written as
    # negated, and of the negated ones, the fraction drawn from templates
    # the detector cannot see. Inflammation negation is kept rarer than
    # infection negation: with six inflammation sentences per document the
    # two-group criterion almost always holds, so the infection sentence
    # carries the label either way, and these rates keep the septic
    # fraction near one half.
    negated_rate: float = 0.365
    group_negated_rate: float = 0.05
    missed_negation_rate: float = 0.14
    distractor_pool_size: int = 2500
    carrier_filler_draws: int = 3
    split_fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)


def _fill_template(template: str, rng: random.Random, lexicon, keyword: str | None) -> Tokens:
    tokens = []
    for piece in template.split():
        if piece == "{kw}":
            if keyword is None:
                raise GenerationError(f"distractor template has keyword slot: {template!r}")
            tokens.extend(keyword.split())
        elif piece.startswith("{") and piece.endswith("}"):
            slot = piece[1:-1]
            if slot not in lexicon:
                raise GenerationError(f"unknown slot {piece!r} in template {template!r}")
            tokens.append(rng.choice(lexicon[slot]))
        else:
            tokens.append(piece)
    if not MIN_SENTENCE_LEN <= len(tokens) <= MAX_SENTENCE_LEN:
        raise GenerationError(
            f"template yields {len(tokens)} tokens, outside "
            f"{MIN_SENTENCE_LEN}-{MAX_SENTENCE_LEN}: {template!r}"
        )
    return tuple(tokens)


def _keyword_positions(tokens: Tokens, phrases: tuple[Phrase, ...]) -> list[tuple[int, Phrase]]:
    hits = []
    for phrase in phrases:
        for pos in find_phrase(tokens, phrase):
            hits.append((pos, phrase))
    hits.sort(key=lambda h: (h[0], h[1]))
    return hits


def _sentence_negated(tokens: Tokens, phrases: tuple[Phrase, ...]) -> bool:
    """True when every keyword occurrence in the sentence is negated."""
    hits = _keyword_positions(tokens, phrases)
    if not hits:
        return False
    anns = detect_negation(tokens, [pos for pos, _ in hits])
    return all(a.negated for a in anns)


def _build_carrier_pool(
    phrases: tuple[Phrase, ...],
    templates: TemplateGrammar,
    rng: random.Random,
    draws: int,
) -> CarrierPool:
    pool = CarrierPool([], [], [])
    variants = (
        (templates.affirmative_templates, False),
        (templates.negated_templates, True),
        (templates.negated_miss_templates, True),
    )
    seen: set[Tokens] = set()
    for template_set, intent_negated in variants:
        if not template_set:
            raise GenerationError("carrier template list is empty")
        for template in template_set:
            for phrase in phrases:
                keyword = " ".join(phrase)
                n_draws = draws if "{" in template.replace("{kw}", "") else 1
                for _ in range(n_draws):
                    tokens = _fill_template(template, rng, templates.slot_lexicon, keyword)
                    if tokens in seen:
                        continue
                    seen.add(tokens)
                    if not intent_negated:
                        pool.affirmative.append(tokens)
                    elif _sentence_negated(tokens, phrases):
                        pool.negated_detected.append(tokens)
                    else:
                        pool.negated_missed.append(tokens)
    return pool


def build_sentence_pool(
    keyword_sets: KeywordSets,
    templates: TemplateGrammar,
    rng_seed: int,
    distractor_pool_size: int = 2500,
    carrier_filler_draws: int = 3,
) -> SentencePool:
    if len(templates.distractor_templates) < 20:
        raise GenerationError(
            f"need at least 20 distractor templates, got {len(templates.distractor_templates)}"
        )
    if len(templates.carrier_templates()) < 5:
        raise GenerationError("need at least 5 carrier templates per keyword group")
    rng = random.Random(f"{rng_seed}:pool")

    infection = _build_carrier_pool(
        keyword_sets.infection_terms, templates, rng, carrier_filler_draws
    )
    inflammation = [
        _build_carrier_pool(group, templates, rng, carrier_filler_draws)
        for group in keyword_sets.inflammation_groups
    ]

    all_phrases = keyword_sets.all_phrases()
    others: list[Tokens] = []
    seen: set[Tokens] = set()
    for _ in range(distractor_pool_size):
        template = rng.choice(templates.distractor_templates)
        tokens = _fill_template(template, rng, templates.slot_lexicon, None)
        if _keyword_positions(tokens, all_phrases):
            raise GenerationError(f"distractor template leaks a keyword: {template!r}")
        if tokens not in seen:
            seen.add(tokens)
            others.append(tokens)
    return SentencePool(infection, inflammation, others)


@dataclass(frozen=True)
class _SampledSentence:
    tokens: Tokens
    intent_negated: bool
    is_carrier: bool


def _draw_carrier(
    pool: CarrierPool, rng: random.Random, negated_rate: float, missed_rate: float
) -> _SampledSentence:
    if not pool.non_empty():
        raise GenerationError("empty pool for a required keyword group")
    if rng.random() < negated_rate:
        use_missed = rng.random() < missed_rate
        candidates = pool.negated_missed if use_missed else pool.negated_detected
        if not candidates:
            candidates = pool.negated_detected or pool.negated_missed
        return _SampledSentence(rng.choice(candidates), True, True)
    return _SampledSentence(rng.choice(pool.affirmative), False, True)


def _sample_parts(
    pool: SentencePool,
    kind: str,
    rng: random.Random,
    negated_rate: float = 0.365,
    group_negated_rate: float = 0.05,
    missed_rate: float = 0.14,
) -> tuple[list[_SampledSentence], str]:
    """Draw 17 sentences; also return the label the writer intended."""
    if not pool.other_sentences:
        raise GenerationError("empty distractor sentence pool")
    parts: list[_SampledSentence] = []
    intended = NON_SEPTIC
    if kind == "keyword_doc":
        infection = _draw_carrier(pool.infection, rng, negated_rate, missed_rate)
        groups = [
            _draw_carrier(group_pool, rng, group_negated_rate, missed_rate)
            for group_pool in pool.inflammation
        ]
        affirmed_groups = sum(1 for p in groups if not p.intent_negated)
        if not infection.intent_negated and affirmed_groups >= 2:
            intended = SEPTIC
        parts.append(infection)
        parts.extend(groups)
    elif kind != "distractor_doc":
        raise GenerationError(f"unknown document kind {kind!r}")
    while len(parts) < SENTENCES_PER_DOC:
        parts.append(_SampledSentence(rng.choice(pool.other_sentences), False, False))
    rng.shuffle(parts)
    return parts, intended


def sample_document(pool: SentencePool, kind: str, rng: random.Random) -> Document:
    """Assemble one unlabeled document of 17 sentences."""
    parts, _ = _sample_parts(pool, kind, rng)
    return Document(id="", sentences=tuple(p.tokens for p in parts))


def _group_status(
    document: Document, keyword_sets: KeywordSets
) -> tuple[bool, list[bool]]:
    """(any infection term non-negated, per-group any non-negated term)."""
    infection_ok = False
    group_ok = [False] * len(keyword_sets.inflammation_groups)
    for tokens in document.sentences:
        hits = _keyword_positions(tokens, keyword_sets.all_phrases())
        if not hits:
            continue
        anns = detect_negation(tokens, [pos for pos, _ in hits])
        for (pos, phrase), ann in zip(hits, anns):
            if ann.negated:
                continue
            if phrase in keyword_sets.infection_terms:
                infection_ok = True
            else:
                for g, group in enumerate(keyword_sets.inflammation_groups):
                    if phrase in group:
                        group_ok[g] = True
    return infection_ok, group_ok


def assign_label(document: Document, keyword_sets: KeywordSets) -> str:
    infection_ok, group_ok = _group_status(document, keyword_sets)
    if infection_ok and sum(group_ok) >= 2:
        return SEPTIC
    return NON_SEPTIC


def gold_terms(document: Document, keyword_sets: KeywordSets) -> frozenset[tuple[int, int]]:
    """Keyword tokens plus negation-scope tokens, as (sentence, token) pairs."""
    positions: set[tuple[int, int]] = set()
    for s_idx, tokens in enumerate(document.sentences):
        hits = _keyword_positions(tokens, keyword_sets.all_phrases())
        if not hits:
            continue
        anns = detect_negation(tokens, [pos for pos, _ in hits])
        for (pos, phrase), ann in zip(hits, anns):
            for k in range(len(phrase)):
                positions.add((s_idx, pos + k))
            if ann.negated and ann.trigger_span is not None:
                for k in range(*ann.trigger_span):
                    positions.add((s_idx, k))
    return frozenset(positions)


def generate_corpus(
    config: GeneratorConfig = GeneratorConfig(),
    keyword_sets: KeywordSets | None = None,
    templates: TemplateGrammar | None = None,
) -> Corpus:
    if config.keyword_docs < 100:
        raise GenerationError("keyword_docs must be at least 100")
    if config.distractor_docs < 40:
        raise GenerationError("distractor_docs must be at least 40")
    keyword_sets = keyword_sets or KeywordSets()
    templates = templates or default_templates()
    pool = build_sentence_pool(
        keyword_sets,
        templates,
        config.seed,
        config.distractor_pool_size,
        config.carrier_filler_draws,
    )

    n_total = config.keyword_docs + config.distractor_docs
    documents: list[Document] = []
    noisy = 0
    septic = 0
    for i in range(n_total):
        kind = "keyword_doc" if i < config.keyword_docs else "distractor_doc"
        rng = random.Random(f"{config.seed}:doc:{i}")
        parts, intended = _sample_parts(
            pool,
            kind,
            rng,
            config.negated_rate,
            config.group_negated_rate,
            config.missed_negation_rate,
        )
        doc = Document(id=f"doc-{i:06d}", sentences=tuple(p.tokens for p in parts))
        doc.label = assign_label(doc, keyword_sets)
        doc.gold_terms = gold_terms(doc, keyword_sets)
        if intended != doc.label:
            noisy += 1
        if doc.label == SEPTIC:
            septic += 1
        documents.append(doc)

    split_rng = random.Random(f"{config.seed}:split")
    order = list(range(n_total))
    split_rng.shuffle(order)
    f_train, f_valid, _ = config.split_fractions
    n_train = int(n_total * f_train)
    n_valid = int(n_total * (f_train + f_valid)) - n_train
    for rank, idx in enumerate(order):
        if rank < n_train:
            documents[idx].split = "train"
        elif rank < n_train + n_valid:
            documents[idx].split = "valid"
        else:
            documents[idx].split = "test"

    metadata = {
        "keyword_docs": config.keyword_docs,
        "distractor_docs": config.distractor_docs,
        "seed": config.seed,
        "septic_fraction": septic / n_total,
        "label_noise": noisy / n_total,
        "train_docs": n_train,
        "valid_docs": n_valid,
        "test_docs": n_total - n_train - n_valid,
    }
    return Corpus(
        documents=documents,
        generation_seed=config.seed,
        keyword_sets=keyword_sets,
        split_fractions=config.split_fractions,
        metadata=metadata,
    )
