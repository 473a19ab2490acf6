"""Synthetic sepsis-note corpus: templates, negation detection, labeling."""

from .generator import (
    Corpus,
    Document,
    GenerationError,
    GeneratorConfig,
    NON_SEPTIC,
    SEPTIC,
    SentencePool,
    assign_label,
    build_sentence_pool,
    generate_corpus,
    gold_terms,
    sample_document,
)
from .io import CorpusFormatError, load_corpus, load_documents, save_corpus
from .keywords import KeywordSets
from .negation import NegationAnnotation, detect_negation, find_phrase
from .templates import TemplateGrammar, default_templates

__all__ = [
    "Corpus",
    "CorpusFormatError",
    "Document",
    "GenerationError",
    "GeneratorConfig",
    "KeywordSets",
    "NegationAnnotation",
    "NON_SEPTIC",
    "SEPTIC",
    "SentencePool",
    "TemplateGrammar",
    "assign_label",
    "build_sentence_pool",
    "default_templates",
    "detect_negation",
    "find_phrase",
    "generate_corpus",
    "gold_terms",
    "load_corpus",
    "load_documents",
    "sample_document",
    "save_corpus",
]
