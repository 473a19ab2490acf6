"""Token vocabulary built from the training split only.

Id 0 is the unknown token (validation/test-only words encode to it) and
id 1 a padding sentinel kept for format compatibility — documents are
processed unpadded, so it never appears in encoded sequences. Real
tokens get ids from 2 upward in first-occurrence order over the
training split; everything is lowercased, punctuation kept.
"""

from __future__ import annotations

import numpy as np

from ..corpus.generator import Corpus, Document

UNK_TOKEN = "<unk>"
PAD_TOKEN = "<pad>"
UNK_ID = 0
PAD_ID = 1


class VocabError(ValueError):
    pass


class Vocab:
    def __init__(self, tokens: list[str]):
        if tokens[:2] != [UNK_TOKEN, PAD_TOKEN]:
            raise VocabError("vocabulary must start with the unk and pad tokens")
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise VocabError("vocabulary contains duplicate tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.tokens == other.tokens

    def id_of(self, token: str) -> int:
        return self.index.get(token.lower(), UNK_ID)

    def encode(self, document: Document) -> np.ndarray:
        """Concatenate the document's sentences into one id sequence."""
        ids = [
            self.index.get(tok.lower(), UNK_ID)
            for sent in document.sentences
            for tok in sent
        ]
        if not ids:
            raise VocabError(f"document {document.id!r} has no tokens")
        return np.asarray(ids, dtype=np.int64)


def build_vocab(corpus: Corpus) -> Vocab:
    tokens = [UNK_TOKEN, PAD_TOKEN]
    seen = set(tokens)
    train_docs = corpus.split_docs("train")
    if not train_docs:
        raise VocabError("corpus has no training split")
    for doc in train_docs:
        for sent in doc.sentences:
            for tok in sent:
                low = tok.lower()
                if low not in seen:
                    seen.add(low)
                    tokens.append(low)
    return Vocab(tokens)
