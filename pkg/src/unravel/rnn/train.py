"""Training loop: minibatch Adam over per-document BPTT gradients.

Documents are processed unpadded, one full backward pass per document;
batch gradients are averaged in float64 accumulation buffers before the
(float32) Adam step. The checkpoint with the best validation accuracy
is kept, with early stopping after `patience` epochs without
improvement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus.generator import Corpus
from .adam import Adam
from .model import CLASS_NAMES, LstmModel
from .vocab import Vocab


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    train_accuracy: float
    valid_accuracy: float


def class_index(label: str) -> int:
    return CLASS_NAMES.index(label)


def encode_split(corpus: Corpus, vocab: Vocab, split: str):
    docs = corpus.split_docs(split)
    return [(vocab.encode(doc), class_index(doc.label)) for doc in docs]


def _parameter_norm(model: LstmModel) -> float:
    total = 0.0
    for arr in model.params.values():
        total += float(np.sum(np.square(arr, dtype=np.float64)))
    return float(np.sqrt(total))


def evaluate_accuracy(model: LstmModel, encoded) -> float:
    if not encoded:
        return 0.0
    correct = sum(1 for ids, label in encoded if model.predict(ids) == label)
    return correct / len(encoded)


def train_model(
    model: LstmModel,
    corpus: Corpus,
    vocab: Vocab,
    epochs: int,
    batch_size: int = 64,
    seed: int = 0,
    lr: float = 0.001,
    patience: int = 5,
    log=None,
) -> tuple[LstmModel, list[EpochMetrics]]:
    train_set = encode_split(corpus, vocab, "train")
    valid_set = encode_split(corpus, vocab, "valid")
    if not train_set or not valid_set:
        raise TrainingError("corpus must provide train and valid splits")

    optimizer = Adam(model.params, lr=lr)
    shuffle_rng = np.random.default_rng(seed)
    grad_names = ("W", "U", "b", "W_y", "b_y")
    accum = {
        name: np.zeros(model.params[name].shape, dtype=np.float64)
        for name in grad_names
    }
    accum_E = np.zeros(model.params["E"].shape, dtype=np.float64)

    metrics: list[EpochMetrics] = []
    best_valid = -1.0
    best_params = model.copy_params()
    best_epoch = -1

    for epoch in range(epochs):
        order = shuffle_rng.permutation(len(train_set))
        loss_sum = 0.0
        for batch_no, start in enumerate(range(0, len(order), batch_size)):
            batch = order[start : start + batch_size]
            for name in grad_names:
                accum[name].fill(0.0)
            accum_E.fill(0.0)
            batch_loss = 0.0
            for doc_idx in batch:
                ids, label = train_set[doc_idx]
                loss, grads = model.loss_and_gradients(ids, label)
                batch_loss += loss
                for name in grad_names:
                    accum[name] += grads[name]
                sparse_ids, d_x = grads["E_sparse"]
                np.add.at(accum_E, sparse_ids, d_x)
            if not np.isfinite(batch_loss):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch} batch {batch_no}; "
                    f"parameter norm {_parameter_norm(model):.6e}"
                )
            scale = 1.0 / len(batch)
            step_grads = {name: accum[name] * scale for name in grad_names}
            step_grads["E"] = accum_E * scale
            optimizer.step(step_grads)
            loss_sum += batch_loss

        train_loss = loss_sum / len(train_set)
        train_acc = evaluate_accuracy(model, train_set)
        valid_acc = evaluate_accuracy(model, valid_set)
        metrics.append(EpochMetrics(epoch, train_loss, train_acc, valid_acc))
        if log is not None:
            log(
                f"epoch {epoch}: loss {train_loss:.4f} "
                f"train_acc {train_acc:.4f} valid_acc {valid_acc:.4f}"
            )
        if valid_acc > best_valid:
            best_valid = valid_acc
            best_params = model.copy_params()
            best_epoch = epoch
        elif epoch - best_epoch >= patience:
            break

    if epochs > 0:
        model.set_params(best_params)
    return model, metrics
