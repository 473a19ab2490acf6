"""LSTM classifier: kernels, model, optimizer, vocabulary, checkpoints."""

from .adam import Adam
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .kernels import BACKEND
from .model import CLASS_NAMES, ForwardCache, GradientMatrix, LstmModel, softmax
from .train import (
    EpochMetrics,
    TrainingError,
    class_index,
    encode_split,
    evaluate_accuracy,
    train_model,
)
from .vocab import PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN, Vocab, VocabError, build_vocab

__all__ = [
    "Adam",
    "BACKEND",
    "CheckpointError",
    "CLASS_NAMES",
    "EpochMetrics",
    "ForwardCache",
    "GradientMatrix",
    "LstmModel",
    "PAD_ID",
    "PAD_TOKEN",
    "TrainingError",
    "UNK_ID",
    "UNK_TOKEN",
    "Vocab",
    "VocabError",
    "build_vocab",
    "class_index",
    "encode_split",
    "evaluate_accuracy",
    "load_checkpoint",
    "save_checkpoint",
    "softmax",
    "train_model",
]
