"""Binary model checkpoint with a versioned header.

Layout (all integers unsigned 32-bit little-endian):

    magic "UNRV" | version | V | d_e | d_h | C
    V tokens, each: byte length + UTF-8 bytes, in id order
    matrices row-major little-endian float32, in this order:
    E, W_i, W_f, W_o, W_c, U_i, U_f, U_o, U_c,
    b_i, b_f, b_o, b_c, W_y, b_y

Writing then reading then writing again is byte-identical.
"""

from __future__ import annotations

import struct

import numpy as np

from .model import LstmModel
from .vocab import Vocab

MAGIC = b"UNRV"
VERSION = 1


class CheckpointError(ValueError):
    pass


def _matrix_order(model: LstmModel) -> list[np.ndarray]:
    return [
        model.params["E"],
        model.W_i, model.W_f, model.W_o, model.W_c,
        model.U_i, model.U_f, model.U_o, model.U_c,
        model.b_i, model.b_f, model.b_o, model.b_c,
        model.params["W_y"],
        model.params["b_y"],
    ]


def save_checkpoint(model: LstmModel, vocab: Vocab, path: str) -> None:
    if len(vocab) != model.vocab_size:
        raise CheckpointError(
            f"vocab size {len(vocab)} does not match model {model.vocab_size}"
        )
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(
            struct.pack(
                "<5I", VERSION, model.vocab_size, model.d_e, model.d_h, model.n_classes
            )
        )
        for token in vocab.tokens:
            raw = token.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
        for matrix in _matrix_order(model):
            fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def _read_exact(fh, n: int, path: str, what: str) -> bytes:
    raw = fh.read(n)
    if len(raw) != n:
        raise CheckpointError(f"{path}: truncated while reading {what}")
    return raw


def load_checkpoint(path: str) -> tuple[LstmModel, Vocab]:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, path, "magic") != MAGIC:
            raise CheckpointError(f"{path}: not a model checkpoint (bad magic)")
        version, v_size, d_e, d_h, n_classes = struct.unpack(
            "<5I", _read_exact(fh, 20, path, "header")
        )
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
        tokens = []
        for i in range(v_size):
            (length,) = struct.unpack("<I", _read_exact(fh, 4, path, f"token {i}"))
            tokens.append(_read_exact(fh, length, path, f"token {i}").decode("utf-8"))
        vocab = Vocab(tokens)

        model = LstmModel(v_size, d_e, d_h, n_classes)

        def read_matrix(shape) -> np.ndarray:
            count = int(np.prod(shape))
            raw = _read_exact(fh, 4 * count, path, "matrix data")
            return np.frombuffer(raw, dtype="<f4").reshape(shape).copy()

        model.params["E"][:] = read_matrix((v_size, d_e))
        for gate in range(4):
            model.params["W"][gate * d_h : (gate + 1) * d_h] = read_matrix((d_h, d_e))
        for gate in range(4):
            model.params["U"][gate * d_h : (gate + 1) * d_h] = read_matrix((d_h, d_h))
        for gate in range(4):
            model.params["b"][gate * d_h : (gate + 1) * d_h] = read_matrix((d_h,))
        model.params["W_y"][:] = read_matrix((n_classes, d_h))
        model.params["b_y"][:] = read_matrix((n_classes,))
        if fh.read(1):
            raise CheckpointError(f"{path}: trailing bytes after matrices")
    return model, vocab
