"""Single-layer unidirectional LSTM classifier with learned embeddings.

Parameters are kept as stacked tensors (gate order [input, forget,
output, candidate]); the per-gate views W_i, U_f, b_o, ... are exposed
as properties. The classification head reads only the final hidden
state: logits = W_y @ h_T + b_y.

`input_gradients` differentiates the pre-softmax logit of the predicted
(argmax) class with respect to every input embedding vector — the logit
rather than the probability, because softmax saturation would scale
otherwise-informative gradients down to zero on confident predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

CLASS_NAMES = ("non_septic", "septic")

PARAM_NAMES = ("E", "W", "U", "b", "W_y", "b_y")


@dataclass
class GradientMatrix:
    """d(logit of target_class) / d(input embedding), one row per token."""

    values: np.ndarray  # (T, d_e)
    target_class: int


@dataclass
class ForwardCache:
    X: np.ndarray  # (T, d_e) input embeddings
    G: np.ndarray  # (T, 4H) post-activation gates
    C: np.ndarray  # (T, H) cell states
    TC: np.ndarray  # (T, H) tanh(cell)
    H: np.ndarray  # (T, H) hidden states
    logits: np.ndarray  # (C,)

    @property
    def h_last(self) -> np.ndarray:
        return self.H[-1]


class LstmModel:
    def __init__(
        self,
        vocab_size: int,
        d_e: int,
        d_h: int,
        n_classes: int = 2,
        seed: int = 0,
        dtype=np.float32,
    ):
        if min(vocab_size, d_e, d_h, n_classes) < 1:
            raise ValueError("all model dimensions must be positive")
        self.vocab_size = vocab_size
        self.d_e = d_e
        self.d_h = d_h
        self.n_classes = n_classes
        self.dtype = np.dtype(dtype)

        rng = np.random.default_rng(seed)

        def uniform(shape, bound):
            return rng.uniform(-bound, bound, size=shape).astype(self.dtype)

        self.params: dict[str, np.ndarray] = {
            "E": uniform((vocab_size, d_e), 0.1),
            "W": uniform((4 * d_h, d_e), 1.0 / np.sqrt(d_e)),
            "U": uniform((4 * d_h, d_h), 1.0 / np.sqrt(d_h)),
            "b": np.zeros(4 * d_h, dtype=self.dtype),
            "W_y": uniform((n_classes, d_h), 1.0 / np.sqrt(d_h)),
            "b_y": np.zeros(n_classes, dtype=self.dtype),
        }
        # forget-gate bias starts at 1.0 so early cell states persist
        self.params["b"][d_h : 2 * d_h] = 1.0

    # per-gate parameter views in the stacked [i|f|o|c] layout
    def _gate(self, name: str, idx: int) -> np.ndarray:
        return self.params[name][idx * self.d_h : (idx + 1) * self.d_h]

    W_i = property(lambda self: self._gate("W", 0))
    W_f = property(lambda self: self._gate("W", 1))
    W_o = property(lambda self: self._gate("W", 2))
    W_c = property(lambda self: self._gate("W", 3))
    U_i = property(lambda self: self._gate("U", 0))
    U_f = property(lambda self: self._gate("U", 1))
    U_o = property(lambda self: self._gate("U", 2))
    U_c = property(lambda self: self._gate("U", 3))
    b_i = property(lambda self: self._gate("b", 0))
    b_f = property(lambda self: self._gate("b", 1))
    b_o = property(lambda self: self._gate("b", 2))
    b_c = property(lambda self: self._gate("b", 3))

    def copy_params(self) -> dict[str, np.ndarray]:
        return {name: arr.copy() for name, arr in self.params.items()}

    def set_params(self, params: dict[str, np.ndarray]) -> None:
        for name in PARAM_NAMES:
            np.copyto(self.params[name], params[name])

    def embed(self, seq) -> np.ndarray:
        ids = np.asarray(seq, dtype=np.int64)
        if ids.ndim != 1 or ids.size == 0:
            raise ValueError("token-id sequence must be non-empty and flat")
        if ids.min() < 0 or ids.max() >= self.vocab_size:
            raise ValueError(
                f"token id out of range [0, {self.vocab_size}): "
                f"{int(ids.min())}..{int(ids.max())}"
            )
        return self.params["E"][ids]

    def forward_embedded(self, X: np.ndarray) -> ForwardCache:
        """Full forward pass from explicit embedding rows (T, d_e)."""
        X = np.ascontiguousarray(X, dtype=self.dtype)
        if X.ndim != 2 or X.shape[1] != self.d_e or X.shape[0] == 0:
            raise ValueError(f"embedded input must be (T, {self.d_e})")
        T, n_h = X.shape[0], self.d_h
        XP = X @ self.params["W"].T + self.params["b"]
        G = np.empty((T, 4 * n_h), dtype=self.dtype)
        C = np.empty((T, n_h), dtype=self.dtype)
        TC = np.empty((T, n_h), dtype=self.dtype)
        H = np.empty((T, n_h), dtype=self.dtype)
        kernels.lstm_forward(XP, self.params["U"], G, C, TC, H)
        logits = self.params["W_y"] @ H[-1] + self.params["b_y"]
        return ForwardCache(X=X, G=G, C=C, TC=TC, H=H, logits=logits)

    def forward(self, seq) -> tuple[np.ndarray, ForwardCache]:
        """Class probabilities (softmax of logits, computed in float64)."""
        cache = self.forward_embedded(self.embed(seq))
        return softmax(cache.logits), cache

    def predict(self, seq) -> int:
        probs, _ = self.forward(seq)
        return int(np.argmax(probs))

    def _backward_to_inputs(
        self, cache: ForwardCache, d_h_last: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Returns (dA gate pre-activation grads (T, 4H), dX (T, d_e))."""
        T = cache.X.shape[0]
        dA = np.empty((T, 4 * self.d_h), dtype=self.dtype)
        kernels.lstm_backward(
            np.ascontiguousarray(d_h_last, dtype=self.dtype),
            cache.G,
            cache.C,
            cache.TC,
            cache.H,
            self.params["U"],
            dA,
        )
        return dA, dA @ self.params["W"]

    def input_gradients(self, seq) -> GradientMatrix:
        cache = self.forward_embedded(self.embed(seq))
        target = int(np.argmax(cache.logits))
        _, dX = self._backward_to_inputs(cache, self.params["W_y"][target])
        return GradientMatrix(values=dX, target_class=target)

    def input_gradients_embedded(self, X: np.ndarray) -> GradientMatrix:
        """As `input_gradients` but from explicit embedding rows."""
        cache = self.forward_embedded(X)
        target = int(np.argmax(cache.logits))
        _, dX = self._backward_to_inputs(cache, self.params["W_y"][target])
        return GradientMatrix(values=dX, target_class=target)

    def loss_and_gradients(self, seq, label: int) -> tuple[float, dict[str, np.ndarray]]:
        """Cross-entropy loss for one document and grads for every parameter.

        The embedding gradient is returned sparsely as ("E_rows", ids, dX)
        under key "E_sparse" to avoid materializing a V×d_e matrix per
        document; `accumulate_gradients` in the trainer densifies it.
        """
        ids = np.asarray(seq, dtype=np.int64)
        cache = self.forward_embedded(self.embed(ids))
        probs = softmax(cache.logits)
        loss = -float(np.log(max(probs[label], 1e-300)))

        dlogits = probs.astype(self.dtype)
        dlogits[label] -= 1.0
        d_h_last = self.params["W_y"].T @ dlogits
        dA, dX = self._backward_to_inputs(cache, d_h_last)

        grads: dict[str, np.ndarray] = {
            "W": dA.T @ cache.X,
            "U": dA[1:].T @ cache.H[:-1],
            "b": dA.sum(axis=0),
            "W_y": np.outer(dlogits, cache.h_last),
            "b_y": dlogits,
            "E_sparse": (ids, dX),
        }
        return loss, grads


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    p = np.exp(z)
    return p / p.sum()
