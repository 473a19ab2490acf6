"""Pure-numpy LSTM recurrence kernel.

Reference implementation of the sequential part of LSTM forward/backward.
The input projections (X @ W.T + b) and all parameter-gradient matrix
products happen outside the kernel as single matrix multiplications; the
kernel only walks the time dimension, which is the part that cannot be
expressed as one large product.

Gate layout everywhere: rows/slices ordered [input, forget, output,
candidate], so a stacked tensor of width 4H splits as i = [:H],
f = [H:2H], o = [2H:3H], g = [3H:4H]. `G` stores post-activation gate
values, `C` cell states, `TC` tanh of cell states, `H` hidden states.
"""

from __future__ import annotations

import numpy as np


def _sigmoid(x):
    out = np.empty_like(x)
    np.negative(x, out=out)
    np.exp(out, out=out)
    out += 1.0
    np.reciprocal(out, out=out)
    return out


def lstm_forward(XP, U, G, C, TC, H) -> None:
    """Run the recurrence; write gate/state caches into G, C, TC, H.

    XP: (T, 4H) input projections with biases already added.
    U:  (4H, H) stacked recurrent weights.
    """
    T, four_h = XP.shape
    n_h = four_h // 4
    h_prev = np.zeros(n_h, dtype=XP.dtype)
    c_prev = np.zeros(n_h, dtype=XP.dtype)
    for t in range(T):
        a = XP[t] + U @ h_prev
        i = _sigmoid(a[:n_h])
        f = _sigmoid(a[n_h : 2 * n_h])
        o = _sigmoid(a[2 * n_h : 3 * n_h])
        g = np.tanh(a[3 * n_h :])
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        G[t, :n_h] = i
        G[t, n_h : 2 * n_h] = f
        G[t, 2 * n_h : 3 * n_h] = o
        G[t, 3 * n_h :] = g
        C[t] = c
        TC[t] = tc
        H[t] = h
        h_prev, c_prev = h, c


def lstm_backward(d_h_last, G, C, TC, H, U, dA) -> None:
    """Backpropagate d_h_last (gradient at the final hidden state) through
    time; write gate pre-activation gradients into dA (T, 4H).

    Parameter and input gradients follow outside the kernel:
    dW = dA.T @ X, dU = dA[1:].T @ H[:-1], db = dA.sum(0), dX = dA @ W.
    """
    T, four_h = dA.shape
    n_h = four_h // 4
    dh = np.array(d_h_last, dtype=dA.dtype, copy=True)
    dc = np.zeros(n_h, dtype=dA.dtype)
    for t in range(T - 1, -1, -1):
        i = G[t, :n_h]
        f = G[t, n_h : 2 * n_h]
        o = G[t, 2 * n_h : 3 * n_h]
        g = G[t, 3 * n_h :]
        tc = TC[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        if t > 0:
            df = dc * C[t - 1]
        else:
            df = np.zeros(n_h, dtype=dA.dtype)
        dA[t, :n_h] = di * i * (1.0 - i)
        dA[t, n_h : 2 * n_h] = df * f * (1.0 - f)
        dA[t, 2 * n_h : 3 * n_h] = do * o * (1.0 - o)
        dA[t, 3 * n_h :] = dg * (1.0 - g * g)
        dh = U.T @ dA[t]
        dc = dc * f
