# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False
"""Compiled LSTM recurrence kernel.

Same contract and gate layout as the numpy twin in ``_lstm_np``; see that
module for the interface documentation. Supports float32 and float64
buffers via a fused type so the finite-difference oracle can run the
compiled path in full precision.
"""

from libc.math cimport exp, tanh

import numpy as np


ctypedef fused real:
    float
    double


cdef inline real _sigmoid(real x) noexcept nogil:
    return <real>(1.0 / (1.0 + exp(-<double>x)))


def lstm_forward(real[:, ::1] XP, real[:, ::1] U,
                 real[:, ::1] G, real[:, ::1] C,
                 real[:, ::1] TC, real[:, ::1] H):
    cdef Py_ssize_t T = XP.shape[0]
    cdef Py_ssize_t four_h = XP.shape[1]
    cdef Py_ssize_t n_h = four_h // 4
    cdef Py_ssize_t t, r, k
    cdef double acc
    cdef real i, f, o, g, c, tc

    with nogil:
        for t in range(T):
            # pre-activations: XP[t] + U @ h_prev, written into G[t]
            for r in range(four_h):
                acc = XP[t, r]
                if t > 0:
                    for k in range(n_h):
                        acc += U[r, k] * H[t - 1, k]
                G[t, r] = <real>acc
            for k in range(n_h):
                i = _sigmoid(G[t, k])
                f = _sigmoid(G[t, n_h + k])
                o = _sigmoid(G[t, 2 * n_h + k])
                g = <real>tanh(<double>G[t, 3 * n_h + k])
                if t > 0:
                    c = f * C[t - 1, k] + i * g
                else:
                    c = i * g
                tc = <real>tanh(<double>c)
                G[t, k] = i
                G[t, n_h + k] = f
                G[t, 2 * n_h + k] = o
                G[t, 3 * n_h + k] = g
                C[t, k] = c
                TC[t, k] = tc
                H[t, k] = o * tc


def lstm_backward(real[::1] d_h_last, real[:, ::1] G, real[:, ::1] C,
                  real[:, ::1] TC, real[:, ::1] H, real[:, ::1] U,
                  real[:, ::1] dA):
    cdef Py_ssize_t T = dA.shape[0]
    cdef Py_ssize_t four_h = dA.shape[1]
    cdef Py_ssize_t n_h = four_h // 4
    cdef Py_ssize_t t, r, k
    cdef double acc
    cdef real i, f, o, g, tc, dck, do, di, dg, df

    dh_arr = np.empty(n_h, dtype=np.asarray(d_h_last).dtype)
    dc_arr = np.zeros(n_h, dtype=np.asarray(d_h_last).dtype)
    cdef real[::1] dh = dh_arr
    cdef real[::1] dc = dc_arr

    with nogil:
        for k in range(n_h):
            dh[k] = d_h_last[k]
        for t in range(T - 1, -1, -1):
            for k in range(n_h):
                i = G[t, k]
                f = G[t, n_h + k]
                o = G[t, 2 * n_h + k]
                g = G[t, 3 * n_h + k]
                tc = TC[t, k]
                do = dh[k] * tc
                dck = dc[k] + dh[k] * o * (<real>1.0 - tc * tc)
                di = dck * g
                dg = dck * i
                if t > 0:
                    df = dck * C[t - 1, k]
                else:
                    df = <real>0.0
                dA[t, k] = di * i * (<real>1.0 - i)
                dA[t, n_h + k] = df * f * (<real>1.0 - f)
                dA[t, 2 * n_h + k] = do * o * (<real>1.0 - o)
                dA[t, 3 * n_h + k] = dg * (<real>1.0 - g * g)
                dc[k] = dck * f
            for k in range(n_h):
                acc = 0.0
                for r in range(four_h):
                    acc += U[r, k] * dA[t, r]
                dh[k] = <real>acc
