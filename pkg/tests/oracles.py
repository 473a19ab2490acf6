"""Independent reference implementations used as test oracles.

Everything here is deliberately written in the most direct way possible
(scalar math, brute-force enumeration, stdlib statistics) so that it
shares no code path with the package being tested.
"""

from __future__ import annotations

import itertools
import math
import statistics

import numpy as np


# ---------------------------------------------------------------- gradients
def finite_difference_input_grads(model, X, target, step=1e-3):
    """Central-difference d logit[target] / dX on every coordinate."""
    X = np.array(X, dtype=np.float64)
    out = np.zeros_like(X)
    for t in range(X.shape[0]):
        for j in range(X.shape[1]):
            plus = X.copy()
            plus[t, j] += step
            minus = X.copy()
            minus[t, j] -= step
            f_plus = model.forward_embedded(plus).logits[target]
            f_minus = model.forward_embedded(minus).logits[target]
            out[t, j] = (f_plus - f_minus) / (2.0 * step)
    return out


def relative_errors(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-8)
    return np.abs(a - b) / denom


def hand_lstm_step(x, p):
    """One scalar LSTM step from a dict of scalar parameters."""

    def sig(z):
        return 1.0 / (1.0 + math.exp(-z))

    i = sig(p["W_i"] * x + p["b_i"])
    f = sig(p["W_f"] * x + p["b_f"])
    o = sig(p["W_o"] * x + p["b_o"])
    g = math.tanh(p["W_c"] * x + p["b_c"])
    c = i * g  # c_prev = 0
    h = o * math.tanh(c)
    return h, c


# ---------------------------------------------------------------- skipgrams
def brute_force_skipgram_indices(length, max_len=4, max_skip=2):
    """All index subsets with size ≤ max_len and span − size ≤ max_skip."""
    found = []
    for size in range(1, max_len + 1):
        for combo in itertools.combinations(range(length), size):
            span = combo[-1] - combo[0] + 1
            if span - size <= max_skip:
                found.append(combo)
    return found


# ------------------------------------------------------------- tree metrics
def entropy(labels) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    seen: dict = {}
    for lab in labels:
        seen[lab] = seen.get(lab, 0) + 1
    total = 0.0
    for count in seen.values():
        p = count / n
        total -= p * math.log2(p)
    return total


def info_gain(rows, labels, attr) -> float:
    base = entropy(labels)
    n = len(labels)
    groups: dict = {}
    for row, lab in zip(rows, labels):
        groups.setdefault(row[attr], []).append(lab)
    remainder = sum(len(g) / n * entropy(g) for g in groups.values())
    return base - remainder


def split_info(rows, attr) -> float:
    n = len(rows)
    groups: dict = {}
    for row in rows:
        groups[row[attr]] = groups.get(row[attr], 0) + 1
    total = 0.0
    for count in groups.values():
        p = count / n
        total -= p * math.log2(p)
    return total


def gain_ratio_argmax(rows, labels, attrs):
    """C4.5 split choice: best gain ratio among attributes whose gain
    reaches the mean positive gain; None when nothing is splittable.

    Ties broken by lexicographically smallest attribute to mirror the
    package's determinism rule.
    """
    gains = {a: info_gain(rows, labels, a) for a in attrs}
    splittable = [a for a in attrs if split_info(rows, a) > 0.0]
    if not splittable:
        return None
    positive = [g for g in gains.values() if g > 0.0]
    threshold = sum(positive) / len(positive) if positive else 0.0
    eligible = [a for a in splittable if gains[a] >= threshold - 1e-12]
    if not eligible:
        return None
    best = None
    best_ratio = -math.inf
    for a in sorted(eligible):
        ratio = gains[a] / split_info(rows, a)
        if ratio > best_ratio + 1e-12:
            best = a
            best_ratio = ratio
    return best


def add_errs_reference(n: float, e: float, cf: float) -> float:
    """C4.5 pessimistic additional-error count, written independently
    from the package, following Quinlan's AddErrs piecewise definition."""
    if cf >= 1.0:
        return 0.0
    if e < 1e-9:
        return n * (1.0 - cf ** (1.0 / n))
    if e < 0.9999:
        v0 = n * (1.0 - cf ** (1.0 / n))
        return v0 + e * (add_errs_reference(n, 1.0, cf) - v0)
    if e + 0.5 >= n:
        return 0.67 * (n - e)
    z = statistics.NormalDist().inv_cdf(1.0 - cf)
    f = (e + 0.5) / n
    pr = (
        f
        + z * z / (2.0 * n)
        + z * math.sqrt(f / n - f * f / n + z * z / (4.0 * n * n))
    ) / (1.0 + z * z / n)
    return pr * n - e


# ------------------------------------------------------------------ metrics
def macro_f1_reference(reference, output, classes) -> float:
    """Unweighted mean F1; a class missing from both sides scores 1."""
    scores = []
    for cls in classes:
        tp = sum(1 for r, o in zip(reference, output) if r == cls and o == cls)
        fp = sum(1 for r, o in zip(reference, output) if r != cls and o == cls)
        fn = sum(1 for r, o in zip(reference, output) if r == cls and o != cls)
        if tp == fp == fn == 0:
            scores.append(1.0)
        elif tp == 0:
            scores.append(0.0)
        else:
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            scores.append(2 * precision * recall / (precision + recall))
    return sum(scores) / len(scores)
