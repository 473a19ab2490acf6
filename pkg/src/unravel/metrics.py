"""Classification agreement metrics."""

from __future__ import annotations


def per_class_f1(reference, output, cls) -> float:
    """F1 for one class; a class absent from both sides scores 1.0."""
    tp = fp = fn = 0
    for ref, out in zip(reference, output):
        if out == cls and ref == cls:
            tp += 1
        elif out == cls:
            fp += 1
        elif ref == cls:
            fn += 1
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2.0 * precision * recall / (precision + recall)


def macro_f1(reference, output, classes) -> float:
    """Unweighted mean of per-class F1 over the given classes."""
    if len(reference) != len(output):
        raise ValueError("reference and output lengths differ")
    if not classes:
        raise ValueError("class list is empty")
    known = set(classes)
    stray = {c for c in reference if c not in known}
    stray |= {c for c in output if c not in known}
    if stray:
        raise ValueError(f"labels outside the class list: {sorted(stray)[:3]}")
    return sum(per_class_f1(reference, output, c) for c in classes) / len(classes)


def confusion_matrix(reference, output, classes) -> dict:
    """counts[(reference class, output class)] over all pairs."""
    counts = {(r, o): 0 for r in classes for o in classes}
    for ref, out in zip(reference, output):
        counts[(ref, out)] += 1
    return counts
