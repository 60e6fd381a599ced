"""Clustering accuracy, normalized mutual information and classification accuracy."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .datio import LabelVector


class MetricError(ValueError):
    pass


def _labels(x):
    if isinstance(x, LabelVector):
        return x.labels
    return np.asarray(x, dtype=np.int64)


def contingency_table(pred, truth) -> np.ndarray:
    """Counts of (predicted cluster, true class) pairs, ids compacted to 0..k-1."""
    p, t = _labels(pred), _labels(truth)
    if p.shape != t.shape:
        raise MetricError(f"length mismatch: {p.size} predictions vs {t.size} labels")
    _, p_idx = np.unique(p, return_inverse=True)
    _, t_idx = np.unique(t, return_inverse=True)
    table = np.zeros((p_idx.max() + 1, t_idx.max() + 1), dtype=np.int64)
    np.add.at(table, (p_idx, t_idx), 1)
    return table


def clustering_accuracy(pred, truth) -> float:
    """Fraction of samples correct under the best one-to-one cluster/class matching."""
    table = contingency_table(pred, truth)
    size = max(table.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum()) / float(table.sum())


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth, average="geometric") -> float:
    """Normalized mutual information (natural log).

    ``average="geometric"`` divides by ``sqrt(H(pred) H(truth))``;
    ``"arithmetic"`` by their mean. Returns 0 when either entropy is 0.
    """
    table = contingency_table(pred, truth).astype(np.float64)
    n = table.sum()
    hp = _entropy(table.sum(axis=1), n)
    ht = _entropy(table.sum(axis=0), n)
    if hp == 0.0 or ht == 0.0:
        return 0.0
    joint = table / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / n**2
    nz = joint > 0
    mi = float((joint[nz] * np.log(joint[nz] / outer[nz])).sum())
    if average == "geometric":
        denom = np.sqrt(hp * ht)
    elif average == "arithmetic":
        denom = 0.5 * (hp + ht)
    else:
        raise MetricError(f"unknown NMI normalization {average!r}")
    return float(min(max(mi / denom, 0.0), 1.0))


def classification_accuracy(pred, truth, eval_mask) -> float:
    """Accuracy over the samples selected by ``eval_mask``."""
    p, t = _labels(pred), _labels(truth)
    mask = np.asarray(eval_mask, dtype=bool)
    if not (p.shape == t.shape == mask.shape):
        raise MetricError("pred, truth and eval_mask must have equal lengths")
    if not mask.any():
        raise MetricError("evaluation mask selects no samples")
    return float(np.mean(p[mask] == t[mask]))
