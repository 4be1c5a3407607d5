from __future__ import annotations

import numpy as np

from mibwarden.errors import ConfigError, DataFormatError


def require_training_set(train):
    if len(train) == 0:
        raise DataFormatError("training set is empty")
    train.require_labeled()


def majority(counts) -> int:
    """Index of the largest count; ties go to the lowest (canonical) class index."""
    return int(np.argmax(counts))


def class_counts(y: np.ndarray, n_classes: int) -> np.ndarray:
    return np.bincount(y, minlength=n_classes)


def entropy(counts) -> np.ndarray:
    """Class entropy in bits, row-wise over the last axis."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, counts / total, 0.0)
        logs = np.log2(np.where(p > 0, p, 1.0))
    return -(p * logs).sum(axis=-1)


def thresholds(col: np.ndarray, onehot: np.ndarray):
    """Midpoint thresholds between sorted distinct values and class counts at or below each.

    Returns ``(t, left, total)`` where ``left[j]`` holds the per-class counts of
    ``col <= t[j]``.
    """
    order = np.argsort(col, kind="stable")
    v = col[order]
    cum = np.cumsum(onehot[order], axis=0)
    pos = np.flatnonzero(v[1:] != v[:-1])
    t = (v[pos] + v[pos + 1]) / 2.0
    # Adjacent floats can round the midpoint up onto the right value.
    t = np.where(t >= v[pos + 1], v[pos], t)
    return t, cum[pos], cum[-1] if len(cum) else np.zeros(onehot.shape[1], dtype=np.int64)


def params_dict(**params) -> dict:
    return {k: str(v) for k, v in params.items()}


def check_positive(name, value, minimum=1):
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")
