"""Supervised binning of numeric attributes for OneR and the decision table."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BinCuts:
    """``k`` strictly increasing cuts define ``k + 1`` bins; bin ``b`` is (cut[b-1], cut[b]]."""

    attribute_index: int
    cuts: tuple = ()

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cuts)
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError("cuts must be strictly increasing")
        object.__setattr__(self, "cuts", cuts)

    @property
    def n_bins(self) -> int:
        return len(self.cuts) + 1

    def bins(self, values) -> np.ndarray:
        """Vectorised :func:`bin_of`."""
        return np.searchsorted(np.asarray(self.cuts), np.asarray(values, dtype=np.float64), side="left")


def bin_of(cuts: BinCuts, value: float) -> int:
    return bisect.bisect_left(cuts.cuts, value)


def _sorted_pairs(values, labels):
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if values.size == 0:
        raise ValueError("cannot fit bins on an empty attribute")
    order = np.lexsort((labels, values))
    return values[order], labels[order]


def fit_oner_buckets(values, labels, min_bucket: int = 6, attribute_index: int = 0) -> BinCuts:
    """Holte's greedy bucketing.

    A bucket closes once its majority class has ``min_bucket`` members and the next
    instance neither shares that class nor repeats the last value. Neighbouring buckets
    with the same majority are then merged.
    """
    if min_bucket < 1:
        raise ValueError("min_bucket must be at least 1")
    v, y = _sorted_pairs(values, labels)
    n = v.size
    n_classes = int(y.max()) + 1

    buckets = []  # (end position exclusive, majority class)
    i = 0
    while i < n:
        counts = np.zeros(n_classes, dtype=np.int64)
        while i < n and counts.max() < min_bucket:
            counts[y[i]] += 1
            i += 1
        majority = int(np.argmax(counts))
        while i < n and (y[i] == majority or v[i] == v[i - 1]):
            counts[y[i]] += 1
            i += 1
            majority = int(np.argmax(counts))
        buckets.append((i, majority))

    cuts = []
    for (end, cls), (_, next_cls) in zip(buckets, buckets[1:]):
        if cls != next_cls:
            cuts.append((v[end - 1] + v[end]) / 2.0)
    return BinCuts(attribute_index, tuple(cuts))


def _entropy(counts: np.ndarray) -> np.ndarray:
    """Row-wise class entropy in bits of a count matrix (or vector)."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, counts / total, 0.0)
        logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logs).sum(axis=-1)


def _mdl_split(v: np.ndarray, y: np.ndarray, n_classes: int):
    """Best boundary cut of a sorted slice, or ``None`` when MDL rejects every split."""
    n = v.size
    if n < 2:
        return None
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y] = 1
    left = np.cumsum(onehot, axis=0)[:-1]  # left[i] = counts of v[:i+1]
    total = left[-1] + onehot[-1]
    right = total - left

    # Candidate positions: between distinct values, skipping spots where both
    # neighbouring value groups are pure in the same class.
    distinct = v[1:] != v[:-1]
    if not distinct.any():
        return None
    group_start = np.concatenate(([0], np.flatnonzero(distinct) + 1))
    group_end = np.concatenate((group_start[1:], [n]))
    pure_class = np.full(group_start.size, -1)
    for g, (a, b) in enumerate(zip(group_start, group_end)):
        cls = np.unique(y[a:b])
        if cls.size == 1:
            pure_class[g] = cls[0]
    boundary = ~((pure_class[:-1] >= 0) & (pure_class[:-1] == pure_class[1:]))
    positions = group_end[:-1][boundary] - 1  # last index of the left part
    if positions.size == 0:
        return None

    nl = positions + 1.0
    nr = n - nl
    ent_l = _entropy(left[positions])
    ent_r = _entropy(right[positions])
    weighted = (nl * ent_l + nr * ent_r) / n
    best = int(np.argmin(weighted))  # argmin returns the leftmost tie
    pos = int(positions[best])

    ent_s = float(_entropy(total))
    gain = ent_s - float(weighted[best])
    k = int(np.count_nonzero(total))
    k1 = int(np.count_nonzero(left[pos]))
    k2 = int(np.count_nonzero(right[pos]))
    delta = math.log2(3**k - 2) - (k * ent_s - k1 * float(ent_l[best]) - k2 * float(ent_r[best]))
    if gain <= (math.log2(n - 1) + delta) / n:
        return None
    return pos


def fit_mdl_bins(values, labels, attribute_index: int = 0) -> BinCuts:
    """Fayyad-Irani recursive entropy splitting with the MDL stopping rule."""
    v, y = _sorted_pairs(values, labels)
    n_classes = int(y.max()) + 1
    cuts = []
    stack = [(0, v.size)]
    while stack:
        lo, hi = stack.pop()
        pos = _mdl_split(v[lo:hi], y[lo:hi], n_classes)
        if pos is None:
            continue
        split = lo + pos + 1
        cuts.append((v[split - 1] + v[split]) / 2.0)
        stack.append((lo, split))
        stack.append((split, hi))
    return BinCuts(attribute_index, tuple(sorted(cuts)))
