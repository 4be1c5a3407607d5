"""PART: rules read off partial C4.5 trees.

Each round grows a partial tree on the records not yet covered, turns its
largest expanded leaf into a rule and removes the records that rule covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from mibwarden.errors import ConfigError
from mibwarden.learners._common import (
    check_positive,
    class_counts,
    entropy,
    majority,
    params_dict,
    require_training_set,
    thresholds,
)
from mibwarden.model import Condition, Rule, RuleModel


def add_errs(n: float, e: float, cf: float) -> float:
    """Extra errors C4.5 adds to ``e`` observed errors out of ``n`` at confidence ``cf``."""
    if cf > 0.5:
        raise ConfigError("confidence factor must not exceed 0.5")
    if e < 1:
        base = n * (1.0 - cf ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (add_errs(n, 1.0, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1.0 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
    return r * n - e


@dataclass
class _Node:
    rows: np.ndarray
    counts: np.ndarray
    conds: tuple
    children: list = field(default_factory=list)
    expanded: bool = False

    @property
    def is_leaf(self) -> bool:
        return self.expanded and not self.children

    def leaf_estimate(self, cf: float) -> float:
        n = float(self.counts.sum())
        e = n - float(self.counts.max())
        return e + add_errs(n, e, cf)


class _PartialTree:
    def __init__(self, X, y, n_classes, confidence, min_leaf):
        self.X = X
        self.y = y
        self.k = n_classes
        self.cf = confidence
        self.min_leaf = min_leaf

    def best_split(self, rows):
        """C4.5 choice: highest gain ratio among attributes whose gain reaches the average."""
        n = rows.size
        min_split = min(25.0, max(float(self.min_leaf), 0.1 * n / self.k))
        y = self.y[rows]
        onehot = np.zeros((n, self.k), dtype=np.int64)
        onehot[np.arange(n), y] = 1
        base = float(entropy(class_counts(y, self.k)))
        candidates = []  # (attribute, threshold, gain, ratio)
        for a in range(self.X.shape[1]):
            t, left, total = thresholds(self.X[rows, a], onehot)
            if t.size == 0:
                continue
            nl = left.sum(axis=1).astype(np.float64)
            nr = n - nl
            ok = (nl >= min_split) & (nr >= min_split)
            if not ok.any():
                continue
            child = (nl * entropy(left) + nr * entropy(total - left)) / n
            gain = base - child - math.log2(t.size) / n
            gain = np.where(ok, gain, -np.inf)
            j = int(np.argmax(gain))
            if gain[j] <= 0:
                continue
            split_info = float(entropy(np.array([nl[j], nr[j]])))
            if split_info <= 0:
                continue
            candidates.append((a, float(t[j]), float(gain[j]), float(gain[j]) / split_info))
        if not candidates:
            return None
        avg = sum(c[2] for c in candidates) / len(candidates)
        best = None
        for c in candidates:
            if c[2] >= avg - 1e-3 and (best is None or c[3] > best[3]):
                best = c
        return best

    def expand(self, node: _Node) -> None:
        node.expanded = True
        rows = node.rows
        if np.count_nonzero(node.counts) <= 1 or rows.size < 2 * self.min_leaf:
            return
        split = self.best_split(rows)
        if split is None:
            return
        a, t, _, _ = split
        col = self.X[rows, a]
        children = []
        for op, side in (("<=", col <= t), (">", col > t)):
            sub = rows[side]
            children.append(_Node(sub, class_counts(self.y[sub], self.k), node.conds + (Condition(a, op, t),)))
        node.children = children
        # Expand the purest subset first; stop at the first child that stays a subtree.
        order = sorted(range(len(children)), key=lambda i: (float(entropy(children[i].counts)), i))
        for i in order:
            self.expand(children[i])
            if not children[i].is_leaf:
                return
        subtree = sum(ch.leaf_estimate(self.cf) for ch in children)
        if node.leaf_estimate(self.cf) <= subtree + 1e-9:
            node.children = []

    def largest_leaf(self, node: _Node):
        if node.is_leaf:
            return node
        best = None
        for ch in node.children:
            if not ch.expanded:
                continue
            leaf = self.largest_leaf(ch)
            if leaf is not None and (best is None or leaf.rows.size > best.rows.size):
                best = leaf
        return best


def train_part(train, confidence: float = 0.25, min_leaf: int = 2, seed: int = 0) -> RuleModel:
    require_training_set(train)
    if not (0.0 < confidence <= 0.5):
        raise ConfigError(f"confidence must lie in (0, 0.5], got {confidence}")
    check_positive("min_leaf", min_leaf)
    k = len(train.classes)
    builder = _PartialTree(train.X, train.y, k, confidence, min_leaf)
    rules = []
    remaining = np.arange(len(train))
    default = None
    while remaining.size:
        root = _Node(remaining, class_counts(train.y[remaining], k), ())
        builder.expand(root)
        leaf = builder.largest_leaf(root)
        cls = train.classes[majority(leaf.counts)]
        if not leaf.conds:
            default = cls
            break
        rules.append(Rule(leaf.conds, cls))
        keep = np.ones(remaining.size, dtype=bool)
        for c in leaf.conds:
            col = train.X[remaining, c.attribute]
            keep &= (col <= c.value) if c.op == "<=" else (col > c.value)
        remaining = remaining[~keep]
    if default is None:
        default = train.classes[majority(class_counts(train.y, k))]
    params = params_dict(confidence=confidence, min_leaf=min_leaf, seed=seed)
    return RuleModel("part", rules, default, train.classes, train.names, params)
