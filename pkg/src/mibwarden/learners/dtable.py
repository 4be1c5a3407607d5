"""Decision table majority classifier with best-first attribute subset search.

Attributes are discretised with MDL bins. A subset is scored by the leave-one-out
accuracy of the table it induces: each cell predicts the majority class of its
training records, and an emptied cell falls back to the global majority.
"""

from __future__ import annotations

import heapq

import numpy as np

from mibwarden.discretize import fit_mdl_bins
from mibwarden.learners._common import check_positive, class_counts, majority, params_dict, require_training_set
from mibwarden.model import DecisionTableCore, RuleModel


def _cells(B: np.ndarray, subset: tuple):
    if not subset:
        return np.zeros(B.shape[0], dtype=np.int64), np.zeros((1, 0), dtype=np.int64)
    keys, inverse = np.unique(B[:, list(subset)], axis=0, return_inverse=True)
    return inverse.reshape(-1), keys


def loo_accuracy(B: np.ndarray, y: np.ndarray, n_classes: int, subset: tuple) -> float:
    """Leave-one-out accuracy of the table over the binned attributes ``subset``."""
    n = y.size
    inverse, keys = _cells(B, subset)
    counts = np.zeros((keys.shape[0], n_classes), dtype=np.int64)
    np.add.at(counts, (inverse, y), 1)
    rows = np.arange(n)
    held = counts[inverse]
    held[rows, y] -= 1
    pred = held.argmax(axis=1)
    empty = held.sum(axis=1) == 0
    if empty.any():
        glob = np.tile(class_counts(y, n_classes), (int(empty.sum()), 1))
        glob[np.arange(glob.shape[0]), y[empty]] -= 1
        pred[empty] = glob.argmax(axis=1)
    return float(np.count_nonzero(pred == y)) / n


def _rank(score: float, subset: tuple):
    # Higher score first, then fewer attributes, then lower attribute indices.
    return (-score, len(subset), subset)


def best_first_search(B, y, n_classes, max_stale=5):
    """Return ``(subset, score)`` of the best subset found.

    Expansion pops the best open subset and scores each one-attribute extension.
    The search ends after ``max_stale`` consecutive expansions that fail to raise
    the best score.
    """
    d = B.shape[1]
    start = ()
    best = (start, loo_accuracy(B, y, n_classes, start))
    seen = {start}
    frontier = [_rank(best[1], start)]
    stale = 0
    while frontier and stale < max_stale:
        _, _, subset = heapq.heappop(frontier)
        improved = False
        for a in range(d):
            if a in subset:
                continue
            child = tuple(sorted(subset + (a,)))
            if child in seen:
                continue
            seen.add(child)
            score = loo_accuracy(B, y, n_classes, child)
            heapq.heappush(frontier, _rank(score, child))
            if score > best[1]:
                improved = True
            if _rank(score, child) < _rank(best[1], best[0]):
                best = (child, score)
        stale = 0 if improved else stale + 1
    return best


def train_decision_table(train, max_stale: int = 5, seed: int = 0) -> RuleModel:
    require_training_set(train)
    check_positive("max_stale", max_stale)
    k = len(train.classes)
    cuts = [fit_mdl_bins(train.X[:, a], train.y, a) for a in range(train.n_attributes)]
    B = np.column_stack([c.bins(train.X[:, a]) for a, c in enumerate(cuts)]) if cuts else np.zeros((len(train), 0), int)
    subset, score = best_first_search(B, train.y, k, max_stale)

    inverse, keys = _cells(B, subset)
    counts = np.zeros((keys.shape[0], k), dtype=np.int64)
    np.add.at(counts, (inverse, train.y), 1)
    table = {
        tuple(int(b) for b in key): train.classes[majority(row)]
        for key, row in zip(keys.tolist(), counts)
    }
    default = train.classes[majority(class_counts(train.y, k))]
    core = DecisionTableCore(tuple(subset), tuple(cuts[a] for a in subset), table, default)
    return RuleModel(
        "dtable", (), default, train.classes, train.names,
        params_dict(search="best_first", max_stale=max_stale, seed=seed, loo=repr(score)),
        table=core,
    )
