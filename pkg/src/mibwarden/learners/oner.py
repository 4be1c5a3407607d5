"""OneR: the best single-attribute bucket rule."""

import numpy as np

from mibwarden.discretize import fit_oner_buckets
from mibwarden.errors import DataFormatError
from mibwarden.learners._common import (
    check_positive,
    class_counts,
    majority,
    params_dict,
    require_training_set,
)
from mibwarden.model import Condition, Rule, RuleModel


def bucket_rule(col, y, n_classes, min_bucket, attribute_index=0):
    """Buckets for one attribute, the majority class per bin, and the training error count."""
    cuts = fit_oner_buckets(col, y, min_bucket, attribute_index)
    bins = cuts.bins(col)
    table = np.zeros((cuts.n_bins, n_classes), dtype=np.int64)
    np.add.at(table, (bins, y), 1)
    labels = table.argmax(axis=1)
    errors = int(len(y) - table.max(axis=1).sum())
    return cuts, labels, table.sum(axis=1), errors


def train_oner(train, min_bucket: int = 6) -> RuleModel:
    require_training_set(train)
    check_positive("min_bucket", min_bucket)
    if train.n_attributes == 0:
        raise DataFormatError("OneR needs at least one attribute")
    k = len(train.classes)
    best = None
    for a in range(train.n_attributes):
        fitted = bucket_rule(train.X[:, a], train.y, k, min_bucket, a)
        if best is None or fitted[3] < best[1][3]:
            best = (a, fitted)
    a, (cuts, labels, sizes, errors) = best
    rules = tuple(
        Rule((Condition(a, "bin", b),), train.classes[int(labels[b])])
        for b in range(cuts.n_bins)
        if sizes[b] > 0
    )
    default = train.classes[majority(class_counts(train.y, k))]
    return RuleModel(
        "oner", rules, default, train.classes, train.names,
        params_dict(min_bucket=min_bucket), {a: cuts},
    )
