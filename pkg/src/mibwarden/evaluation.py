"""Confusion matrices and the per-class metrics and learner rankings derived from them.

Multiclass results reduce one-vs-rest per class. For class ``c`` a record that is
actually ``c`` but predicted otherwise is a false negative; one predicted ``c`` but
actually something else is a false positive. Any 0/0 ratio is reported as 0.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from mibwarden.learners import LEARNER_ORDER


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are actual classes, columns predicted classes, both in ``classes`` order."""

    classes: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.classes)
        if counts.shape != (k, k):
            raise ValueError(f"confusion counts must be {k}x{k}")
        if np.any(counts < 0):
            raise ValueError("confusion counts must be non-negative")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.classes == other.classes and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True)
class ClassMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f_measure: float


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def f_measure(precision: float, recall: float) -> float:
    return _ratio(2.0 * precision * recall, precision + recall)


def from_predictions(classes, actual, predicted) -> ConfusionMatrix:
    k = len(classes)
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (np.asarray(actual, dtype=np.int64), np.asarray(predicted, dtype=np.int64)), 1)
    return ConfusionMatrix(tuple(classes), counts)


def confusion(model, test) -> ConfusionMatrix:
    model.check(test)
    test.require_labeled()
    if tuple(model.classes) != tuple(test.classes):
        raise ValueError("model and dataset disagree on the class list")
    return from_predictions(test.classes, test.y, model.predict_dataset(test))


def class_metrics(cm: ConfusionMatrix, c) -> ClassMetrics:
    i = cm.classes.index(c) if isinstance(c, str) else int(c)
    tp = int(cm.counts[i, i])
    fn = int(cm.counts[i, :].sum()) - tp
    fp = int(cm.counts[:, i].sum()) - tp
    tn = cm.total - tp - fp - fn
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    return ClassMetrics(tp, fp, fn, tn, precision, recall, f_measure(precision, recall))


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix is undefined")
    return float(np.trace(cm.counts)) / cm.total


@dataclass(frozen=True, eq=False)
class EvalReport:
    learner_id: str
    per_class: dict
    accuracy: float
    weighted_precision: float
    weighted_recall: float
    weighted_f: float
    matrix: ConfusionMatrix
    train_time: float = 0.0
    test_time: float = 0.0
    seed: int | None = None
    provenance: str = ""
    protocol: str = "holdout"
    extras: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "learner": self.learner_id,
            "protocol": self.protocol,
            "dataset": self.provenance,
            "seed": self.seed,
            "records": self.matrix.total,
            "accuracy": self.accuracy,
            "weighted": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f_measure": self.weighted_f,
            },
            "per_class": {
                c: {
                    "tp": m.tp, "fp": m.fp, "fn": m.fn, "tn": m.tn,
                    "precision": m.precision, "recall": m.recall, "f_measure": m.f_measure,
                }
                for c, m in self.per_class.items()
            },
            "confusion": {"classes": list(self.matrix.classes), "counts": self.matrix.counts.tolist()},
        }
        if timings:
            out["train_seconds"] = self.train_time
            out["test_seconds"] = self.test_time
        return out


def report_from_matrix(learner_id, cm: ConfusionMatrix, **kwargs) -> EvalReport:
    per_class = {c: class_metrics(cm, i) for i, c in enumerate(cm.classes)}
    support = cm.counts.sum(axis=1).astype(np.float64)
    total = support.sum()

    def weighted(attr):
        return float(sum(s * getattr(per_class[c], attr) for s, c in zip(support, cm.classes)) / total) if total else 0.0

    return EvalReport(
        learner_id,
        per_class,
        accuracy(cm) if cm.total else 0.0,
        weighted("precision"),
        weighted("recall"),
        weighted("f_measure"),
        cm,
        **kwargs,
    )


def evaluate(model, test, train_time: float = 0.0, seed=None, protocol="holdout") -> EvalReport:
    start = time.perf_counter()
    cm = confusion(model, test)
    elapsed = time.perf_counter() - start
    return report_from_matrix(
        model.learner_id, cm, train_time=train_time, test_time=elapsed,
        seed=seed, provenance=test.provenance, protocol=protocol,
    )


def _learner_rank(learner_id):
    return LEARNER_ORDER.index(learner_id) if learner_id in LEARNER_ORDER else len(LEARNER_ORDER)


def compare(reports) -> list:
    """Order reports by accuracy, then weighted F, then canonical learner order."""
    return sorted(reports, key=lambda r: (-r.accuracy, -r.weighted_f, _learner_rank(r.learner_id), r.learner_id))


def format_metrics_table(reports, metric: str) -> str:
    """One row per class, one column per learner, values of ``metric`` (precision, recall, f_measure)."""
    reports = list(reports)
    classes = reports[0].matrix.classes if reports else ()
    width = max([len(c) for c in classes] + [len("weighted")])
    head = "class".ljust(width) + "".join(f"{r.learner_id:>9}" for r in reports)
    lines = [head, "-" * len(head)]
    for c in classes:
        lines.append(c.ljust(width) + "".join(f"{getattr(r.per_class[c], metric):9.4f}" for r in reports))
    key = {"precision": "weighted_precision", "recall": "weighted_recall", "f_measure": "weighted_f"}[metric]
    lines.append("weighted".ljust(width) + "".join(f"{getattr(r, key):9.4f}" for r in reports))
    return "\n".join(lines)


def format_ranking(ranked, timings: bool = True) -> str:
    lines = [f"{'rank':<5}{'learner':<9}{'accuracy':>10}{'weighted F':>12}" + ("   train s   test s" if timings else "")]
    for i, r in enumerate(ranked, start=1):
        line = f"{i:<5}{r.learner_id:<9}{r.accuracy:10.4f}{r.weighted_f:12.4f}"
        if timings:
            line += f"{r.train_time:10.3f}{r.test_time:9.3f}"
        lines.append(line)
    return "\n".join(lines)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
