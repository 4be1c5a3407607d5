import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mibwarden.dataset import TRAFFIC_CLASSES
from mibwarden.errors import DataFormatError
from mibwarden.evaluation import (
    ConfusionMatrix,
    accuracy,
    class_metrics,
    compare,
    confusion,
    dump_json,
    evaluate,
    f_measure,
    from_predictions,
    report_from_matrix,
)
from mibwarden.learners import LEARNER_ORDER, train

from conftest import make_dataset
from oracles import matrix_pairs, pair_counting_metrics


def random_matrix(rng, max_total=400):
    total = int(rng.integers(1, max_total + 1))
    weights = rng.dirichlet(np.full(64, 0.3))
    counts = rng.multinomial(total, weights).reshape(8, 8)
    return ConfusionMatrix(TRAFFIC_CLASSES, counts)


class TestClassMetrics:
    def test_identity(self):
        cm = ConfusionMatrix(("Normal", "Attack"), [[1, 0], [0, 0]])
        m = class_metrics(cm, "Normal")
        assert (m.precision, m.recall, m.f_measure) == (1.0, 1.0, 1.0)

    def test_f_of_point_eight_and_point_six(self):
        assert f_measure(0.8, 0.6) == pytest.approx(0.685714285714, abs=1e-12)
        assert f_measure(0.8, 0.6) == pytest.approx(2 * 0.48 / 1.4, abs=1e-15)

    def test_absent_class_is_all_zero(self):
        counts = np.zeros((8, 8), dtype=int)
        counts[0, 0] = 5
        m = class_metrics(ConfusionMatrix(TRAFFIC_CLASSES, counts), "BruteForce")
        assert (m.tp, m.fp, m.fn, m.precision, m.recall, m.f_measure) == (0, 0, 0, 0.0, 0.0, 0.0)
        assert m.tn == 5

    def test_false_negative_lives_in_the_actual_row(self):
        # Actual Normal predicted Attack is a false negative for Normal.
        cm = ConfusionMatrix(("Normal", "Attack"), [[3, 1], [2, 4]])
        m = class_metrics(cm, "Normal")
        assert (m.tp, m.fn, m.fp, m.tn) == (3, 1, 2, 4)
        assert m.recall == 0.75 and m.precision == 0.6

    def test_against_pair_counting(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            cm = random_matrix(rng)
            oracle = pair_counting_metrics(matrix_pairs(cm.counts), 8)
            for c in range(8):
                m = class_metrics(cm, c)
                got = (m.tp, m.fp, m.fn, m.tn, m.precision, m.recall, m.f_measure)
                want = oracle[c]
                assert got[:4] == want[:4]
                np.testing.assert_allclose(got[4:], want[4:], rtol=0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_metric_identities(seed):
    cm = random_matrix(np.random.default_rng(seed))
    ms = [class_metrics(cm, c) for c in range(8)]
    assert sum(m.tp for m in ms) == np.trace(cm.counts)
    assert sum(m.tp + m.fn for m in ms) == cm.total
    micro_p = sum(m.tp for m in ms) / sum(m.tp + m.fp for m in ms)
    micro_r = sum(m.tp for m in ms) / sum(m.tp + m.fn for m in ms)
    assert abs(micro_p - accuracy(cm)) <= 1e-12 and abs(micro_r - accuracy(cm)) <= 1e-12
    for m in ms:
        assert 0 <= m.precision <= 1 and 0 <= m.recall <= 1 and 0 <= m.f_measure <= 1
        assert m.f_measure <= max(m.precision, m.recall) + 1e-15
        if m.precision == m.recall:
            assert m.f_measure == pytest.approx(m.precision, abs=1e-15)
        assert m.tp + m.fp + m.fn + m.tn == cm.total


class TestAccuracy:
    def test_diagonal(self):
        assert accuracy(ConfusionMatrix(TRAFFIC_CLASSES, np.diag(np.arange(1, 9)))) == 1.0

    def test_one_miss_in_1500(self):
        counts = np.zeros((8, 8), dtype=int)
        counts[1, 1] = 1499
        counts[1, 2] = 1
        assert accuracy(ConfusionMatrix(TRAFFIC_CLASSES, counts)) == pytest.approx(1499 / 1500, abs=1e-15)

    def test_empty_matrix_raises(self):
        with pytest.raises(ValueError):
            accuracy(ConfusionMatrix(TRAFFIC_CLASSES, np.zeros((8, 8), dtype=int)))


class TestConfusion:
    def test_zeror_on_test_split(self, corpus_split):
        train_ds, test_ds = corpus_split
        cm = confusion(train("zeror", train_ds), test_ds)
        tcp = TRAFFIC_CLASSES.index("TcpSyn")
        assert np.count_nonzero(cm.counts.sum(axis=0)) == 1
        assert cm.counts[:, tcp].sum() == 1500
        assert cm.counts[tcp, tcp] == 288
        assert accuracy(cm) == 288 / 1500 == 0.192

    def test_perfect_predictions_are_diagonal(self, corpus_split):
        _, test_ds = corpus_split
        cm = from_predictions(test_ds.classes, test_ds.y, test_ds.y)
        assert np.array_equal(np.diag(cm.counts), [180, 288, 232, 190, 172, 234, 144, 60])
        assert cm.counts.sum() == np.trace(cm.counts)

    def test_empty_test_set(self):
        ds = make_dataset(np.zeros((3, 1)), [0, 1, 1])
        model = train("zeror", ds)
        cm = confusion(model, make_dataset(np.zeros((0, 1)), []))
        assert cm.total == 0 and not cm.counts.any()

    def test_unlabeled_rejected(self):
        ds = make_dataset(np.zeros((3, 1)), [0, 1, 1])
        with pytest.raises(DataFormatError):
            confusion(train("zeror", ds), make_dataset(np.zeros((2, 1)), [-1, -1]))


def report(learner, acc_correct, f_override=None):
    """Two-class report with ``acc_correct`` of 10 right."""
    counts = np.array([[acc_correct, 10 - acc_correct], [0, 0]])
    r = report_from_matrix(learner, ConfusionMatrix(("Normal", "Attack"), counts))
    if f_override is not None:
        object.__setattr__(r, "weighted_f", f_override)
    return r


class TestCompare:
    def test_single(self):
        assert [r.learner_id for r in compare([report("part", 9)])] == ["part"]

    def test_accuracy_first(self):
        ranked = compare([report("zeror", 5), report("part", 9), report("oner", 7)])
        assert [r.learner_id for r in ranked] == ["part", "oner", "zeror"]

    def test_weighted_f_breaks_accuracy_ties(self):
        ranked = compare([report("jrip", 8, 0.5), report("dtable", 8, 0.7)])
        assert [r.learner_id for r in ranked] == ["dtable", "jrip"]

    def test_canonical_order_last(self):
        ranked = compare([report(lid, 8) for lid in reversed(LEARNER_ORDER)])
        assert [r.learner_id for r in ranked] == list(LEARNER_ORDER)

    def test_zeror_last_on_separable_data(self, corpus_split):
        train_ds, test_ds = corpus_split
        reports = [evaluate(train(lid, train_ds), test_ds) for lid in LEARNER_ORDER]
        assert compare(reports)[-1].learner_id == "zeror"


def test_report_json_keys(corpus_split):
    train_ds, test_ds = corpus_split
    rep = evaluate(train("oner", train_ds), test_ds, seed=1)
    doc = json.loads(dump_json(rep.to_dict()))
    assert set(doc) == {"learner", "protocol", "dataset", "seed", "records", "accuracy",
                        "weighted", "per_class", "confusion"}
    assert list(doc["per_class"]) == list(TRAFFIC_CLASSES)
    assert doc["records"] == 1500
    support = np.array(doc["confusion"]["counts"]).sum(axis=1)
    recall = np.array([doc["per_class"][c]["recall"] for c in TRAFFIC_CLASSES])
    assert doc["weighted"]["recall"] == pytest.approx(float(support @ recall) / support.sum(), abs=1e-12)
    # Weighted recall collapses to accuracy.
    assert doc["weighted"]["recall"] == pytest.approx(doc["accuracy"], abs=1e-12)
    assert "train_seconds" in rep.to_dict(timings=True)
