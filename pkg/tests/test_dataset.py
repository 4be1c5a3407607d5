import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mibwarden.dataset import (
    CORPUS_COUNTS,
    TRAFFIC_CLASSES,
    Dataset,
    MibRecord,
    class_histogram,
    load_csv,
    parse_class,
    relabel_binary,
    stratified_split,
    write_csv,
)
from mibwarden.errors import ConfigError, DataFormatError

from conftest import make_dataset


def csv_bytes(text):
    return io.BytesIO(text.encode("utf-8"))


def corpus_mix_dataset():
    y = np.concatenate([np.full(n, TRAFFIC_CLASSES.index(c)) for c, n in CORPUS_COUNTS.items()])
    X = np.arange(y.size, dtype=float).reshape(-1, 1)
    return make_dataset(X, y)


class TestLoadCsv:
    def test_minimal(self):
        ds = load_csv(csv_bytes("a,b,class\n1.0,2.0,Normal\n"))
        assert len(ds) == 1
        assert ds.names == ("a", "b")
        assert ds.records[0] == MibRecord((1.0, 2.0), "Normal")

    def test_unparseable_numeric_names_column(self):
        with pytest.raises(DataFormatError, match="column b") as err:
            load_csv(csv_bytes("a,b,class\n1.0,x,Normal\n"))
        assert err.value.line == 2

    def test_arity_mismatch_reports_line(self):
        with pytest.raises(DataFormatError) as err:
            load_csv(csv_bytes("a,b,class\n1,2,Normal\n1,2\n"))
        assert err.value.line == 3

    def test_unknown_label(self):
        with pytest.raises(DataFormatError, match="unknown class"):
            load_csv(csv_bytes("a,class\n1,Portscan\n"))

    @pytest.mark.parametrize("text", ["", "\n\n"])
    def test_empty_file(self, text):
        with pytest.raises(DataFormatError, match="empty"):
            load_csv(csv_bytes(text))

    def test_missing_value_rejected(self):
        with pytest.raises(DataFormatError, match="missing value at column a"):
            load_csv(csv_bytes("a,b,class\n,2,Normal\n"))

    @pytest.mark.parametrize("cell", ["-1", "inf", "nan"])
    def test_non_counter_values_rejected(self, cell):
        with pytest.raises(DataFormatError):
            load_csv(csv_bytes(f"a,class\n{cell},Normal\n"))

    @pytest.mark.parametrize(
        "label, expected",
        [
            ("TCP-SYN", "TcpSyn"),
            ("udp flood", "UdpFlood"),
            ("ICMP-ECHO", "IcmpEcho"),
            ("HTTP flood", "HttpFlood"),
            ("slowloris", "Slowloris"),
            ("SLOWPOST", "Slowpost"),
            ("Brute Force", "BruteForce"),
            ("normal", "Normal"),
        ],
    )
    def test_label_aliases(self, label, expected):
        assert parse_class(label) == expected

    def test_unlabeled_file(self):
        ds = load_csv(csv_bytes("a,b\n1,2\n3,4\n"))
        assert not ds.labeled
        assert [r.label for r in ds.records] == [None, None]

    def test_text_stream_and_path(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,class\n5,Slowpost\n")
        assert load_csv(path) == load_csv(io.StringIO("a,class\n5,Slowpost\n"))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(0, 30),
    d=st.integers(1, 5),
    seed=st.integers(0, 2**32 - 1),
)
def test_csv_round_trip(n, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d)) * 10.0 ** rng.integers(-3, 9)
    y = rng.integers(0, len(TRAFFIC_CLASSES), n)
    ds = make_dataset(X, y, names=tuple(f"ifCounter{i}" for i in range(d)))
    assert load_csv(io.StringIO(write_csv(ds))) == ds


class TestHistogram:
    def test_corpus_mix(self):
        assert class_histogram(corpus_mix_dataset()) == CORPUS_COUNTS

    def test_empty(self):
        ds = make_dataset(np.zeros((0, 1)), [])
        assert class_histogram(ds) == {c: 0 for c in TRAFFIC_CLASSES}

    def test_single_class(self):
        hist = class_histogram(make_dataset([1, 2, 3], [0, 0, 0]))
        assert hist["Normal"] == 3 and sum(hist.values()) == 3

    def test_unlabeled_rejected(self):
        with pytest.raises(DataFormatError):
            class_histogram(make_dataset([1, 2], [0, -1]))


class TestStratifiedSplit:
    def test_corpus_mix_counts(self):
        train, test = stratified_split(corpus_mix_dataset(), 0.7, seed=3)
        # Oracle: exact rational arithmetic, floor(7/10 * n_c).
        expected = {c: (Fraction(7, 10) * n).__floor__() for c, n in CORPUS_COUNTS.items()}
        assert class_histogram(train) == expected
        assert list(expected.values()) == [420, 672, 541, 442, 401, 546, 336, 140]
        assert (len(train), len(test)) == (3498, 1500)

    def test_single_class_of_ten(self):
        train, test = stratified_split(make_dataset(np.arange(10), [2] * 10), 0.7, seed=0)
        assert (len(train), len(test)) == (7, 3)

    def test_deterministic(self):
        ds = corpus_mix_dataset()
        a = stratified_split(ds, 0.7, seed=11)
        b = stratified_split(ds, 0.7, seed=11)
        assert a[0] == b[0] and a[1] == b[1]

    def test_seed_changes_selection(self):
        ds = corpus_mix_dataset()
        assert stratified_split(ds, 0.7, 1)[0] != stratified_split(ds, 0.7, 2)[0]

    @pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5, -0.2])
    def test_fraction_bounds(self, fraction):
        with pytest.raises(ConfigError):
            stratified_split(corpus_mix_dataset(), fraction, seed=0)

    def test_unlabeled_rejected(self):
        with pytest.raises(DataFormatError):
            stratified_split(make_dataset([1, 2, 3], [0, -1, 1]), 0.5, seed=0)

    @settings(max_examples=50, deadline=None)
    @given(
        counts=st.lists(st.integers(1, 40), min_size=1, max_size=8),
        fraction=st.floats(0.05, 0.95),
        seed=st.integers(0, 1000),
    )
    def test_partition_properties(self, counts, fraction, seed):
        y = np.concatenate([np.full(n, c) for c, n in enumerate(counts)])
        X = np.arange(y.size, dtype=float).reshape(-1, 1)  # unique values identify records
        ds = make_dataset(X, y)
        train, test = stratified_split(ds, fraction, seed)
        ids_train, ids_test = set(train.X[:, 0]), set(test.X[:, 0])
        assert not ids_train & ids_test
        assert ids_train | ids_test == set(X[:, 0])
        for c, n in enumerate(counts):
            assert np.count_nonzero(train.y == c) + np.count_nonzero(test.y == c) == n


def test_dataset_is_immutable(corpus):
    with pytest.raises(ValueError):
        corpus.X[0, 0] = 1.0
    with pytest.raises(AttributeError):
        corpus.provenance = "x"


def test_schema_invariants():
    with pytest.raises(DataFormatError):
        Dataset(("a", "a"), np.zeros((1, 2)), [0])
    with pytest.raises(DataFormatError):
        Dataset(("a",), np.zeros((1, 2)), [0])
    with pytest.raises(ValueError):
        MibRecord((float("nan"),))


def test_relabel_binary(corpus):
    b = relabel_binary(corpus)
    assert b.classes == ("Normal", "Attack")
    assert class_histogram(b) == {"Normal": 600, "Attack": 4998 - 600}
