import numpy as np
import pytest

from mibwarden.dataset import Dataset, TRAFFIC_CLASSES, stratified_split
from mibwarden.synth import default_profile, synthesize


@pytest.fixture(scope="session")
def corpus():
    return synthesize(default_profile(), seed=1)


@pytest.fixture(scope="session")
def corpus_split(corpus):
    return stratified_split(corpus, 0.7, seed=1)


def make_dataset(X, y, names=None, classes=TRAFFIC_CLASSES):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    names = names or tuple(f"a{i}" for i in range(X.shape[1]))
    return Dataset(tuple(names), X, np.asarray(y, dtype=np.int64), classes, "test")


def boxes_dataset(rng, n_classes, n_attributes, per_class, levels=3, gap=1.0):
    """Each class fills a unit box in its own cell of a ``levels``-per-axis grid; cells are spaced ``1 + gap`` apart."""
    cells = set()
    while len(cells) < n_classes:
        cells.add(tuple(int(v) for v in rng.integers(0, levels, n_attributes)))
    X, y = [], []
    for c, cell in enumerate(sorted(cells, key=lambda _: rng.random())):
        lo = np.array(cell, dtype=float) * (1.0 + gap)
        X.append(lo + rng.random((per_class[c], n_attributes)))
        y.append(np.full(per_class[c], c))
    return np.vstack(X), np.concatenate(y)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
