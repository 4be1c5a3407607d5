"""MIB feature schema, traffic classes, CSV ingestion and the stratified holdout split."""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from mibwarden.errors import ConfigError, DataFormatError

# Canonical order; every tiebreak "by class order" uses this tuple.
TRAFFIC_CLASSES = (
    "Normal",
    "TcpSyn",
    "UdpFlood",
    "IcmpEcho",
    "HttpFlood",
    "Slowloris",
    "Slowpost",
    "BruteForce",
)

# Record counts per traffic type of the adopted 4998-record corpus.
CORPUS_COUNTS = {
    "Normal": 600,
    "TcpSyn": 960,
    "UdpFlood": 773,
    "IcmpEcho": 632,
    "HttpFlood": 573,
    "Slowloris": 780,
    "Slowpost": 480,
    "BruteForce": 200,
}

BINARY_CLASSES = ("Normal", "Attack")

# Standard ifEntry counters (RFC 1213 interface group).
DEFAULT_SCHEMA = (
    "ifInOctets",
    "ifOutOctets",
    "ifInUcastPkts",
    "ifOutUcastPkts",
    "ifInNUcastPkts",
    "ifOutNUcastPkts",
    "ifInDiscards",
    "ifOutDiscards",
    "ifInErrors",
    "ifOutErrors",
    "ifOutQLen",
)

_ALIASES = {
    "syn": "TcpSyn",
    "synflood": "TcpSyn",
    "tcpsynflood": "TcpSyn",
    "udp": "UdpFlood",
    "icmp": "IcmpEcho",
    "icmpflood": "IcmpEcho",
    "icmpechoflood": "IcmpEcho",
    "ping": "IcmpEcho",
    "http": "HttpFlood",
    "brute": "BruteForce",
    "bruteforceattack": "BruteForce",
    "slowbody": "Slowpost",
    "slowhttppost": "Slowpost",
}


def _norm(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


_LOOKUP = {_norm(c): c for c in TRAFFIC_CLASSES}
_LOOKUP.update(_ALIASES)


def parse_class(text: str, classes: Sequence[str] = TRAFFIC_CLASSES) -> str:
    """Map a label as written in an export ("TCP-SYN", "udp flood", ...) to its canonical name."""
    key = _norm(text)
    if classes is TRAFFIC_CLASSES or tuple(classes) == TRAFFIC_CLASSES:
        name = _LOOKUP.get(key)
    else:
        name = next((c for c in classes if _norm(c) == key), None)
    if name is None:
        raise ValueError(f"unknown class label {text!r}")
    return name


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    index: int
    kind: str = "counter-delta"


@dataclass(frozen=True)
class MibRecord:
    """One polling interval: counter deltas in schema order plus an optional label."""

    values: tuple
    label: str | None = None
    degraded: bool = field(default=False, compare=False)

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        for v in values:
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"record value {v!r} is not a finite non-negative number")
        object.__setattr__(self, "values", values)


def schema_fingerprint(names: Iterable[str]) -> str:
    return hashlib.sha256("\n".join(names).encode("utf-8")).hexdigest()[:16]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of records.

    ``X`` is an (n, d) float array of counter deltas; ``y`` holds class indices into
    ``classes`` with -1 marking an unlabeled record.
    """

    schema: tuple
    X: np.ndarray
    y: np.ndarray
    classes: tuple = TRAFFIC_CLASSES
    provenance: str = ""

    def __post_init__(self):
        schema = tuple(
            s if isinstance(s, AttributeSpec) else AttributeSpec(str(s), i)
            for i, s in enumerate(self.schema)
        )
        names = [s.name for s in schema]
        if len(set(names)) != len(names):
            raise DataFormatError("duplicate attribute names in schema")
        if [s.index for s in schema] != list(range(len(schema))):
            raise DataFormatError("attribute indices must be contiguous from 0")
        X = np.asarray(self.X, dtype=np.float64)
        if X.size == 0:
            X = X.reshape(0, len(schema))
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[1] != len(schema):
            raise DataFormatError(f"records have {X.shape[-1]} values, schema has {len(schema)}")
        if X.shape[0] != y.shape[0]:
            raise DataFormatError("value rows and labels differ in length")
        if not np.all(np.isfinite(X)) or np.any(X < 0):
            raise DataFormatError("record values must be finite and non-negative")
        if y.size and (y.min() < -1 or y.max() >= len(self.classes)):
            raise DataFormatError("label index outside the class list")
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))

    @classmethod
    def from_records(cls, names, records, classes=TRAFFIC_CLASSES, provenance=""):
        records = list(records)
        classes = tuple(classes)
        index = {c: i for i, c in enumerate(classes)}
        X = np.array([r.values for r in records], dtype=np.float64).reshape(len(records), len(names))
        y = [index[r.label] if r.label is not None else -1 for r in records]
        return cls(tuple(names), X, np.array(y, dtype=np.int64), classes, provenance)

    def __len__(self):
        return self.X.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.names == other.names
            and self.classes == other.classes
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None

    @property
    def names(self) -> tuple:
        return tuple(s.name for s in self.schema)

    @property
    def n_attributes(self) -> int:
        return len(self.schema)

    @property
    def fingerprint(self) -> str:
        return schema_fingerprint(self.names)

    @property
    def labeled(self) -> bool:
        return bool(np.all(self.y >= 0))

    @property
    def records(self) -> list:
        return [
            MibRecord(tuple(row), self.classes[c] if c >= 0 else None)
            for row, c in zip(self.X.tolist(), self.y.tolist())
        ]

    def subset(self, indices, provenance=None) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.schema,
            self.X[indices],
            self.y[indices],
            self.classes,
            self.provenance if provenance is None else provenance,
        )

    def require_labeled(self):
        if not self.labeled:
            bad = int(np.flatnonzero(self.y < 0)[0])
            raise DataFormatError(f"record {bad} is unlabeled")


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
        return io.StringIO(data.decode("utf-8-sig")), str(source)
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data), getattr(source, "name", "<stream>")


def load_csv(source, classes: Sequence[str] = TRAFFIC_CLASSES) -> Dataset:
    """Read a header-led CSV. A final column named ``class`` makes the file labeled."""
    text, provenance = _open_text(source)
    reader = csv.reader(text)
    header = None
    for row in reader:
        if row and any(cell.strip() for cell in row):
            header = [cell.strip() for cell in row]
            break
    if header is None:
        raise DataFormatError("empty file")
    labeled = header[-1].lower() == "class"
    names = header[:-1] if labeled else header
    if not names:
        raise DataFormatError("header declares no attributes", line=reader.line_num)
    if len(set(names)) != len(names):
        raise DataFormatError("duplicate attribute name in header", line=reader.line_num)
    if any(not n for n in names):
        raise DataFormatError("empty attribute name in header", line=reader.line_num)

    width = len(header)
    rows, labels = [], []
    index = {c: i for i, c in enumerate(classes)}
    for row in reader:
        line = reader.line_num
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != width:
            raise DataFormatError(f"expected {width} fields, found {len(row)}", line=line)
        values = []
        for name, cell in zip(names, row):
            cell = cell.strip()
            if not cell:
                raise DataFormatError(f"missing value at column {name}", line=line)
            try:
                v = float(cell)
            except ValueError:
                raise DataFormatError(f"unparseable numeric {cell!r} at column {name}", line=line) from None
            if not math.isfinite(v) or v < 0:
                raise DataFormatError(f"value {cell!r} at column {name} is not a finite non-negative number", line=line)
            values.append(v)
        rows.append(values)
        if labeled:
            try:
                labels.append(index[parse_class(row[-1], classes)])
            except ValueError as exc:
                raise DataFormatError(str(exc), line=line) from None
        else:
            labels.append(-1)
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    return Dataset(tuple(names), X, np.array(labels, dtype=np.int64), tuple(classes), provenance)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_csv(ds: Dataset, dest=None) -> str:
    """Emit ``ds`` as CSV (the inverse of :func:`load_csv`). Returns the text; writes it when ``dest`` is given."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    labeled = len(ds) > 0 and ds.labeled
    writer.writerow(list(ds.names) + (["class"] if labeled or len(ds) == 0 else []))
    for row, c in zip(ds.X.tolist(), ds.y.tolist()):
        cells = [_fmt(v) for v in row]
        if labeled:
            cells.append(ds.classes[c])
        writer.writerow(cells)
    text = out.getvalue()
    if dest is not None:
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            dest.write(text)
    return text


def class_histogram(ds: Dataset) -> dict:
    ds.require_labeled()
    counts = np.bincount(ds.y, minlength=len(ds.classes)) if len(ds) else np.zeros(len(ds.classes), int)
    return {c: int(n) for c, n in zip(ds.classes, counts)}


def split_sizes(counts: dict, train_fraction: float) -> dict:
    """Per-class train sizes: floor(fraction * n_c); the remainder goes to test."""
    # The epsilon keeps decimal fractions such as 0.7 from flooring one short (0.7 * 600 -> 419.99...).
    return {c: int(math.floor(train_fraction * n + 1e-9)) for c, n in counts.items()}


def stratified_split(ds: Dataset, train_fraction: float, seed: int):
    """Per-class seeded shuffle; each class sends floor(fraction * n_c) records to train."""
    if not (0.0 < train_fraction < 1.0):
        raise ConfigError(f"train fraction must lie in (0, 1), got {train_fraction}")
    ds.require_labeled()
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c in range(len(ds.classes)):
        members = np.flatnonzero(ds.y == c)
        if members.size == 0:
            continue
        k = split_sizes({c: members.size}, train_fraction)[c]
        perm = rng.permutation(members)
        train_idx.append(perm[:k])
        test_idx.append(perm[k:])
    train = np.sort(np.concatenate(train_idx)) if train_idx else np.array([], dtype=np.int64)
    test = np.sort(np.concatenate(test_idx)) if test_idx else np.array([], dtype=np.int64)
    return (
        ds.subset(train, provenance=f"{ds.provenance}#train"),
        ds.subset(test, provenance=f"{ds.provenance}#test"),
    )


def relabel_binary(ds: Dataset) -> Dataset:
    """Collapse every attack class into a single ``Attack`` label."""
    ds.require_labeled()
    normal = ds.classes.index("Normal")
    y = (ds.y != normal).astype(np.int64)
    return Dataset(ds.schema, ds.X, y, BINARY_CLASSES, f"{ds.provenance}#binary")
