"""Counter snapshots to per-interval delta records, and online classification.

Input is a line protocol, one snapshot per line::

    t=<unix seconds> <name>=<counter> <name>=<counter> ...

Counters are raw cumulative values; deltas are taken modulo the wrap size
(2**32 for Counter32). Output lines read ``t=<int> class=<Name>``.
"""

from __future__ import annotations

import logging
import socket
from dataclasses import dataclass
from typing import Iterable, Iterator

from mibwarden.dataset import MibRecord
from mibwarden.errors import DataFormatError

log = logging.getLogger(__name__)

COUNTER32 = 2**32


@dataclass(frozen=True)
class Snapshot:
    timestamp: int
    counters: dict


@dataclass(frozen=True)
class DeltaConfig:
    # No default polling interval is assumed; leave unset to skip the gap check.
    expected_interval: float | None = None
    wrap_modulus: int = COUNTER32
    max_gap: float = 3.0

    def __post_init__(self):
        if self.expected_interval is not None and self.expected_interval <= 0:
            raise ValueError("expected_interval must be positive")
        if self.wrap_modulus <= 1:
            raise ValueError("wrap_modulus must exceed 1")
        if self.max_gap <= 0:
            raise ValueError("max_gap must be positive")


def _uint(text: str, what: str) -> int:
    if not text.isdigit():
        raise DataFormatError(f"{what}: expected a non-negative integer, got {text!r}")
    return int(text)


def parse_snapshot_line(line: str, schema: Iterable[str], wrap_modulus: int | None = None) -> Snapshot:
    names = tuple(schema)
    fields = line.split()
    if not fields or not fields[0].startswith("t="):
        raise DataFormatError("snapshot must start with t=<timestamp>")
    timestamp = _uint(fields[0][2:], "timestamp")
    counters = {}
    for item in fields[1:]:
        name, eq, value = item.partition("=")
        if not eq or not name:
            raise DataFormatError(f"malformed field {item!r}")
        if name not in names:
            raise DataFormatError(f"unknown attribute {name!r}")
        if name in counters:
            raise DataFormatError(f"duplicate attribute {name!r}")
        counters[name] = _uint(value, name)
        if wrap_modulus is not None and counters[name] >= wrap_modulus:
            raise DataFormatError(f"{name}: counter {counters[name]} exceeds the wrap modulus")
    missing = [n for n in names if n not in counters]
    if missing:
        raise DataFormatError(f"missing attribute(s) {', '.join(missing)}")
    return Snapshot(timestamp, counters)


def deltas(prev: Snapshot, curr: Snapshot, cfg: DeltaConfig = DeltaConfig(), schema=None) -> MibRecord:
    """Per-attribute counter increase between two polls, modulo the wrap size."""
    if curr.timestamp <= prev.timestamp:
        raise DataFormatError(f"timestamp {curr.timestamp} does not follow {prev.timestamp}")
    names = tuple(schema) if schema is not None else tuple(curr.counters)
    values = tuple((curr.counters[n] - prev.counters[n]) % cfg.wrap_modulus for n in names)
    degraded = False
    if cfg.expected_interval is not None:
        gap = curr.timestamp - prev.timestamp
        if gap > cfg.max_gap * cfg.expected_interval:
            log.warning("poll gap of %ss at t=%s; treating as agent reset", gap, curr.timestamp)
            degraded = True
    return MibRecord(values, None, degraded)


def integrate(deltas_seq, start: int = 0, modulus: int = COUNTER32) -> list:
    """Cumulative counter values (wrapped) for a delta sequence; the inverse of differencing."""
    out = [start % modulus]
    for d in deltas_seq:
        out.append((out[-1] + d) % modulus)
    return out


def stream_classify(lines: Iterable[str], model, cfg: DeltaConfig = DeltaConfig()) -> Iterator[tuple]:
    """Yield ``(timestamp, class)`` for each consecutive pair of valid snapshots.

    Malformed lines and out-of-order timestamps are logged and skipped; the last
    valid snapshot is kept as the left end of the next pair.
    """
    names = model.attributes
    prev = None
    for lineno, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8", errors="replace")
        if not line.strip():
            continue
        try:
            snap = parse_snapshot_line(line, names, cfg.wrap_modulus)
            if prev is None:
                prev = snap
                continue
            record = deltas(prev, snap, cfg, names)
        except DataFormatError as exc:
            log.error("line %d skipped: %s", lineno, exc)
            continue
        prev = snap
        yield snap.timestamp, model.classes[int(model.predict_indices([record.values])[0])]


def format_output(timestamp: int, cls: str) -> str:
    return f"t={timestamp} class={cls}"


def udp_lines(host: str, port: int, bufsize: int = 65535, sock: socket.socket | None = None) -> Iterator[str]:
    """One snapshot line per datagram. Runs until the socket is closed or an empty datagram arrives."""
    own = sock is None
    if own:
        sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        sock.bind((host, port))
    try:
        while True:
            data, _ = sock.recvfrom(bufsize)
            if not data:
                return
            for line in data.decode("utf-8", errors="replace").splitlines():
                yield line
    finally:
        if own:
            sock.close()
