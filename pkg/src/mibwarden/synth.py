"""Synthetic MIB corpora with Table-1 class proportions.

Each (class, attribute) cell is drawn from a triangular distribution centred on the
profile's centre with half-width equal to the spread. A small fraction of cells
(``feature_noise``) is redrawn from a wider triangle of half-width
``noise_width * spread``. Values are clamped at zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from mibwarden.dataset import DEFAULT_SCHEMA, CORPUS_COUNTS, TRAFFIC_CLASSES, Dataset
from mibwarden.errors import ConfigError

# Per-attribute baseline and spread for the default interface-group profile.
_ATTRIBUTE_SCALE = {
    "ifInOctets": (60000.0, 2500.0),
    "ifOutOctets": (55000.0, 2500.0),
    "ifInUcastPkts": (400.0, 20.0),
    "ifOutUcastPkts": (380.0, 20.0),
    "ifInNUcastPkts": (30.0, 3.0),
    "ifOutNUcastPkts": (25.0, 3.0),
    "ifInDiscards": (12.0, 2.0),
    "ifOutDiscards": (10.0, 2.0),
    "ifInErrors": (9.0, 1.5),
    "ifOutErrors": (8.0, 1.5),
    "ifOutQLen": (15.0, 2.0),
}

# Level of every counter per traffic class. No attribute takes more than three
# levels, so no single counter can tell all eight classes apart. Every attack
# lengthens the output queue, which gives Normal a clean boundary of its own.
_LEVELS = {
    "Normal":     (1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0),
    "TcpSyn":     (1, 0, 2, 1, 0, 0, 1, 0, 0, 0, 1),
    "UdpFlood":   (2, 0, 2, 0, 0, 1, 2, 0, 1, 0, 2),
    "IcmpEcho":   (1, 2, 2, 2, 0, 0, 0, 1, 0, 0, 2),
    "HttpFlood":  (2, 2, 1, 2, 0, 0, 0, 0, 0, 1, 1),
    "Slowloris":  (0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1),
    "Slowpost":   (0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 1),
    "BruteForce": (0, 1, 1, 1, 0, 1, 0, 0, 0, 0, 2),
}

DEFAULT_SEPARATION = 4.0
DEFAULT_FEATURE_NOISE = 0.03
DEFAULT_NOISE_WIDTH = 1.5


@dataclass(frozen=True, eq=False)
class SynthProfile:
    names: tuple
    centers: np.ndarray  # (n_classes, n_attributes)
    spreads: np.ndarray  # (n_classes, n_attributes)
    class_counts: dict = field(default_factory=lambda: dict(CORPUS_COUNTS))
    classes: tuple = TRAFFIC_CLASSES
    feature_noise: float = 0.0
    noise_width: float = DEFAULT_NOISE_WIDTH

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        spreads = np.asarray(self.spreads, dtype=np.float64)
        shape = (len(self.classes), len(self.names))
        if centers.shape != shape:
            raise ConfigError(f"centers: expected shape {shape}, got {centers.shape}")
        if spreads.shape != shape:
            raise ConfigError(f"spreads: expected shape {shape}, got {spreads.shape}")
        if not np.all(np.isfinite(centers)) or np.any(centers < 0):
            raise ConfigError("centers: values must be finite and non-negative")
        if not np.all(np.isfinite(spreads)) or np.any(spreads < 0):
            raise ConfigError("spreads: values must be finite and non-negative")
        for c, n in self.class_counts.items():
            if c not in self.classes:
                raise ConfigError(f"class_counts: unknown class {c!r}")
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
                raise ConfigError(f"class_counts: count for {c} must be a non-negative integer")
        if not (0.0 <= self.feature_noise <= 1.0):
            raise ConfigError("feature_noise: must lie in [0, 1]")
        if self.noise_width < 0:
            raise ConfigError("noise_width: must be non-negative")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "spreads", spreads)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "classes", tuple(self.classes))

    def to_json(self) -> str:
        return json.dumps(
            {
                "attributes": list(self.names),
                "class_counts": {c: int(self.class_counts.get(c, 0)) for c in self.classes},
                "centers": {c: self.centers[i].tolist() for i, c in enumerate(self.classes)},
                "spreads": {c: self.spreads[i].tolist() for i, c in enumerate(self.classes)},
                "feature_noise": self.feature_noise,
                "noise_width": self.noise_width,
            },
            indent=2,
        )


def default_profile(
    separation: float = DEFAULT_SEPARATION,
    feature_noise: float = DEFAULT_FEATURE_NOISE,
    class_counts: dict | None = None,
) -> SynthProfile:
    """Interface-group profile: neighbouring levels sit ``separation`` spreads apart."""
    base = np.array([_ATTRIBUTE_SCALE[n][0] for n in DEFAULT_SCHEMA])
    spread = np.array([_ATTRIBUTE_SCALE[n][1] for n in DEFAULT_SCHEMA])
    levels = np.array([_LEVELS[c] for c in TRAFFIC_CLASSES], dtype=np.float64)
    centers = base + levels * separation * spread
    spreads = np.tile(spread, (len(TRAFFIC_CLASSES), 1))
    return SynthProfile(
        DEFAULT_SCHEMA,
        centers,
        spreads,
        dict(CORPUS_COUNTS if class_counts is None else class_counts),
        feature_noise=feature_noise,
    )


def min_pair_separation(profile: SynthProfile) -> float:
    """Smallest, over class pairs, of the best single-attribute centre gap in units of spread."""
    worst = math.inf
    for a, b in combinations(range(len(profile.classes)), 2):
        gap = np.abs(profile.centers[a] - profile.centers[b])
        scale = np.maximum(profile.spreads[a], profile.spreads[b])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(scale > 0, gap / scale, np.where(gap > 0, np.inf, 0.0))
        worst = min(worst, float(ratio.max()))
    return worst


def synthesize(profile: SynthProfile, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    d = len(profile.names)
    blocks, labels = [], []
    for k, c in enumerate(profile.classes):
        n = int(profile.class_counts.get(c, 0))
        if n == 0:
            continue
        center, spread = profile.centers[k], profile.spreads[k]
        values = center + rng.triangular(-1.0, 0.0, 1.0, size=(n, d)) * spread
        if profile.feature_noise > 0:
            hit = rng.random((n, d)) < profile.feature_noise
            wide = center + rng.triangular(-1.0, 0.0, 1.0, size=(n, d)) * spread * profile.noise_width
            values = np.where(hit, wide, values)
        blocks.append(np.maximum(values, 0.0))
        labels.append(np.full(n, k, dtype=np.int64))
    X = np.vstack(blocks) if blocks else np.zeros((0, d))
    y = np.concatenate(labels) if labels else np.zeros(0, dtype=np.int64)
    return Dataset(profile.names, X, y, profile.classes, f"synthetic:{seed}")


def load_profile(source) -> SynthProfile:
    """Read a JSON profile; missing or malformed fields raise :class:`ConfigError` naming the field."""
    try:
        if hasattr(source, "read"):
            raw = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"profile is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("profile must be a JSON object")
    for key in ("attributes", "class_counts", "centers", "spreads"):
        if key not in raw:
            raise ConfigError(f"{key}: missing field")
    names = raw["attributes"]
    if not isinstance(names, list) or not names or not all(isinstance(n, str) for n in names):
        raise ConfigError("attributes: must be a non-empty list of names")
    rows = {}
    for key in ("centers", "spreads"):
        table = raw[key]
        if not isinstance(table, dict):
            raise ConfigError(f"{key}: must map class name to a list of numbers")
        out = []
        for c in TRAFFIC_CLASSES:
            row = table.get(c)
            if not isinstance(row, list) or len(row) != len(names):
                raise ConfigError(f"{key}.{c}: expected {len(names)} numbers")
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row):
                raise ConfigError(f"{key}.{c}: values must be numbers")
            out.append(row)
        rows[key] = out
    counts = raw["class_counts"]
    if not isinstance(counts, dict):
        raise ConfigError("class_counts: must map class name to count")
    return SynthProfile(
        tuple(names),
        np.array(rows["centers"], dtype=np.float64),
        np.array(rows["spreads"], dtype=np.float64),
        dict(counts),
        feature_noise=float(raw.get("feature_noise", 0.0)),
        noise_width=float(raw.get("noise_width", DEFAULT_NOISE_WIDTH)),
    )
