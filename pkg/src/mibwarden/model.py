"""The shared rule-model representation and its text file format.

Format, one item per line, blank lines and ``#`` comments ignored::

    learner=<zeror|oner|jrip|part|dtable>
    schema=<fingerprint>
    attributes=<name,name,...>
    classes=<Class,Class,...>
    params=<k=v,k=v,...>
    attr:<i> cuts:<c1,c2,...>                # oner and dtable only
    rule: <cond> && <cond> => <Class> [covered=<n>]
    cell: <b1,b2,...> => <Class>             # dtable only
    default: <Class>

Conditions take one of these forms::

    <name>[<i>] <= <t>
    <name>[<i>] > <t>
    <name>[<i>] in bin <b>

Thresholds are written with ``repr`` so they parse back to the identical float.
The ``default:`` line must come last; its absence marks a truncated file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from mibwarden.dataset import Dataset, MibRecord, schema_fingerprint
from mibwarden.discretize import BinCuts
from mibwarden.errors import DataFormatError, SchemaMismatchError

OPS = ("<=", ">", "bin")


@dataclass(frozen=True)
class Condition:
    attribute: int
    op: str
    value: float

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown condition operator {self.op!r}")
        value = int(self.value) if self.op == "bin" else float(self.value)
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class Rule:
    conditions: tuple
    consequent: str
    covered: int | None = field(default=None, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))


@dataclass(frozen=True)
class DecisionTableCore:
    selected: tuple
    bins: tuple  # BinCuts per selected attribute, same order
    table: dict  # bin-id tuple -> class name
    majority_class: str

    def __eq__(self, other):
        if not isinstance(other, DecisionTableCore):
            return NotImplemented
        return (
            self.selected == other.selected
            and self.bins == other.bins
            and self.table == other.table
            and self.majority_class == other.majority_class
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RuleModel:
    learner_id: str
    rules: tuple
    default_class: str
    classes: tuple
    attributes: tuple
    params: dict = field(default_factory=dict)
    bins: dict = field(default_factory=dict)  # attribute index -> BinCuts, for bin conditions
    table: DecisionTableCore | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        for c in [self.default_class] + [r.consequent for r in self.rules]:
            if c not in self.classes:
                raise ValueError(f"class {c!r} not in model class list")

    @property
    def schema_fingerprint(self) -> str:
        return schema_fingerprint(self.attributes)

    def __eq__(self, other):
        if not isinstance(other, RuleModel):
            return NotImplemented
        return serialize_model(self) == serialize_model(other)

    __hash__ = None

    def check(self, ds: Dataset):
        if ds.fingerprint != self.schema_fingerprint:
            raise SchemaMismatchError(
                f"dataset schema {ds.fingerprint} does not match model schema {self.schema_fingerprint}"
            )

    def condition_mask(self, cond: Condition, X: np.ndarray) -> np.ndarray:
        col = X[:, cond.attribute]
        if cond.op == "<=":
            return col <= cond.value
        if cond.op == ">":
            return col > cond.value
        return self.bins[cond.attribute].bins(col) == cond.value

    def rule_mask(self, rule: Rule, X: np.ndarray) -> np.ndarray:
        mask = np.ones(X.shape[0], dtype=bool)
        for cond in rule.conditions:
            mask &= self.condition_mask(cond, X)
        return mask

    def predict_indices(self, X) -> np.ndarray:
        """Class indices (into ``classes``) for every row of ``X``; first matching rule wins."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.attributes):
            raise SchemaMismatchError(
                f"records have {X.shape[-1]} values, model expects {len(self.attributes)}"
            )
        index = {c: i for i, c in enumerate(self.classes)}
        out = np.full(X.shape[0], -1, dtype=np.int64)
        for rule in self.rules:
            hit = (out < 0) & self.rule_mask(rule, X)
            out[hit] = index[rule.consequent]
        if self.table is not None:
            rest = np.flatnonzero(out < 0)
            if rest.size:
                keys = np.column_stack(
                    [b.bins(X[rest, a]) for a, b in zip(self.table.selected, self.table.bins)]
                ) if self.table.selected else np.zeros((rest.size, 0), dtype=np.int64)
                for r, key in zip(rest, map(tuple, keys.tolist())):
                    out[r] = index[self.table.table.get(key, self.table.majority_class)]
        out[out < 0] = index[self.default_class]
        return out

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        self.check(ds)
        return self.predict_indices(ds.X)


def predict(model: RuleModel, record) -> str:
    values = record.values if isinstance(record, MibRecord) else record
    row = np.asarray(values, dtype=np.float64).reshape(1, -1)
    return model.classes[int(model.predict_indices(row)[0])]


# ---------------------------------------------------------------- text format

def _fmt_cond(model: RuleModel, cond: Condition) -> str:
    name = f"{model.attributes[cond.attribute]}[{cond.attribute}]"
    if cond.op == "bin":
        return f"{name} in bin {cond.value}"
    return f"{name} {cond.op} {cond.value!r}"


def _fmt_params(params: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in params.items())


def serialize_model(model: RuleModel) -> str:
    lines = [
        f"learner={model.learner_id}",
        f"schema={model.schema_fingerprint}",
        "attributes=" + ",".join(model.attributes),
        "classes=" + ",".join(model.classes),
        f"params={_fmt_params(model.params)}",
    ]
    bins = (
        list(zip(model.table.selected, model.table.bins))
        if model.table is not None
        else sorted(model.bins.items())
    )
    for a, cuts in bins:
        lines.append(f"attr:{a} cuts:" + ",".join(repr(c) for c in cuts.cuts))
    for rule in model.rules:
        body = " && ".join(_fmt_cond(model, c) for c in rule.conditions)
        line = f"rule: {body} => {rule.consequent}"
        if rule.covered is not None:
            line += f" [covered={rule.covered}]"
        lines.append(line)
    if model.table is not None:
        for key in sorted(model.table.table):
            lines.append("cell: " + ",".join(str(b) for b in key) + f" => {model.table.table[key]}")
    lines.append(f"default: {model.default_class}")
    return "\n".join(lines) + "\n"


_COND = re.compile(r"^(?P<name>.*)\[(?P<idx>\d+)\]\s*(?:(?P<op><=|>)\s*(?P<t>\S+)|in bin\s+(?P<b>\d+))$")
_RULE = re.compile(r"^(?P<body>.*?)\s*=>\s*(?P<cls>[^\s\[]+)\s*(?:\[covered=(?P<cov>\d+)\])?$")


def parse_model(text: str) -> RuleModel:
    header = {}
    bins = []
    rules = []
    cells = {}
    default = None
    lines = text.splitlines()
    last = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        last = lineno
        if default is not None:
            raise DataFormatError("content after the default line", line=lineno)
        try:
            if line.startswith("rule:"):
                m = _RULE.match(line[5:].strip())
                if not m:
                    raise ValueError("malformed rule")
                conds = []
                body = m.group("body").strip()
                for part in body.split("&&") if body else []:
                    cm = _COND.match(part.strip())
                    if not cm:
                        raise ValueError(f"malformed condition {part.strip()!r}")
                    idx = int(cm.group("idx"))
                    if cm.group("op"):
                        conds.append(Condition(idx, cm.group("op"), float(cm.group("t"))))
                    else:
                        conds.append(Condition(idx, "bin", int(cm.group("b"))))
                    if "attributes" in header and (
                        idx >= len(header["attributes"]) or header["attributes"][idx] != cm.group("name")
                    ):
                        raise ValueError(f"condition names unknown attribute {cm.group('name')}[{idx}]")
                cov = m.group("cov")
                rules.append(Rule(tuple(conds), m.group("cls"), int(cov) if cov else None))
            elif line.startswith("cell:"):
                key_text, sep, cls = line[5:].partition("=>")
                if not sep or not cls.strip():
                    raise ValueError("malformed cell")
                key_text = key_text.strip()
                key = tuple(int(b) for b in key_text.split(",")) if key_text else ()
                cells[key] = cls.strip()
            elif line.startswith("attr:"):
                m = re.match(r"^attr:(\d+)\s+cuts:(.*)$", line)
                if not m:
                    raise ValueError("malformed attr line")
                cut_text = m.group(2).strip()
                cuts = tuple(float(c) for c in cut_text.split(",")) if cut_text else ()
                bins.append(BinCuts(int(m.group(1)), cuts))
            elif line.startswith("default:"):
                default = line[8:].strip()
                if not default:
                    raise ValueError("empty default class")
            elif "=" in line:
                key, _, value = line.partition("=")
                key = key.strip()
                if key in ("attributes", "classes"):
                    header[key] = tuple(value.split(",")) if value else ()
                elif key == "params":
                    params = {}
                    for item in filter(None, value.split(",")):
                        k, eq, v = item.partition("=")
                        if not eq:
                            raise ValueError(f"malformed parameter {item!r}")
                        params[k] = v
                    header[key] = params
                elif key in ("learner", "schema"):
                    header[key] = value.strip()
                else:
                    raise ValueError(f"unknown header {key!r}")
            else:
                raise ValueError("unrecognised line")
        except ValueError as exc:
            raise DataFormatError(str(exc), line=lineno) from None

    if default is None:
        raise DataFormatError("missing default line (truncated model?)", line=last or len(lines))
    for key in ("learner", "schema", "attributes", "classes", "params"):
        if key not in header:
            raise DataFormatError(f"missing header {key}", line=last)
    if schema_fingerprint(header["attributes"]) != header["schema"]:
        raise DataFormatError("schema fingerprint does not match attribute list", line=last)

    table = None
    bin_map = {}
    if header["learner"] == "dtable":
        table = DecisionTableCore(
            tuple(b.attribute_index for b in bins), tuple(bins), cells, default
        )
    else:
        bin_map = {b.attribute_index: b for b in bins}
    try:
        return RuleModel(
            header["learner"], tuple(rules), default, header["classes"], header["attributes"],
            header["params"], bin_map, table,
        )
    except ValueError as exc:
        raise DataFormatError(str(exc), line=last) from None
