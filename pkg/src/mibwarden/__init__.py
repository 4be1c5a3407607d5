"""Rule-based DoS / brute-force traffic classification from SNMP-MIB counter records."""

from mibwarden.dataset import (
    DEFAULT_SCHEMA,
    TRAFFIC_CLASSES,
    CORPUS_COUNTS,
    AttributeSpec,
    Dataset,
    MibRecord,
    class_histogram,
    load_csv,
    relabel_binary,
    stratified_split,
    write_csv,
)
from mibwarden.errors import ConfigError, DataFormatError, MibwardenError, SchemaMismatchError
from mibwarden.model import RuleModel, parse_model, predict, serialize_model
from mibwarden.learners import LEARNER_ORDER, train

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SCHEMA",
    "TRAFFIC_CLASSES",
    "CORPUS_COUNTS",
    "AttributeSpec",
    "Dataset",
    "MibRecord",
    "class_histogram",
    "load_csv",
    "relabel_binary",
    "stratified_split",
    "write_csv",
    "ConfigError",
    "DataFormatError",
    "MibwardenError",
    "SchemaMismatchError",
    "RuleModel",
    "parse_model",
    "predict",
    "serialize_model",
    "LEARNER_ORDER",
    "train",
]
