"""The five rule learners behind one ``train(learner_id, dataset, **params)`` entry point."""

from mibwarden.errors import ConfigError
from mibwarden.learners.dtable import train_decision_table
from mibwarden.learners.oner import train_oner
from mibwarden.learners.part import train_part
from mibwarden.learners.ripper import train_jrip
from mibwarden.learners.zeror import train_zeror

# Canonical learner order, also the last tiebreak when ranking reports.
LEARNER_ORDER = ("zeror", "oner", "jrip", "part", "dtable")

_TRAINERS = {
    "zeror": train_zeror,
    "oner": train_oner,
    "jrip": train_jrip,
    "part": train_part,
    "dtable": train_decision_table,
}

DEFAULT_PARAMS = {
    "zeror": {},
    "oner": {"min_bucket": 6},
    "jrip": {"folds": 3, "min_covered": 2, "optimizations": 2, "seed": 0},
    "part": {"confidence": 0.25, "min_leaf": 2, "seed": 0},
    "dtable": {"max_stale": 5, "seed": 0},
}


def train(learner_id: str, dataset, **params):
    if learner_id not in _TRAINERS:
        raise ConfigError(f"unknown learner {learner_id!r}; choose from {', '.join(LEARNER_ORDER)}")
    unknown = set(params) - set(DEFAULT_PARAMS[learner_id])
    if unknown:
        raise ConfigError(f"{learner_id} does not take parameter(s) {', '.join(sorted(unknown))}")
    return _TRAINERS[learner_id](dataset, **params)


__all__ = [
    "LEARNER_ORDER",
    "DEFAULT_PARAMS",
    "train",
    "train_zeror",
    "train_oner",
    "train_jrip",
    "train_part",
    "train_decision_table",
]
