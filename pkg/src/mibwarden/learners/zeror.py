"""ZeroR: always predict the plurality class of the training set."""

from mibwarden.learners._common import class_counts, majority, params_dict, require_training_set
from mibwarden.model import RuleModel


def train_zeror(train) -> RuleModel:
    require_training_set(train)
    default = train.classes[majority(class_counts(train.y, len(train.classes)))]
    return RuleModel("zeror", (), default, train.classes, train.names, params_dict())
