"""RIPPER (JRip) rule induction.

Classes are learned in ascending order of frequency; each class is separated from
all not-yet-handled classes by an IREP* build phase followed by optimisation
passes, and the most frequent class becomes the default.
"""

from __future__ import annotations

import math

import numpy as np

from mibwarden.errors import ConfigError, DataFormatError
from mibwarden.learners._common import check_positive, class_counts, params_dict, require_training_set, thresholds
from mibwarden.model import Condition, Rule, RuleModel

DL_SLACK = 64.0
THEORY_WEIGHT = 0.5


# ---------------------------------------------------------------- description length

def _subset_dl(t: float, k: float, p: float) -> float:
    bits = -k * math.log2(p) if p > 0 else 0.0
    if t - k > 0:
        bits -= (t - k) * math.log2(1.0 - min(p, 1.0 - 1e-12))
    return bits


def theory_dl(n_conditions: int, n_possible: float) -> float:
    k = n_conditions
    if k == 0:
        return 0.0
    bits = math.log2(k)
    if k > 1:
        bits += 2.0 * math.log2(bits)
    bits += _subset_dl(n_possible, k, k / n_possible)
    return THEORY_WEIGHT * bits


def data_dl(exp_fp_over_err: float, cover: float, uncover: float, fp: float, fn: float) -> float:
    """Bits needed to flag the false positives among covered and false negatives among uncovered instances."""
    total = math.log2(cover + uncover + 1.0)
    if cover > uncover:
        exp_err = exp_fp_over_err * (fp + fn)
        cover_bits = _subset_dl(cover, fp, exp_err / cover)
        uncover_bits = _subset_dl(uncover, fn, fn / uncover) if uncover > 0 else 0.0
    else:
        exp_err = (1.0 - exp_fp_over_err) * (fp + fn)
        cover_bits = _subset_dl(cover, fp, fp / cover) if cover > 0 else 0.0
        uncover_bits = _subset_dl(uncover, fn, exp_err / uncover)
    return total + cover_bits + uncover_bits


class _Stage:
    """The instances in play while learning rules for one class."""

    def __init__(self, X: np.ndarray, pos: np.ndarray, rng: np.random.Generator, folds: int, min_covered: int):
        self.X = X
        self.pos = pos
        self.rng = rng
        self.folds = folds
        self.min_covered = min_covered
        self.exp_fp_rate = pos.sum() / pos.size
        distinct = sum(np.unique(X[:, a]).size for a in range(X.shape[1]))
        self.n_possible = max(2.0 * distinct, 1.0)

    # -- coverage

    def mask(self, conds, rows=None) -> np.ndarray:
        X = self.X if rows is None else self.X[rows]
        m = np.ones(X.shape[0], dtype=bool)
        for c in conds:
            col = X[:, c.attribute]
            m &= (col <= c.value) if c.op == "<=" else (col > c.value)
        return m

    def covered(self, ruleset, rows=None) -> np.ndarray:
        n = self.X.shape[0] if rows is None else len(rows)
        m = np.zeros(n, dtype=bool)
        for conds in ruleset:
            m |= self.mask(conds, rows)
        return m

    def ruleset_dl(self, ruleset) -> float:
        cov = self.covered(ruleset)
        fp = float(np.count_nonzero(cov & ~self.pos))
        fn = float(np.count_nonzero(~cov & self.pos))
        cover = float(np.count_nonzero(cov))
        theory = sum(theory_dl(len(r), self.n_possible) for r in ruleset)
        return theory + data_dl(self.exp_fp_rate, cover, self.pos.size - cover, fp, fn)

    # -- grow / prune

    def split(self, rows: np.ndarray):
        """Stratified random grow/prune split of ``rows``; prune gets 1/folds of each side."""
        grow, prune = [], []
        for side in (self.pos[rows], ~self.pos[rows]):
            idx = self.rng.permutation(rows[side])
            k = idx.size // self.folds
            prune.append(idx[:k])
            grow.append(idx[k:])
        return np.sort(np.concatenate(grow)), np.sort(np.concatenate(prune))

    def grow(self, rows: np.ndarray, conds=()) -> list:
        """Greedily add the condition with the highest FOIL gain until no negatives remain covered."""
        conds = list(conds)
        X, pos = self.X[rows], self.pos[rows]
        live = self.mask(conds, rows)
        while True:
            p0 = int(np.count_nonzero(pos[live]))
            n0 = int(np.count_nonzero(live)) - p0
            if p0 == 0 or n0 == 0:
                return conds
            base = math.log2((p0 + 1.0) / (p0 + n0 + 1.0))
            Xl = X[live]
            onehot = np.column_stack((pos[live], ~pos[live])).astype(np.int64)
            best = None  # (gain, attribute, threshold, op)
            for a in range(X.shape[1]):
                t, left, total = thresholds(Xl[:, a], onehot)
                if t.size == 0:
                    continue
                # Interleave "<=" and ">" per threshold so argmax honours the tiebreak order.
                p1 = np.column_stack((left[:, 0], total[0] - left[:, 0])).ravel().astype(np.float64)
                n1 = np.column_stack((left[:, 1], total[1] - left[:, 1])).ravel().astype(np.float64)
                with np.errstate(divide="ignore", invalid="ignore"):
                    gain = p1 * (np.log2((p1 + 1.0) / (p1 + n1 + 1.0)) - base)
                gain = np.where((p1 > 0) & (p1 >= self.min_covered), gain, -np.inf)
                j = int(np.argmax(gain))
                if gain[j] > 0 and (best is None or gain[j] > best[0]):
                    best = (float(gain[j]), a, float(t[j // 2]), "<=" if j % 2 == 0 else ">")
            if best is None:
                return conds
            cond = Condition(best[1], best[3], best[2])
            conds.append(cond)
            live &= self.mask([cond], rows)

    def prune_irep(self, conds, rows: np.ndarray) -> list:
        """Keep the prefix maximising (p - n) / (p + n) on ``rows``; ties keep the longer prefix."""
        if len(conds) <= 1 or rows.size == 0:
            return list(conds)
        pos = self.pos[rows]
        live = np.ones(rows.size, dtype=bool)
        best_len, best_worth = len(conds), -np.inf
        for length, c in enumerate(conds, start=1):
            live &= self.mask([c], rows)
            p = int(np.count_nonzero(live & pos))
            n = int(np.count_nonzero(live & ~pos))
            worth = (p - n) / (p + n) if p + n else 0.0
            if worth >= best_worth:
                best_len, best_worth = length, worth
        return list(conds[:best_len])

    def prune_in_ruleset(self, conds, others, rows: np.ndarray) -> list:
        """Prefix maximising accuracy of the whole ruleset on ``rows`` with this rule swapped in."""
        if len(conds) <= 1 or rows.size == 0:
            return list(conds)
        pos = self.pos[rows]
        rest = self.covered(others, rows)
        live = np.ones(rows.size, dtype=bool)
        best_len, best_acc = len(conds), -1
        for length, c in enumerate(conds, start=1):
            live &= self.mask([c], rows)
            cov = live | rest
            acc = int(np.count_nonzero(cov == pos))
            if acc >= best_acc:
                best_len, best_acc = length, acc
        return list(conds[:best_len])

    # -- phases

    def build(self, ruleset: list, rows: np.ndarray) -> list:
        """IREP*: add rules for the uncovered positives in ``rows`` until a stopping condition fires."""
        ruleset = list(ruleset)
        min_dl = self.ruleset_dl(ruleset)
        while np.count_nonzero(self.pos[rows]) > 0:
            grow_rows, prune_rows = self.split(rows)
            conds = self.prune_irep(self.grow(grow_rows), prune_rows)
            if not conds:
                break
            live = self.mask(conds, rows)
            if np.count_nonzero(live & self.pos[rows]) < self.min_covered:
                break
            prune_live = self.mask(conds, prune_rows)
            covered_prune = np.count_nonzero(prune_live)
            if covered_prune and np.count_nonzero(prune_live & ~self.pos[prune_rows]) / covered_prune > 0.5:
                break
            dl = self.ruleset_dl(ruleset + [conds])
            if dl > min_dl + DL_SLACK:
                break
            min_dl = min(min_dl, dl)
            ruleset.append(conds)
            rows = rows[~live]
        return ruleset

    def optimize(self, ruleset: list) -> list:
        ruleset = list(ruleset)
        everything = np.arange(self.pos.size)
        for i in range(len(ruleset)):
            rows = everything[~self.covered(ruleset[:i])]
            if rows.size == 0:
                continue
            grow_rows, prune_rows = self.split(rows)
            others = ruleset[i + 1:]
            original = ruleset[i]
            replacement = self.prune_in_ruleset(self.grow(grow_rows), others, prune_rows)
            revision = self.prune_in_ruleset(self.grow(grow_rows, original), others, prune_rows)
            best, best_dl = original, self.ruleset_dl(ruleset)
            for candidate in (replacement, revision):
                if not candidate or candidate == original:
                    continue
                trial = ruleset[:i] + [candidate] + others
                dl = self.ruleset_dl(trial)
                if dl < best_dl:
                    best, best_dl = candidate, dl
            ruleset[i] = best
        return ruleset

    def reduce_dl(self, ruleset: list) -> list:
        """Delete rules, last first, whenever that lowers the total description length."""
        ruleset = list(ruleset)
        for i in range(len(ruleset) - 1, -1, -1):
            without = ruleset[:i] + ruleset[i + 1:]
            if self.ruleset_dl(without) < self.ruleset_dl(ruleset):
                ruleset = without
        return ruleset

    def learn(self, optimizations: int) -> list:
        everything = np.arange(self.pos.size)
        ruleset = self.reduce_dl(self.build([], everything))
        for _ in range(optimizations):
            ruleset = self.optimize(ruleset)
            uncovered = everything[~self.covered(ruleset)]
            ruleset = self.reduce_dl(self.build(ruleset, uncovered))
        return ruleset


def replay_coverage(model: RuleModel, X: np.ndarray, y: np.ndarray) -> list:
    """Per rule, the training records of its class that it is the first rule to match."""
    index = {c: i for i, c in enumerate(model.classes)}
    taken = np.zeros(X.shape[0], dtype=bool)
    out = []
    for rule in model.rules:
        hit = model.rule_mask(rule, X) & ~taken
        out.append(int(np.count_nonzero(hit & (y == index[rule.consequent]))))
        taken |= hit
    return out


def train_jrip(train, folds: int = 3, min_covered: int = 2, optimizations: int = 2, seed: int = 0) -> RuleModel:
    require_training_set(train)
    if folds < 2:
        raise ConfigError(f"folds must be at least 2, got {folds}")
    check_positive("min_covered", min_covered)
    check_positive("optimizations", optimizations, minimum=0)
    k = len(train.classes)
    counts = class_counts(train.y, k)
    present = [c for c in range(k) if counts[c] > 0]
    if len(present) < 2:
        raise DataFormatError("RIPPER needs at least two classes in the training set")
    # Ascending frequency; equal counts keep canonical order. The last one is the default.
    order = sorted(present, key=lambda c: (counts[c], c))
    rng = np.random.default_rng(seed)

    rules = []
    remaining = np.ones(len(train), dtype=bool)
    for c in order[:-1]:
        X = train.X[remaining]
        pos = train.y[remaining] == c
        stage = _Stage(X, pos, rng, folds, min_covered)
        for conds in stage.learn(optimizations):
            rules.append(Rule(tuple(conds), train.classes[c]))
        remaining &= train.y != c

    params = params_dict(folds=folds, min_covered=min_covered, optimizations=optimizations, seed=seed)
    default = train.classes[order[-1]]
    model = RuleModel("jrip", rules, default, train.classes, train.names, params)
    # Drop rules whose first-match coverage of their own class falls short of min_covered.
    while True:
        cov = replay_coverage(model, train.X, train.y)
        short = [i for i, n in enumerate(cov) if n < min_covered]
        if not short:
            break
        rules = [r for i, r in enumerate(model.rules) if i != short[0]]
        model = RuleModel("jrip", rules, default, train.classes, train.names, params)
    rules = [Rule(r.conditions, r.consequent, n) for r, n in zip(model.rules, cov)]
    return RuleModel("jrip", rules, default, train.classes, train.names, params)
