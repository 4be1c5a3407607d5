import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mibwarden.discretize import BinCuts, bin_of, fit_mdl_bins, fit_oner_buckets


def entropy_bits(labels):
    n = len(labels)
    return -sum(k / n * math.log2(k / n) for k in Counter(labels).values()) if n else 0.0


def brute_force_mdl_first_cut(values, labels):
    """Scan every midpoint between distinct values; return (cut, accepted) for the min-entropy cut."""
    pairs = sorted(zip(values, labels))
    distinct = sorted(set(values))
    n = len(pairs)
    best = None
    for lo, hi in zip(distinct, distinct[1:]):
        t = (lo + hi) / 2
        left = [c for v, c in pairs if v <= t]
        right = [c for v, c in pairs if v > t]
        e = (len(left) * entropy_bits(left) + len(right) * entropy_bits(right)) / n
        if best is None or e < best[1]:
            best = (t, e, left, right)
    t, e, left, right = best
    all_labels = [c for _, c in pairs]
    ent = entropy_bits(all_labels)
    k, k1, k2 = len(set(all_labels)), len(set(left)), len(set(right))
    delta = math.log2(3**k - 2) - (k * ent - k1 * entropy_bits(left) - k2 * entropy_bits(right))
    return t, (ent - e) > (math.log2(n - 1) + delta) / n


class TestBinOf:
    def test_no_cuts(self):
        assert bin_of(BinCuts(0, ()), 9.3) == 0

    def test_right_closed_boundary(self):
        assert bin_of(BinCuts(0, (5.0,)), 5.0) == 0
        assert bin_of(BinCuts(0, (5.0,)), 5.0000001) == 1

    def test_interior(self):
        assert bin_of(BinCuts(0, (1.0, 2.0)), 1.5) == 1

    def test_above_last_cut(self):
        assert bin_of(BinCuts(0, (1.0, 2.0)), 99.0) == 2

    def test_cuts_must_increase(self):
        with pytest.raises(ValueError):
            BinCuts(0, (2.0, 1.0))

    @given(
        cuts=st.lists(st.floats(-1e6, 1e6), max_size=8, unique=True).map(sorted),
        a=st.floats(-2e6, 2e6),
        b=st.floats(-2e6, 2e6),
    )
    def test_monotone(self, cuts, a, b):
        bc = BinCuts(0, tuple(cuts))
        lo, hi = min(a, b), max(a, b)
        assert bin_of(bc, lo) <= bin_of(bc, hi)
        assert bc.bins([lo, hi]).tolist() == [bin_of(bc, lo), bin_of(bc, hi)]


class TestOneRBuckets:
    def test_single_class(self):
        assert fit_oner_buckets([3, 1, 2, 8, 5, 7, 9], [4] * 7, 2).cuts == ()

    def test_hand_traced_cut(self):
        cuts = fit_oner_buckets(list(range(1, 13)), [0] * 6 + [1] * 6, 6)
        assert cuts.cuts == (6.5,)

    def test_bucket_cannot_close(self):
        assert fit_oner_buckets([1, 2, 3, 4], [0, 1, 0, 1], 10).cuts == ()

    def test_equal_values_never_split(self):
        cuts = fit_oner_buckets([1, 1, 1, 1, 2, 2, 2, 2], [0, 0, 0, 1, 1, 1, 1, 0], 3)
        assert all(c not in (1.0, 2.0) for c in cuts.cuts)

    def test_adjacent_same_majority_merged(self):
        # Two A-majority buckets in a row collapse into one bin.
        values = list(range(1, 19))
        labels = [0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]
        cuts = fit_oner_buckets(values, labels, 3)
        assert len(cuts.cuts) <= 2

    def test_empty(self):
        with pytest.raises(ValueError):
            fit_oner_buckets([], [], 6)


class TestMdlBins:
    def test_single_class(self):
        assert fit_mdl_bins([1.0, 2.0, 3.0, 4.0], [1, 1, 1, 1]).cuts == ()

    def test_two_clean_groups(self):
        values = [0.0] * 50 + [1.0] * 50
        labels = [0] * 50 + [1] * 50
        cut, accepted = brute_force_mdl_first_cut(values, labels)
        assert accepted and cut == 0.5
        assert fit_mdl_bins(values, labels).cuts == (0.5,)

    @pytest.mark.parametrize("seed", range(20))
    def test_first_cut_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(10, 60))
        values = np.round(rng.random(n) * 20, 1)
        labels = (values + rng.normal(0, 3, n) > 10).astype(int)
        cut, accepted = brute_force_mdl_first_cut(values.tolist(), labels.tolist())
        fitted = fit_mdl_bins(values, labels).cuts
        if accepted:
            assert cut in fitted
        else:
            assert fitted == ()

    def test_random_labels_rarely_cut(self):
        # 1000 seeds, 20 values, labels drawn uniformly from two classes.
        quiet = 0
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            quiet += fit_mdl_bins(rng.random(20), rng.integers(0, 2, 20)).cuts == ()
        assert quiet >= 950

    @settings(max_examples=80, deadline=None)
    @given(
        n_left=st.integers(10, 60),
        n_right=st.integers(10, 60),
        lo=st.floats(0, 100),
        width=st.floats(0.5, 50),
        gap=st.floats(0.1, 50),
        seed=st.integers(0, 10_000),
    )
    def test_perfectly_separated_gives_one_cut(self, n_left, n_right, lo, width, gap, seed):
        rng = np.random.default_rng(seed)
        left = lo + rng.random(n_left) * width
        right = lo + width + gap + rng.random(n_right) * width
        cuts = fit_mdl_bins(np.concatenate([left, right]), [0] * n_left + [1] * n_right).cuts
        assert len(cuts) == 1
        assert left.max() < cuts[0] < right.min()

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10_000), n=st.integers(2, 80), k=st.integers(2, 5))
    def test_cuts_lie_between_observed_values(self, seed, n, k):
        rng = np.random.default_rng(seed)
        values = np.round(rng.random(n) * 10, 1)
        labels = rng.integers(0, k, n)
        observed = np.unique(values)
        for fit in (fit_mdl_bins(values, labels), fit_oner_buckets(values, labels, 2)):
            for c in fit.cuts:
                i = np.searchsorted(observed, c)
                assert 0 < i < observed.size
                assert observed[i - 1] < c < observed[i]
