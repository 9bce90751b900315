import math

import numpy as np
import pytest
from scipy import stats

from alcs.metrics import (
    EXACT_LIMIT,
    confusion_counts,
    macro_f1,
    mean_ci,
    wilcoxon_paired,
)

from oracles import macro_f1_oracle, wilcoxon_enumeration_oracle


class TestConfusion:
    def test_counts(self):
        mat = confusion_counts([0, 0, 1, 1], [0, 1, 1, 1], n_classes=2)
        np.testing.assert_array_equal(mat, [[1, 1], [0, 2]])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            confusion_counts([0, 3], [0, 1], n_classes=2)


class TestMacroF1:
    def test_perfect(self):
        assert macro_f1([0, 1, 2], [0, 1, 2]) == 1.0

    def test_hand_worked_two_class(self):
        # F1(class 0) = 2/3, F1(class 1) = 4/5, mean = 11/15
        value = macro_f1([0, 0, 1, 1], [0, 1, 1, 1])
        assert value == pytest.approx(11.0 / 15.0, abs=1e-9)
        assert value == pytest.approx(0.7333333333333334, abs=1e-9)

    def test_never_predicted_class_scores_zero(self):
        # class 1 never emitted: F1(1)=0 still averaged in
        assert macro_f1([0, 0, 1], [0, 0, 0]) == pytest.approx(0.8 / 2, abs=1e-12)

    def test_matches_oracle_on_random_labelings(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            n = int(rng.integers(4, 40))
            k = int(rng.integers(2, 5))
            y_true = rng.integers(0, k, size=n)
            y_true[: k] = np.arange(k)
            y_pred = rng.integers(0, k, size=n)
            assert macro_f1(y_true, y_pred) == pytest.approx(
                macro_f1_oracle(y_true.tolist(), y_pred.tolist()), abs=1e-12
            )

    def test_permutation_invariance(self):
        rng = np.random.default_rng(7)
        y_true = rng.integers(0, 3, size=30)
        y_true[:3] = [0, 1, 2]
        y_pred = rng.integers(0, 3, size=30)
        perm = rng.permutation(30)
        assert macro_f1(y_true, y_pred) == pytest.approx(
            macro_f1(y_true[perm], y_pred[perm]), abs=1e-12
        )

    def test_relabel_invariance(self):
        y_true = np.array([0, 0, 1, 1, 2, 2])
        y_pred = np.array([0, 1, 1, 2, 2, 2])
        remap = np.array([5, 9, 1])  # arbitrary distinct ids
        assert macro_f1(remap[y_true], remap[y_pred]) == pytest.approx(
            macro_f1(y_true, y_pred), abs=1e-12
        )

    def test_equals_accuracy_under_symmetric_binary_errors(self):
        y_true = [0] * 10 + [1] * 10
        y_pred = list(y_true)
        for i in (0, 1, 10, 11):  # two flips each way
            y_pred[i] = 1 - y_pred[i]
        acc = float(np.mean(np.asarray(y_true) == np.asarray(y_pred)))
        assert macro_f1(y_true, y_pred) == pytest.approx(acc, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            macro_f1([0, 1], [0])


class TestMeanCI:
    def test_constant_samples(self):
        mean, lower, upper = mean_ci([0.5] * 6)
        assert (mean, lower, upper) == (0.5, 0.5, 0.5)

    def test_five_sample_textbook_case(self):
        mean, lower, upper = mean_ci([1, 2, 3, 4, 5])
        assert mean == 3.0
        half = (upper - lower) / 2.0
        t = stats.t.ppf(0.975, df=4)
        expected = t * np.std([1, 2, 3, 4, 5], ddof=1) / math.sqrt(5)
        assert half == pytest.approx(expected, abs=1e-9)
        assert half == pytest.approx(1.9637, abs=1e-3)
        assert upper - mean == pytest.approx(mean - lower, abs=1e-12)

    def test_two_sample_case(self):
        mean, lower, upper = mean_ci([0.0, 1.0])
        assert mean == 0.5
        assert (upper - lower) / 2.0 == pytest.approx(6.353, abs=1e-3)

    def test_width_shrinks_with_n(self):
        rng = np.random.default_rng(3)
        base = rng.standard_normal(8)
        small = mean_ci(base)
        big = mean_ci(np.concatenate([base + 0.01 * rng.standard_normal(8)
                                      for _ in range(8)]))
        assert big[2] - big[1] < small[2] - small[1]

    def test_requires_two_samples(self):
        with pytest.raises(ValueError):
            mean_ci([1.0])
        with pytest.raises(ValueError):
            mean_ci([])


class TestWilcoxon:
    def test_identical_sequences(self):
        res = wilcoxon_paired([1, 2, 3, 4, 5], [1, 2, 3, 4, 5])
        assert res.p_value == 1.0
        assert res.n_effective == 0
        assert res.method == "exact"

    def test_six_positive_distinct_differences(self):
        a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        b = [0.0] * 6
        res = wilcoxon_paired(a, b)
        assert res.statistic == 0.0
        assert res.p_value == 0.03125  # 2 / 2^6 exactly
        assert res.method == "exact"
        assert res.n_effective == 6

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(100)
        for seed in range(8):
            a = rng.standard_normal(10)
            b = rng.standard_normal(10)
            res = wilcoxon_paired(a, b)
            w_ref, p_ref = wilcoxon_enumeration_oracle(a, b)
            assert res.statistic == w_ref
            assert res.p_value == pytest.approx(p_ref, abs=1e-12), seed
            assert res.method == "exact"

    def test_tied_magnitudes_match_oracle(self):
        a = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0]
        b = [0.0, 0.0, 4.0, 0.0, 6.0, 0.0, 0.0]
        res = wilcoxon_paired(a, b)
        w_ref, p_ref = wilcoxon_enumeration_oracle(a, b)
        assert res.statistic == w_ref
        assert res.p_value == pytest.approx(p_ref, abs=1e-12)

    def test_zero_differences_dropped(self):
        a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]
        b = [1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        res = wilcoxon_paired(a, b)
        assert res.n_effective == 5
        reduced = wilcoxon_paired([3.0, 4.0, 5.0, 6.0, 7.0], [0.0] * 5)
        assert res.p_value == reduced.p_value

    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal(12)
        b = rng.standard_normal(12)
        left = wilcoxon_paired(a, b)
        right = wilcoxon_paired(b, a)
        assert left.p_value == right.p_value
        assert left.statistic == right.statistic

    def test_exact_and_normal_agree_at_boundary(self):
        rng = np.random.default_rng(31)
        for _ in range(3):
            a = rng.standard_normal(EXACT_LIMIT) + 0.3
            b = rng.standard_normal(EXACT_LIMIT)
            res = wilcoxon_paired(a, b)
            assert res.method == "exact"
            assert res.n_effective == EXACT_LIMIT
            # independent normal-approximation computation
            diffs = a - b
            ranks = stats.rankdata(np.abs(diffs))
            w = min(ranks[diffs > 0].sum(), ranks[diffs < 0].sum())
            n = EXACT_LIMIT
            mean = n * (n + 1) / 4.0
            sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0)
            z = (w - mean + 0.5) / sigma
            p_norm = min(1.0, 2.0 * stats.norm.cdf(z))
            assert abs(res.p_value - p_norm) < 0.01

    def test_large_n_uses_normal_approximation(self):
        rng = np.random.default_rng(15)
        a = rng.standard_normal(EXACT_LIMIT + 1) + 1.0
        b = rng.standard_normal(EXACT_LIMIT + 1)
        res = wilcoxon_paired(a, b)
        assert res.method == "normal_approximation"
        assert res.n_effective == EXACT_LIMIT + 1
        assert 0.0 < res.p_value <= 1.0

    def test_normal_path_matches_scipy(self):
        rng = np.random.default_rng(77)
        a = rng.standard_normal(40) + 0.2
        b = rng.standard_normal(40)
        res = wilcoxon_paired(a, b)
        ref = stats.wilcoxon(a, b, correction=True, mode="approx")
        assert res.statistic == pytest.approx(float(ref.statistic), abs=1e-9)
        assert res.p_value == pytest.approx(float(ref.pvalue), abs=1e-9)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            wilcoxon_paired([1, 2, 3, 4], [0, 0, 0, 0])
        with pytest.raises(ValueError):
            wilcoxon_paired([1, 2, 3, 4, 5], [0, 0, 0])
