import math
import random

import pytest
import scipy.stats

from sapphire.evaluation.stats import (
    correlate,
    kendall,
    pearson,
    pitman_test,
    spearman,
)
from reference_impls import (
    exhaustive_pitman,
    textbook_kendall_tau_b,
    textbook_pearson,
    textbook_spearman,
)


def random_sample(rng, n=None, ties=True):
    n = n or rng.randint(3, 12)
    if ties:
        xs = [float(rng.randint(1, 4)) for _ in range(n)]
        ys = [float(rng.randint(1, 6)) for _ in range(n)]
    else:
        xs = [rng.random() for _ in range(n)]
        ys = [rng.random() for _ in range(n)]
    return xs, ys


def non_constant(values):
    return len(set(values)) > 1


class TestCoefficients:
    def test_perfect_linear(self):
        r, p = pearson([1, 2, 3], [2, 4, 6])
        assert r == 1.0 and p == 0.0
        rho, _ = spearman([1, 2, 3], [2, 4, 6])
        tau, _ = kendall([1, 2, 3], [2, 4, 6])
        assert rho == 1.0 and tau == 1.0

    def test_perfect_inverse(self):
        tau, _ = kendall([1, 2, 3], [3, 2, 1])
        assert tau == -1.0
        r, _ = pearson([1, 2, 3], [3, 2, 1])
        assert r == -1.0

    def test_eight_point_sample_matches_textbook(self):
        rng = random.Random(42)
        xs = [rng.random() for _ in range(8)]
        ys = [rng.random() for _ in range(8)]
        assert pearson(xs, ys)[0] == pytest.approx(textbook_pearson(xs, ys), abs=1e-12)
        assert spearman(xs, ys)[0] == pytest.approx(textbook_spearman(xs, ys), abs=1e-12)
        assert kendall(xs, ys)[0] == pytest.approx(textbook_kendall_tau_b(xs, ys), abs=1e-12)

    def test_random_samples_match_textbook(self):
        rng = random.Random(7)
        checked = 0
        while checked < 500:
            xs, ys = random_sample(rng, ties=rng.random() < 0.5)
            if not (non_constant(xs) and non_constant(ys)):
                continue
            checked += 1
            assert pearson(xs, ys)[0] == pytest.approx(textbook_pearson(xs, ys), abs=1e-12)
            assert spearman(xs, ys)[0] == pytest.approx(textbook_spearman(xs, ys), abs=1e-12)
            assert kendall(xs, ys)[0] == pytest.approx(textbook_kendall_tau_b(xs, ys), abs=1e-12)

    def test_agrees_with_scipy(self):
        rng = random.Random(11)
        for _ in range(50):
            xs, ys = random_sample(rng)
            if not (non_constant(xs) and non_constant(ys)):
                continue
            assert pearson(xs, ys)[0] == pytest.approx(scipy.stats.pearsonr(xs, ys)[0], abs=1e-12)
            assert spearman(xs, ys)[0] == pytest.approx(scipy.stats.spearmanr(xs, ys)[0], abs=1e-12)
            assert kendall(xs, ys)[0] == pytest.approx(scipy.stats.kendalltau(xs, ys)[0], abs=1e-12)

    def test_linear_transform_property(self):
        rng = random.Random(3)
        for _ in range(20):
            xs = [rng.random() * 10 for _ in range(rng.randint(3, 9))]
            if not non_constant(xs):
                continue
            a = rng.random() * 5 + 0.1
            b = rng.random() * 4 - 2
            up = [a * x + b for x in xs]
            down = [-a * x + b for x in xs]
            assert pearson(xs, up)[0] == pytest.approx(1.0, abs=1e-12)
            assert pearson(xs, down)[0] == pytest.approx(-1.0, abs=1e-12)

    def test_coefficients_in_range(self):
        rng = random.Random(13)
        for _ in range(100):
            xs, ys = random_sample(rng)
            if not (non_constant(xs) and non_constant(ys)):
                continue
            for fn in (pearson, spearman, kendall):
                value, p = fn(xs, ys)
                assert -1.0 <= value <= 1.0
                assert 0.0 <= p <= 1.0

    def test_constant_input_rejected(self):
        with pytest.raises(ValueError):
            pearson([1, 1, 1], [1, 2, 3])


class TestCorrelateOperation:
    def test_perfect_monotone(self):
        per_example = {f"e{i}": {"m": float(2 * s)} for i, s in enumerate([1, 2, 3])}
        sizes = {f"e{i}": s for i, s in enumerate([1, 2, 3])}
        report = correlate(per_example, sizes)
        result = report.per_metric["m"]
        assert result.pcc == 1.0 and result.spearman_rho == 1.0 and result.kendall_tau == 1.0

    def test_inverse_tau(self):
        per_example = {f"e{i}": {"m": float(v)} for i, v in enumerate([3, 2, 1])}
        sizes = {f"e{i}": s for i, s in enumerate([1, 2, 3])}
        assert correlate(per_example, sizes).per_metric["m"].kendall_tau == -1.0

    def test_constant_metric_absent(self):
        per_example = {f"e{i}": {"m": 5.0} for i in range(4)}
        sizes = {f"e{i}": i + 3 for i in range(4)}
        report = correlate(per_example, sizes)
        assert "m" not in report.per_metric
        assert "m" in report.absent

    def test_too_few_examples_absent(self):
        per_example = {"a": {"m": 1.0}, "b": {"m": 2.0}}
        sizes = {"a": 3, "b": 4}
        assert "m" in correlate(per_example, sizes).absent

    def test_significance_flags(self):
        rng = random.Random(19)
        n = 60
        sizes = {f"e{i}": rng.choice([3, 4, 5]) for i in range(n)}
        per_example = {
            ex_id: {"correlated": 10.0 * size + rng.gauss(0, 0.5), "noise": rng.gauss(0, 1)}
            for ex_id, size in sizes.items()
        }
        report = correlate(per_example, sizes)
        assert report.per_metric["correlated"].significant()["pcc"] is True
        assert report.per_metric["correlated"].to_dict()["significant"]["kendall_tau"] is True


class TestPitman:
    def test_all_zero_diffs(self):
        assert pitman_test([0.0, 0.0, 0.0]).p_value == 1.0

    def test_ones_exhaustive(self):
        result = pitman_test([1.0, 1.0, 1.0])
        assert result.exhaustive
        assert result.p_value == 0.25

    def test_matches_oracle_random(self):
        rng = random.Random(29)
        for _ in range(30):
            diffs = [rng.gauss(0, 1) for _ in range(rng.randint(1, 10))]
            assert pitman_test(diffs).p_value == pytest.approx(exhaustive_pitman(diffs), abs=1e-12)

    def test_symmetry_under_negation(self):
        rng = random.Random(31)
        for _ in range(20):
            diffs = [rng.gauss(0, 1) for _ in range(rng.randint(2, 12))]
            assert pitman_test(diffs).p_value == pitman_test([-d for d in diffs]).p_value

    def test_monte_carlo_agrees_with_exhaustive(self):
        rng = random.Random(37)
        diffs = [rng.gauss(0.3, 1.0) for _ in range(15)]
        exact = pitman_test(diffs, cutoff=20)
        mc = pitman_test(diffs, cutoff=10, mc_samples=100_000, seed=4)
        assert exact.exhaustive and not mc.exhaustive
        assert mc.p_value == pytest.approx(exact.p_value, abs=0.01)
        se = math.sqrt(exact.p_value * (1 - exact.p_value) / 100_000)
        assert abs(mc.p_value - exact.p_value) <= max(3 * se, 2e-4)

    def test_truncated_prefix_cross_check(self):
        rng = random.Random(41)
        diffs = [rng.gauss(0.2, 1.0) for _ in range(25)]
        prefix = diffs[:15]
        exact = pitman_test(prefix, cutoff=20)
        mc = pitman_test(prefix, cutoff=5, mc_samples=100_000, seed=8)
        assert abs(mc.p_value - exact.p_value) <= 0.01

    def test_p_in_unit_interval(self):
        rng = random.Random(43)
        for _ in range(20):
            diffs = [rng.gauss(0, 2) for _ in range(rng.randint(1, 18))]
            p = pitman_test(diffs).p_value
            assert 0.0 < p <= 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            pitman_test([])

    def test_monte_carlo_deterministic_per_seed(self):
        diffs = [0.5, -0.2, 1.0] * 10
        a = pitman_test(diffs, cutoff=5, mc_samples=20_000, seed=3)
        b = pitman_test(diffs, cutoff=5, mc_samples=20_000, seed=3)
        assert a.p_value == b.p_value
