"""Windowed throughput, Jain fairness, and confidence-interval summaries."""

import numpy as np
import pytest

from xtcpsim import jain_index, mean_ci95, summarize, windowed_goodput
from xtcpsim.sim_core import MS, SECOND


class TestWindowedGoodput:
    def test_no_deliveries_all_zero(self):
        series = windowed_goodput([], SECOND)
        assert len(series) == 10
        assert all(v == 0.0 for v in series)

    def test_uniform_rate_fills_every_window(self):
        # 12.5 MB over 1 s = 100 Mbit/s in each 100 ms window
        deliveries = [(i * MS, 12_500) for i in range(1000)]
        series = windowed_goodput(deliveries, SECOND)
        assert all(v == pytest.approx(100e6) for v in series)

    def test_step_pattern_matches_per_window_sums(self):
        rng = np.random.default_rng(31)
        deliveries = [(int(t), int(b)) for t, b in zip(
            np.sort(rng.integers(0, SECOND // 2, size=400)),
            rng.integers(100, 10_000, size=400))]
        series = windowed_goodput(deliveries, SECOND)
        window = 100 * MS
        for w, got in enumerate(series):
            expected = sum(b for t, b in deliveries
                           if t // window == w) * 8.0 * SECOND / window
            assert got == expected
        assert series[5:] == [0.0] * 5


class TestJainIndex:
    def test_equal_rates_are_perfectly_fair(self):
        assert jain_index([5.0, 5.0]) == 1.0

    def test_one_starved_flow_of_two(self):
        assert jain_index([5.0, 0.0]) == 0.5

    def test_mildly_unequal_pair(self):
        # (643.2 + 519.8)^2 / (2 * (643.2^2 + 519.8^2))
        assert jain_index([643.2e6, 519.8e6]) == pytest.approx(0.98887,
                                                               abs=1e-4)

    def test_scale_invariant(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            rates = rng.uniform(0, 1e9, size=rng.integers(1, 6)).tolist()
            c = float(rng.uniform(0.001, 1000))
            assert jain_index([c * r for r in rates]) == \
                pytest.approx(jain_index(rates), rel=1e-12)

    def test_all_zero_reported_as_absent(self):
        assert jain_index([0.0, 0.0]) is None

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            jain_index([])
        with pytest.raises(ValueError):
            jain_index([1.0, -1.0])


class TestSummaries:
    def test_identical_runs_have_zero_width(self):
        mean, half = mean_ci95([100.0, 100.0, 100.0])
        assert mean == 100.0
        assert half == 0.0

    def test_two_run_interval_uses_t_distribution(self):
        mean, half = mean_ci95([100.0, 200.0])
        assert mean == 150.0
        assert half == pytest.approx(635.3, abs=0.1)

    def test_single_run_has_no_interval(self):
        mean, half = mean_ci95([42.0])
        assert mean == 42.0
        assert half is None

    def test_no_values_rejected(self):
        with pytest.raises(ValueError):
            mean_ci95([])

    def test_coverage_of_the_true_mean(self):
        """95% interval should cover the true mean about 95% of the time."""
        rng = np.random.default_rng(51)
        covered = 0
        trials = 400
        for _ in range(trials):
            sample = rng.normal(10.0, 2.0, size=200)
            mean, half = mean_ci95(sample)
            if abs(mean - 10.0) <= half:
                covered += 1
        assert covered / trials == pytest.approx(0.95, abs=0.03)

    def test_summarize_maps_metrics_to_triples(self):
        out = summarize({"rtt": [1.0, 3.0], "rate": [5.0]})
        assert out["rtt"][0] == 2.0
        assert out["rtt"][2] == 2
        assert out["rate"] == (5.0, None, 1)
