"""Congestion controllers: window recurrences, loss reactions, estimators."""

import math

import numpy as np
import pytest

from xtcpsim import (MSS, Bic, BicConfig, CrossLayer, Cubic, Illinois,
                     IllinoisConfig, NewReno, RttEstimator, XtcpConfig,
                     cubic_window, estimate_datarate, illinois_params,
                     make_controller, xtcp_cwnd)
from xtcpsim.sim_core import MS, SECOND

from conftest import FakeFlow


class TestRttEstimator:
    def test_first_sample_seeds_srtt_and_rto(self):
        est = RttEstimator()
        est.on_sample(100 * MS)
        assert est.srtt == 100 * MS
        assert est.rttvar == 50 * MS
        assert est.rto == 300 * MS

    def test_second_sample_follows_smoothing_recurrences(self):
        est = RttEstimator()
        est.on_sample(100 * MS)
        est.on_sample(200 * MS)
        assert est.rttvar == 62.5 * MS
        assert est.srtt == 112.5 * MS
        assert est.rto == 362.5 * MS

    def test_rtt_min_is_running_minimum(self):
        est = RttEstimator()
        for r in (30 * MS, 25 * MS, 40 * MS):
            est.on_sample(r)
        assert est.rtt_min == 25 * MS

    def test_rto_clamped_to_floor(self):
        est = RttEstimator(rto_min_ns=200 * MS)
        est.on_sample(10 * MS)
        assert est.rto == 200 * MS

    def test_rto_clamped_to_ceiling(self):
        est = RttEstimator(rto_max_ns=60 * SECOND)
        est.on_sample(100 * SECOND)
        assert est.rto == 60 * SECOND

    def test_non_positive_sample_rejected(self):
        with pytest.raises(ValueError):
            RttEstimator().on_sample(0)


class TestCrossLayerWindow:
    CFG = XtcpConfig()

    def test_clean_link_pins_window_to_bdp(self):
        cwnd = xtcp_cwnd(1e9, 22 * MS, 22 * MS, 10.0, self.CFG)
        assert cwnd == 2_750_000.0

    def test_low_sinr_scales_window_down(self):
        cwnd = xtcp_cwnd(1e9, 22 * MS, 22 * MS, -5.0, self.CFG)
        assert cwnd == 2_337_500.0

    def test_inflated_rtt_scales_window_down(self):
        cwnd = xtcp_cwnd(1e9, 35 * MS, 22 * MS, 10.0, self.CFG)
        assert cwnd == 2_337_500.0

    def test_branch_ratio_is_exactly_lambda(self):
        full = xtcp_cwnd(1e9, 22 * MS, 22 * MS, 10.0, self.CFG)
        scaled = xtcp_cwnd(1e9, 22 * MS, 22 * MS, -5.0, self.CFG)
        assert scaled / full == 0.85

    def test_rtt_tolerance_boundary_takes_unscaled_branch(self):
        # sample exactly at rtt_min + epsilon: the comparison is inclusive
        cwnd = xtcp_cwnd(1e9, 32 * MS, 22 * MS, 10.0, self.CFG)
        assert cwnd == 2_750_000.0
        cwnd = xtcp_cwnd(1e9, 32 * MS + 1, 22 * MS, 10.0, self.CFG)
        assert cwnd == 0.85 * 2_750_000.0

    def test_sinr_gate_boundary_takes_unscaled_branch(self):
        # exactly 0 dB: the comparison is inclusive
        cwnd = xtcp_cwnd(1e9, 22 * MS, 22 * MS, 0.0, self.CFG)
        assert cwnd == 2_750_000.0
        cwnd = xtcp_cwnd(1e9, 22 * MS, 22 * MS, -1e-9, self.CFG)
        assert cwnd == 0.85 * 2_750_000.0

    def test_zero_datarate_floors_at_one_segment(self):
        assert xtcp_cwnd(0.0, 22 * MS, 22 * MS, 10.0, self.CFG) == MSS

    def test_two_valued_branch_invariance(self):
        """For fixed rate and rtt_min the window takes exactly two values."""
        rng = np.random.default_rng(3)
        seen = set()
        for _ in range(500):
            sample = (22 + 30 * rng.random()) * MS
            sinr = -10 + 30 * rng.random()
            seen.add(xtcp_cwnd(2e9, sample, 22 * MS, sinr, self.CFG))
        assert seen == {5_500_000.0, 0.85 * 5_500_000.0}

    def test_controller_recompute_ignores_intervening_losses(self):
        cc = CrossLayer()
        flow = FakeFlow(cwnd_segments=1.0)
        flow.rtt.on_sample(22 * MS)
        cc.on_ack(flow, MSS, 1, 22 * MS, 0, datarate_bps=1e9, sinr_db=10.0)
        after_clean = flow.cwnd
        cc.on_dup_ack_loss(flow, 0)
        cc.on_ack(flow, MSS, 1, 22 * MS, 0, datarate_bps=1e9, sinr_db=10.0)
        assert flow.cwnd == after_clean
        assert flow.ssthresh == math.inf

    def test_controller_rto_resets_to_one_segment(self):
        cc = CrossLayer()
        flow = FakeFlow(cwnd_segments=1000.0)
        cc.on_rto(flow, 0)
        assert flow.cwnd == MSS

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            XtcpConfig(lam=0.0)
        with pytest.raises(ValueError):
            XtcpConfig(lam=1.5)
        with pytest.raises(ValueError):
            XtcpConfig(epsilon_ns=0)


class TestDatarateEstimator:
    def test_empty_history_is_zero(self):
        assert estimate_datarate([], 100 * MS, 100 * MS) == 0.0

    def test_uniform_window_matches_hand_arithmetic(self):
        # 1000 allocations of 20,000 B inside a 100 ms window: 1.6 Gbit/s
        # gross, scaled by eta = 1400/1460 for the 60 B of headers.
        hist = [(i * 100_000 + 1, 20_000) for i in range(1000)]
        rate = estimate_datarate(hist, 100 * MS, 100 * MS)
        assert rate == pytest.approx(1.6e9 * 1400 / 1460)
        assert rate == pytest.approx(1.534e9, rel=1e-3)

    def test_window_straddling_a_rate_change(self):
        # full-rate subframes in the first half, silence after: the window
        # average is the exact time-weighted mean of the two regimes
        hist = [(i * 100_000, 40_000) for i in range(500)]
        rate = estimate_datarate(hist, 100 * MS, 100 * MS)
        oracle = sum(b for t, b in hist if 0 < t <= 100 * MS) \
            * 8.0 * (1400 / 1460) * SECOND / (100 * MS)
        assert rate == oracle

    def test_matches_brute_force_sum_on_randomized_histories(self):
        rng = np.random.default_rng(17)
        window = 100 * MS
        for _ in range(1000):
            n = int(rng.integers(0, 300))
            now = int(rng.integers(window, 10 * SECOND))
            times = np.sort(rng.integers(0, now + window // 2, size=n))
            sizes = rng.integers(0, 40_001, size=n)
            hist = list(zip(times.tolist(), sizes.tolist()))
            oracle = sum(b for t, b in hist if now - window < t <= now)
            expected = oracle * 8.0 * (1400 / 1460) * SECOND / window
            assert estimate_datarate(hist, now, window) == expected


class TestNewReno:
    def test_slow_start_adds_one_segment_per_ack(self):
        flow = FakeFlow(cwnd_segments=10.0, ssthresh=100 * MSS)
        NewReno().on_ack(flow, MSS, 1, 22 * MS, 0)
        assert flow.cwnd == 11 * MSS

    def test_congestion_avoidance_grows_reciprocally(self):
        flow = FakeFlow(cwnd_segments=10.0, ssthresh=10 * MSS)
        NewReno().on_ack(flow, MSS, 1, 22 * MS, 0)
        assert flow.cwnd == 14_000 + 1400 * 1400 / 14_000 == 14_140.0

    def test_timeout_halves_threshold_and_collapses_window(self):
        flow = FakeFlow(cwnd_segments=100.0, flight_segments=100.0)
        NewReno().on_rto(flow, 0)
        assert flow.cwnd == 1 * MSS
        assert flow.ssthresh == 50 * MSS

    def test_dup_ack_loss_halves_flight(self):
        flow = FakeFlow(cwnd_segments=80.0, flight_segments=60.0)
        NewReno().on_dup_ack_loss(flow, 0)
        assert flow.ssthresh == 30 * MSS
        assert flow.cwnd == 30 * MSS

    def test_threshold_repeatedly_halves_under_repeated_loss(self):
        cc = NewReno()
        flow = FakeFlow(cwnd_segments=256.0, flight_segments=256.0)
        seen = []
        for _ in range(6):
            flow._flight = flow.cwnd
            cc.on_dup_ack_loss(flow, 0)
            seen.append(flow.ssthresh)
        assert seen == [128 * MSS, 64 * MSS, 32 * MSS, 16 * MSS,
                        8 * MSS, 4 * MSS]
        # and never below the two-segment floor
        for _ in range(5):
            flow._flight = flow.cwnd
            cc.on_dup_ack_loss(flow, 0)
        assert flow.ssthresh == 2 * MSS
        assert flow.cwnd >= MSS


class TestBic:
    def test_loss_applies_multiplicative_decrease(self):
        cc = Bic()
        flow = FakeFlow(cwnd_segments=200.0)
        cc.on_dup_ack_loss(flow, 0)
        assert cc.w_max == 200.0
        assert flow.cwnd == 160 * MSS

    def test_large_gap_clamps_to_max_probe_step(self):
        cc = Bic()
        cc.w_max = 200.0
        assert cc.per_rtt_increment(100.0) == 32.0

    def test_small_gap_uses_midpoint(self):
        cc = Bic()
        cc.w_max = 200.0
        assert cc.per_rtt_increment(190.0) == 5.0

    def test_low_window_behaves_additively(self):
        cc = Bic()
        cc.w_max = 200.0
        assert cc.per_rtt_increment(10.0) == 1.0

    def test_above_old_maximum_probes_mirror_distance(self):
        cc = Bic()
        cc.w_max = 100.0
        assert cc.per_rtt_increment(120.0) == 20.0

    def test_gap_floor_is_one_segment(self):
        cc = Bic()
        cc.w_max = 200.0
        assert cc.per_rtt_increment(199.9) == 1.0

    def test_timeout_halves_threshold(self):
        cc = Bic()
        flow = FakeFlow(cwnd_segments=100.0, flight_segments=100.0)
        cc.on_rto(flow, 0)
        assert flow.cwnd == MSS
        assert flow.ssthresh == 50 * MSS


class TestCubic:
    def test_inflection_point_returns_to_old_maximum(self):
        k = (100.0 * 0.3 / 0.4) ** (1.0 / 3.0)
        assert cubic_window(k, 100.0) == 100.0

    def test_origin_value_is_beta_fraction_of_maximum(self):
        assert cubic_window(0.0, 100.0) == pytest.approx(70.0, rel=1e-9)

    def test_one_second_past_inflection(self):
        k = (75.0) ** (1.0 / 3.0)
        assert cubic_window(k + 1.0, 100.0) == pytest.approx(100.4, rel=1e-9)

    def test_closed_form_against_independent_evaluation(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            w_max = float(rng.uniform(2, 5000))
            t = float(rng.uniform(0, 60))
            k = math.pow(w_max * 0.3 / 0.4, 1.0 / 3.0)
            expected = 0.4 * (t - k) ** 3 + w_max
            assert cubic_window(t, w_max) == pytest.approx(expected, rel=1e-9)

    def test_loss_applies_beta_decrease_and_fast_convergence(self):
        cc = Cubic()
        flow = FakeFlow(cwnd_segments=100.0)
        cc.w_max = 200.0   # still below the old maximum: shrink the target
        cc.on_dup_ack_loss(flow, 0)
        assert cc.w_max == pytest.approx(100.0 * (2.0 - 0.7) / 2.0)
        assert flow.cwnd == pytest.approx(70 * MSS)

    def test_timeout_halves_threshold(self):
        cc = Cubic()
        flow = FakeFlow(cwnd_segments=100.0, flight_segments=100.0)
        cc.on_rto(flow, 0)
        assert flow.cwnd == MSS
        assert flow.ssthresh == 50 * MSS


class TestIllinois:
    def test_alpha_plateaus_at_maximum_below_small_delay(self):
        alpha, beta = illinois_params(0.005, 1.0)
        assert alpha == 10.0
        assert beta == 0.125

    def test_beta_plateaus_at_maximum_beyond_large_delay(self):
        _, beta = illinois_params(0.85, 1.0)
        assert beta == 0.5

    def test_alpha_reaches_minimum_at_maximum_delay(self):
        alpha, _ = illinois_params(1.0, 1.0)
        assert alpha == pytest.approx(0.3, rel=1e-9)

    def test_alpha_continuous_at_plateau_edge(self):
        cfg = IllinoisConfig()
        alpha, _ = illinois_params(cfg.d1_frac * 1.0, 1.0, cfg)
        assert alpha == pytest.approx(10.0, rel=1e-9)

    def test_beta_ramps_linearly_between_thresholds(self):
        _, beta = illinois_params(0.45, 1.0)   # midpoint of [0.1, 0.8]
        assert beta == pytest.approx(0.3125, rel=1e-9)

    def test_zero_max_delay_falls_back_to_aggressive_defaults(self):
        assert illinois_params(0.0, 0.0) == (10.0, 0.125)

    def test_timeout_halves_threshold(self):
        cc = Illinois()
        flow = FakeFlow(cwnd_segments=100.0, flight_segments=100.0)
        cc.on_rto(flow, 0)
        assert flow.cwnd == MSS
        assert flow.ssthresh == 50 * MSS


class TestControllerFactory:
    def test_known_flavors(self):
        assert isinstance(make_controller("newreno"), NewReno)
        assert isinstance(make_controller("bic"), Bic)
        assert isinstance(make_controller("cubic"), Cubic)
        assert isinstance(make_controller("illinois"), Illinois)
        assert isinstance(make_controller("xtcp"), CrossLayer)

    def test_unknown_flavor_rejected(self):
        with pytest.raises(ValueError):
            make_controller("vegas")

    def test_window_never_falls_below_one_segment(self):
        rng = np.random.default_rng(4)
        for name in ("newreno", "bic", "cubic", "illinois"):
            cc = make_controller(name)
            flow = FakeFlow(cwnd_segments=float(rng.uniform(2, 50)))
            flow.rtt.on_sample(25 * MS)
            for _ in range(50):
                flow._flight = flow.cwnd
                action = rng.integers(0, 3)
                if action == 0:
                    flow.ssthresh = min(flow.ssthresh, flow.cwnd)
                    cc.on_ack(flow, MSS, 1, 25 * MS, 0)
                elif action == 1:
                    cc.on_dup_ack_loss(flow, 0)
                else:
                    cc.on_rto(flow, 0)
                assert flow.cwnd >= MSS
