"""Congestion controllers and estimators.

Five pluggable window algorithms: the cross-layer controller that pins cwnd
to the estimated link bandwidth-delay product, plus NewReno, BIC, CUBIC and
Illinois baselines with their originally proposed constants.  Also the
RFC 6298 smoothed-RTT/RTO estimator and the sliding-window data-rate
estimator fed by DCI allocations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sim_core import MS, SECOND

MSS = 1400


@dataclass
class RttEstimator:
    """RFC 6298 with g=1/8, h=1/4 and a running path-RTT minimum."""

    rto_min_ns: int = 200 * MS
    rto_max_ns: int = 60 * SECOND
    srtt: float = 0.0
    rttvar: float = 0.0
    rto: float = float(SECOND)
    rtt_min: float = math.inf
    _has_sample: bool = False

    def on_sample(self, r_ns: float) -> None:
        if r_ns <= 0:
            raise ValueError("RTT sample must be positive")
        if not self._has_sample:
            self.srtt = r_ns
            self.rttvar = r_ns / 2.0
            self._has_sample = True
        else:
            self.rttvar = 0.75 * self.rttvar + 0.25 * abs(self.srtt - r_ns)
            self.srtt = 0.875 * self.srtt + 0.125 * r_ns
        self.rto = min(max(self.srtt + 4.0 * self.rttvar, self.rto_min_ns),
                       self.rto_max_ns)
        if r_ns < self.rtt_min:
            self.rtt_min = r_ns


def estimate_datarate(dci_history, now_ns: int, window_ns: int,
                      mss: int = MSS, header_bytes: int = 60) -> float:
    """Offered link rate in bit/s over (now - window, now].

    Sums TB payload bytes of the DCIs inside the window and scales the
    result by the header overhead eta = mss / (mss + header_bytes) so the
    estimate reflects application-level bytes.
    """
    lo = now_ns - window_ns
    total = 0
    for t, tb_bytes in dci_history:
        if lo < t <= now_ns:
            total += tb_bytes
    eta = mss / (mss + header_bytes)
    return total * 8.0 * eta * SECOND / window_ns


# --------------------------------------------------------------------------
# Controller protocol: each returns nothing but mutates flow.cwnd /
# flow.ssthresh.  The flow object exposes cwnd, ssthresh, mss,
# bytes_in_flight(), and its RttEstimator.


class NewReno:
    """AIMD: +MSS per RTT in congestion avoidance, halve on loss."""

    needs_cross_layer = False

    def on_ack(self, flow, newly_acked: int, n_acks: int, rtt_ns, now_ns) -> None:
        mss = flow.mss
        if flow.cwnd < flow.ssthresh:
            flow.cwnd += min(newly_acked, n_acks * mss)
        else:
            for _ in range(n_acks):
                flow.cwnd += mss * mss / flow.cwnd

    def on_dup_ack_loss(self, flow, now_ns) -> None:
        flow.ssthresh = max(flow.bytes_in_flight() / 2.0, 2 * flow.mss)
        flow.cwnd = flow.ssthresh

    def on_rto(self, flow, now_ns) -> None:
        flow.ssthresh = max(min(flow.cwnd, flow.bytes_in_flight()) / 2.0,
                            2 * flow.mss)
        flow.cwnd = flow.mss


@dataclass
class BicConfig:
    beta: float = 0.8
    s_max_segments: int = 32
    low_window_segments: int = 14


class Bic:
    """Binary search toward the pre-loss window, mirrored probing above it."""

    needs_cross_layer = False

    def __init__(self, cfg: BicConfig | None = None):
        self.cfg = cfg or BicConfig()
        self.w_max = 0.0            # segments; 0 means unset

    def per_rtt_increment(self, w: float) -> float:
        """Window growth per RTT, in segments."""
        c = self.cfg
        if w < c.low_window_segments:
            return 1.0
        if self.w_max > w:
            gap = (self.w_max - w) / 2.0
        else:
            gap = w - self.w_max if self.w_max > 0 else 1.0
        return min(max(gap, 1.0), float(c.s_max_segments))

    def on_ack(self, flow, newly_acked: int, n_acks: int, rtt_ns, now_ns) -> None:
        mss = flow.mss
        if flow.cwnd < flow.ssthresh:
            flow.cwnd += min(newly_acked, n_acks * mss)
            return
        for _ in range(n_acks):
            inc = self.per_rtt_increment(flow.cwnd / mss)
            flow.cwnd += inc * mss * mss / flow.cwnd

    def on_dup_ack_loss(self, flow, now_ns) -> None:
        w = flow.cwnd / flow.mss
        self.w_max = w
        flow.cwnd = max(self.cfg.beta * flow.cwnd, 2 * flow.mss)
        flow.ssthresh = flow.cwnd

    def on_rto(self, flow, now_ns) -> None:
        self.w_max = flow.cwnd / flow.mss
        flow.ssthresh = max(min(flow.cwnd, flow.bytes_in_flight()) / 2.0,
                            2 * flow.mss)
        flow.cwnd = flow.mss


@dataclass
class CubicConfig:
    c: float = 0.4
    beta: float = 0.7


def cubic_window(t_since_loss_s: float, w_max_segments: float,
                 cfg: CubicConfig | None = None) -> float:
    """Closed-form CUBIC window W(t) = C (t - K)^3 + W_max, in segments."""
    cfg = cfg or CubicConfig()
    k = (w_max_segments * (1.0 - cfg.beta) / cfg.c) ** (1.0 / 3.0)
    return cfg.c * (t_since_loss_s - k) ** 3 + w_max_segments


class Cubic:
    """RFC 8312-style: cubic target plus TCP-friendly floor, fast convergence."""

    needs_cross_layer = False

    def __init__(self, cfg: CubicConfig | None = None):
        self.cfg = cfg or CubicConfig()
        self.w_max = 0.0            # segments
        self.epoch_start_ns: int | None = None

    def on_ack(self, flow, newly_acked: int, n_acks: int, rtt_ns, now_ns) -> None:
        mss = flow.mss
        if flow.cwnd < flow.ssthresh:
            flow.cwnd += min(newly_acked, n_acks * mss)
            return
        if self.epoch_start_ns is None:
            self.epoch_start_ns = now_ns
            if self.w_max < flow.cwnd / mss:
                self.w_max = flow.cwnd / mss
        t = (now_ns - self.epoch_start_ns) / SECOND
        rtt_s = (flow.rtt.srtt or float(MS)) / SECOND
        target = cubic_window(t + rtt_s, self.w_max, self.cfg)
        # TCP-friendly region
        w_est = (self.w_max * self.cfg.beta
                 + 3.0 * (1.0 - self.cfg.beta) / (1.0 + self.cfg.beta)
                 * (t / max(rtt_s, 1e-9)))
        target = max(target, w_est)
        w = flow.cwnd / mss
        for _ in range(n_acks):
            if target > w:
                w += (target - w) / w
        flow.cwnd = w * mss

    def on_dup_ack_loss(self, flow, now_ns) -> None:
        w = flow.cwnd / flow.mss
        if w < self.w_max:
            self.w_max = w * (2.0 - self.cfg.beta) / 2.0   # fast convergence
        else:
            self.w_max = w
        self.epoch_start_ns = None
        flow.cwnd = max(self.cfg.beta * flow.cwnd, 2 * flow.mss)
        flow.ssthresh = flow.cwnd

    def on_rto(self, flow, now_ns) -> None:
        self.w_max = 0.0
        self.epoch_start_ns = None
        flow.ssthresh = max(min(flow.cwnd, flow.bytes_in_flight()) / 2.0,
                            2 * flow.mss)
        flow.cwnd = flow.mss


@dataclass
class IllinoisConfig:
    alpha_max: float = 10.0
    alpha_min: float = 0.3
    beta_min: float = 0.125
    beta_max: float = 0.5
    d1_frac: float = 0.01
    d2_frac: float = 0.1
    d3_frac: float = 0.8


def illinois_params(d_a: float, d_m: float,
                    cfg: IllinoisConfig | None = None) -> tuple[float, float]:
    """(alpha, beta) from the average and maximum observed queueing delay.

    alpha plateaus at alpha_max below d1 and follows the hyperbolic fit
    k1/(k2 + d) pinned to alpha(d1)=alpha_max, alpha(d_m)=alpha_min.
    beta ramps linearly from beta_min at d2 to beta_max at d3.
    """
    cfg = cfg or IllinoisConfig()
    if d_m <= 0:
        return cfg.alpha_max, cfg.beta_min
    d1 = cfg.d1_frac * d_m
    d2 = cfg.d2_frac * d_m
    d3 = cfg.d3_frac * d_m
    if d_a <= d1:
        alpha = cfg.alpha_max
    else:
        k1 = ((d_m - d1) * cfg.alpha_min * cfg.alpha_max
              / (cfg.alpha_max - cfg.alpha_min))
        k2 = k1 / cfg.alpha_max - d1
        alpha = k1 / (k2 + min(d_a, d_m))
    if d_a <= d2:
        beta = cfg.beta_min
    elif d_a >= d3:
        beta = cfg.beta_max
    else:
        beta = (cfg.beta_min
                + (cfg.beta_max - cfg.beta_min) * (d_a - d2) / (d3 - d2))
    return alpha, beta


class Illinois:
    """AIMD with delay-adaptive alpha/beta."""

    needs_cross_layer = False

    def __init__(self, cfg: IllinoisConfig | None = None):
        self.cfg = cfg or IllinoisConfig()
        self.d_max = 0.0   # max observed queueing delay, ns

    def _queueing_delay(self, flow) -> float:
        rtt = flow.rtt
        if not math.isfinite(rtt.rtt_min):
            return 0.0
        return max(rtt.srtt - rtt.rtt_min, 0.0)

    def on_ack(self, flow, newly_acked: int, n_acks: int, rtt_ns, now_ns) -> None:
        mss = flow.mss
        if flow.cwnd < flow.ssthresh:
            flow.cwnd += min(newly_acked, n_acks * mss)
            return
        d_a = self._queueing_delay(flow)
        if d_a > self.d_max:
            self.d_max = d_a
        alpha, _ = illinois_params(d_a, self.d_max, self.cfg)
        for _ in range(n_acks):
            flow.cwnd += alpha * mss * mss / flow.cwnd

    def on_dup_ack_loss(self, flow, now_ns) -> None:
        d_a = self._queueing_delay(flow)
        _, beta = illinois_params(d_a, self.d_max, self.cfg)
        flow.cwnd = max((1.0 - beta) * flow.cwnd, 2 * flow.mss)
        flow.ssthresh = flow.cwnd

    def on_rto(self, flow, now_ns) -> None:
        flow.ssthresh = max(min(flow.cwnd, flow.bytes_in_flight()) / 2.0,
                            2 * flow.mss)
        flow.cwnd = flow.mss


@dataclass
class XtcpConfig:
    lam: float = 0.85              # scaling factor below the SINR/RTT gates
    epsilon_ns: int = 10 * MS      # congestion threshold on the RTT sample
    sinr_gate_db: float = 0.0
    datarate_window_ns: int = 100 * MS
    header_bytes: int = 60         # TCP(32, incl. timestamps)+IP(20)+PDCP(3)+RLC(3)+MAC(2)

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lambda must be in (0, 1]")
        if self.epsilon_ns <= 0:
            raise ValueError("epsilon must be positive")


def xtcp_cwnd(datarate_bps: float, rtt_sample_ns: float, rtt_min_ns: float,
              sinr_db: float, cfg: XtcpConfig, mss: int = MSS) -> float:
    """One cross-layer window update: cwnd bytes from the estimated BDP."""
    bdp = datarate_bps * rtt_min_ns / (8.0 * SECOND)
    if sinr_db >= cfg.sinr_gate_db and rtt_sample_ns <= rtt_min_ns + cfg.epsilon_ns:
        cwnd = bdp
    else:
        cwnd = cfg.lam * bdp
    return max(cwnd, float(mss))


class CrossLayer:
    """Per-ACK window pinning to the cross-layer BDP estimate."""

    needs_cross_layer = True

    def __init__(self, cfg: XtcpConfig | None = None):
        self.cfg = cfg or XtcpConfig()

    def on_ack(self, flow, newly_acked: int, n_acks: int, rtt_ns, now_ns,
               datarate_bps: float = 0.0, sinr_db: float = 0.0) -> None:
        rtt_min = flow.rtt.rtt_min
        if not math.isfinite(rtt_min):
            return
        sample = rtt_ns if rtt_ns is not None else flow.rtt.srtt
        flow.cwnd = xtcp_cwnd(datarate_bps, sample, rtt_min, sinr_db,
                              self.cfg, flow.mss)
        flow.ssthresh = math.inf

    def on_dup_ack_loss(self, flow, now_ns) -> None:
        pass   # cwnd is recomputed from scratch at the next ACK

    def on_rto(self, flow, now_ns) -> None:
        flow.cwnd = flow.mss
        flow.ssthresh = math.inf


def make_controller(name: str):
    try:
        return {
            "newreno": NewReno,
            "bic": Bic,
            "cubic": Cubic,
            "illinois": Illinois,
            "xtcp": CrossLayer,
        }[name]()
    except KeyError:
        raise ValueError(f"unknown congestion control flavor {name!r}") from None
