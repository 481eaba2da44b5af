"""Application source cap and the wired segment beyond the eNB.

The traffic model is full buffer: the source always has data for TCP, but
cumulative offered bytes are capped at the configured application rate by a
token bucket.  The wired path (eNB - core - remote host) is lossless,
infinite-capacity and fixed-delay: 1 ms core plus 10 ms remote one-way.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sim_core import MS

CORE_LATENCY_NS = 1 * MS
REMOTE_LATENCY_NS = 10 * MS
WIRED_ONE_WAY_NS = CORE_LATENCY_NS + REMOTE_LATENCY_NS     # 11 ms


@dataclass
class TrafficConfig:
    rate_cap_bps: int = 1_000_000_000
    mss: int = 1400
    core_latency_ns: int = CORE_LATENCY_NS
    remote_latency_ns: int = REMOTE_LATENCY_NS

    def __post_init__(self):
        if self.rate_cap_bps <= 0:
            raise ValueError("rate cap must be positive")

    @property
    def wired_one_way_ns(self) -> int:
        return self.core_latency_ns + self.remote_latency_ns


class TokenBucket:
    """Integer-exact token bucket: tokens accrue in bit-nanoseconds.

    One byte costs 8e9 bit-ns, so any (rate, dt) pair stays exact.  Bucket
    depth is one round-trip of data so unsent allowance is not banked
    indefinitely.
    """

    _BITNS_PER_BYTE = 8 * 1_000_000_000

    def __init__(self, rate_bps: int, depth_rtt_ns: int = 25 * MS):
        self.rate_bps = int(rate_bps)
        self.depth_bitns = self.rate_bps * depth_rtt_ns
        self._tokens_bitns = 0
        self._last_refill_ns = 0
        self.offered_bytes = 0

    def refill(self, now_ns: int) -> None:
        dt = now_ns - self._last_refill_ns
        if dt <= 0:
            return
        self._last_refill_ns = now_ns
        self._tokens_bitns = min(self._tokens_bitns + self.rate_bps * dt,
                                 self.depth_bitns)

    def take_segments(self, want: int, mss: int) -> int:
        """Consume up to `want` MSS-sized segments worth of tokens."""
        cost = mss * self._BITNS_PER_BYTE
        n = min(want, self._tokens_bitns // cost)
        if n > 0:
            self._tokens_bitns -= n * cost
            self.offered_bytes += n * mss
        return int(n)
