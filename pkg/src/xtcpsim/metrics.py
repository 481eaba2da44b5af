"""Time-series collection, windowed throughput, Jain fairness, run summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .sim_core import MS, SECOND

CWND = "CWND"
SRTT = "SRTT"
RTT_SAMPLE = "RTT_SAMPLE"
GOODPUT_WINDOW = "GOODPUT_WINDOW"
RLC_OCCUPANCY = "RLC_OCCUPANCY"


def windowed_goodput(deliveries, duration_ns: int,
                     window_ns: int = 100 * MS) -> list[float]:
    """Per-window delivered rate in bit/s from (t_ns, bytes) events."""
    n_windows = (duration_ns + window_ns - 1) // window_ns
    acc = [0] * n_windows
    for t, nbytes in deliveries:
        idx = min(t // window_ns, n_windows - 1)
        acc[idx] += nbytes
    return [b * 8.0 * SECOND / window_ns for b in acc]


def jain_index(rates) -> float | None:
    """(sum x)^2 / (n sum x^2); None when all rates are zero."""
    rates = list(rates)
    if not rates:
        raise ValueError("need at least one rate")
    if any(r < 0 for r in rates):
        raise ValueError("rates must be non-negative")
    sq = sum(r * r for r in rates)
    if sq == 0:
        return None
    s = sum(rates)
    return s * s / (len(rates) * sq)


def mean_ci95(values) -> tuple[float, float | None]:
    """Sample mean and 95% CI half-width (t distribution); CI None for n < 2."""
    arr = np.asarray(list(values), dtype=float)
    n = arr.size
    if n == 0:
        raise ValueError("no values")
    mean = float(arr.mean())
    if n < 2:
        return mean, None
    sem = float(arr.std(ddof=1)) / math.sqrt(n)
    half = float(stats.t.ppf(0.975, n - 1)) * sem
    return mean, half


def summarize(per_run_means: dict[str, list[float]]) -> dict[str, tuple[float, float | None, int]]:
    """metric -> (mean, ci95 half-width, n) across runs."""
    return {k: (*mean_ci95(v), len(v)) for k, v in per_run_means.items()}


@dataclass
class UeMetrics:
    """Per-UE accumulators for one run."""

    ue_id: int
    warmup_ns: int
    goodput_window_ns: int
    samples: list[tuple[int, str, float]] = field(default_factory=list)
    deliveries_by_window: dict[int, int] = field(default_factory=dict)
    goodput_bytes: int = 0            # after warmup
    goodput_t0: int = 0
    occupancy_integral: float = 0.0   # byte*ns after warmup
    occupancy_time: int = 0

    def on_goodput(self, t: int, nbytes: int) -> None:
        w = t // self.goodput_window_ns
        self.deliveries_by_window[w] = self.deliveries_by_window.get(w, 0) + nbytes
        if t >= self.warmup_ns:
            self.goodput_bytes += nbytes

    def on_occupancy(self, t: int, dt: int, occupancy: int) -> None:
        if t >= self.warmup_ns:
            self.occupancy_integral += occupancy * dt
            self.occupancy_time += dt

    def mean_goodput_bps(self, duration_ns: int) -> float:
        span = duration_ns - self.warmup_ns
        return self.goodput_bytes * 8.0 * SECOND / span if span > 0 else 0.0

    def mean_occupancy_bytes(self) -> float:
        if self.occupancy_time == 0:
            return 0.0
        return self.occupancy_integral / self.occupancy_time
