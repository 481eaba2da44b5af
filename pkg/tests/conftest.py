"""Shared test helpers."""

import math

from xtcpsim import MSS, RttEstimator


def clip_chord(a, b, o):
    """Independent Liang-Barsky clip: the parameter span of segment a-b
    inside rectangle o, or None when they do not intersect."""
    t0, t1 = 0.0, 1.0
    for p, q0, q1 in ((b[0] - a[0], o.x0 - a[0], o.x1 - a[0]),
                      (b[1] - a[1], o.y0 - a[1], o.y1 - a[1])):
        if p == 0.0:
            if q0 > 0.0 or q1 < 0.0:
                return None
            continue
        lo, hi = q0 / p, q1 / p
        if lo > hi:
            lo, hi = hi, lo
        t0, t1 = max(t0, lo), min(t1, hi)
        if t0 > t1:
            return None
    return t1 - t0


class FakeFlow:
    """Minimal stand-in exposing the surface the controllers mutate."""

    def __init__(self, cwnd_segments=10.0, ssthresh=math.inf,
                 flight_segments=None, mss=MSS):
        self.mss = mss
        self.cwnd = cwnd_segments * mss
        self.ssthresh = ssthresh
        self._flight = (flight_segments if flight_segments is not None
                        else cwnd_segments) * mss
        self.rtt = RttEstimator()

    def bytes_in_flight(self):
        return self._flight
