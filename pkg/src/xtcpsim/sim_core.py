"""Deterministic discrete-event engine with integer-nanosecond time.

All durations in this package are integer nanoseconds so that the 4.16 us
OFDM symbol and the 100 us subframe are exactly representable.  Events with
equal fire time dispatch in insertion order, which makes a run a total order
and therefore replayable bit-for-bit.
"""

from __future__ import annotations

import heapq
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Time constants (nanoseconds).
NS = 1
US = 1_000
MS = 1_000_000
SECOND = 1_000_000_000
SYMBOL_NS = 4_160          # 4.16 us OFDM symbol
SUBFRAME_NS = 100_000      # 100 us subframe


class SchedulingError(Exception):
    """Raised when an event is scheduled in the past."""


@dataclass(order=True)
class Event:
    fire_time: int
    sequence_id: int
    callback: Callable[[], None] = field(compare=False)
    cancelled: bool = field(default=False, compare=False)


class EventHandle:
    __slots__ = ("_event",)

    def __init__(self, event: Event):
        self._event = event

    def cancel(self) -> None:
        self._event.cancelled = True

    @property
    def cancelled(self) -> bool:
        return self._event.cancelled


class Engine:
    """Single-run event loop.  State is confined to one run."""

    def __init__(self) -> None:
        self.now: int = 0
        self._heap: list[Event] = []
        self._next_seq: int = 0
        self.dispatched: int = 0

    def schedule(self, fire_time: int, callback: Callable[[], None]) -> EventHandle:
        if fire_time < self.now:
            raise SchedulingError(
                f"cannot schedule at t={fire_time} ns: clock is at {self.now} ns"
            )
        ev = Event(fire_time, self._next_seq, callback)
        self._next_seq += 1
        heapq.heappush(self._heap, ev)
        return EventHandle(ev)

    def schedule_after(self, delay: int, callback: Callable[[], None]) -> EventHandle:
        return self.schedule(self.now + delay, callback)

    def run_until(self, t_end: int) -> int:
        """Dispatch every event with fire_time <= t_end; leave clock at t_end."""
        heap = self._heap
        count = 0
        while heap and heap[0].fire_time <= t_end:
            ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self.now = ev.fire_time
            ev.callback()
            count += 1
        self.now = t_end
        self.dispatched += count
        return count


class RngStream:
    """Named pseudo-random stream derived from (run seed, label).

    Streams with distinct labels are independent, so adding a new stochastic
    process does not perturb draws of the existing ones.  Scalar draws are
    served from block buffers to keep the per-draw cost low.
    """

    _BLOCK = 4096

    def __init__(self, seed: int, label: str):
        self.label = label
        ss = np.random.SeedSequence([seed, zlib.crc32(label.encode())])
        self.generator = np.random.Generator(np.random.PCG64(ss))
        self._uni: np.ndarray | None = None
        self._norm: np.ndarray | None = None
        self._uni_i = 0
        self._norm_i = 0

    def uniform(self) -> float:
        i = self._uni_i
        buf = self._uni
        if buf is None or i >= self._BLOCK:
            buf = self._uni = self.generator.random(self._BLOCK)
            i = 0
        self._uni_i = i + 1
        return buf[i]

    def normal(self) -> float:
        i = self._norm_i
        buf = self._norm
        if buf is None or i >= self._BLOCK:
            buf = self._norm = self.generator.standard_normal(self._BLOCK)
            i = 0
        self._norm_i = i + 1
        return buf[i]


class RngRegistry:
    """Per-run registry handing out one RngStream per named process."""

    def __init__(self, seed: int):
        self.seed = seed
        self._streams: dict[str, RngStream] = {}

    def stream(self, label: str) -> RngStream:
        s = self._streams.get(label)
        if s is None:
            s = self._streams[label] = RngStream(self.seed, label)
        return s
