"""Deployment-area geometry: rectangular obstacles, straight UE paths, LOS test."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sim_core import RngStream


class GeometryError(Exception):
    pass


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned rectangle, min corner strictly below max corner."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise GeometryError(f"degenerate obstacle {self}")

    def overlaps(self, other: "Obstacle") -> bool:
        return not (
            self.x1 <= other.x0
            or other.x1 <= self.x0
            or self.y1 <= other.y0
            or other.y1 <= self.y0
        )

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class Trajectory:
    """Straight-line motion: position(t) = start + heading * speed * (t - t0)."""

    start: Point2D
    heading: tuple[float, float]   # unit vector
    speed: float                   # m/s, > 0
    start_time: int = 0            # ns

    def __post_init__(self):
        hx, hy = self.heading
        norm = math.hypot(hx, hy)
        if abs(norm - 1.0) > 1e-9:
            raise GeometryError(f"heading {self.heading} is not a unit vector")
        if self.speed <= 0:
            raise GeometryError("speed must be positive")

    def position_at(self, t: int) -> Point2D:
        if t < self.start_time:
            raise GeometryError(f"t={t} ns precedes trajectory start {self.start_time} ns")
        dist = self.speed * (t - self.start_time) * 1e-9
        return Point2D(self.start.x + self.heading[0] * dist,
                       self.start.y + self.heading[1] * dist)


def segment_intersects_box(ax: float, ay: float, bx: float, by: float,
                           box: Obstacle) -> bool:
    """Slab test: does the open segment a-b hit the rectangle?"""
    dx = bx - ax
    dy = by - ay
    tmin = 0.0
    tmax = 1.0
    for d, a, lo, hi in ((dx, ax, box.x0, box.x1), (dy, ay, box.y0, box.y1)):
        if d == 0.0:
            if a < lo or a > hi:
                return False
        else:
            inv = 1.0 / d
            t1 = (lo - a) * inv
            t2 = (hi - a) * inv
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            if tmin > tmax:
                return False
    return True


def is_los(ue: Point2D, enb: Point2D, obstacles: list[Obstacle]) -> bool:
    """True iff no obstacle blocks the segment between UE and eNB."""
    if ue == enb:
        raise GeometryError("UE and eNB positions coincide")
    ax, ay, bx, by = ue.x, ue.y, enb.x, enb.y
    for box in obstacles:
        if segment_intersects_box(ax, ay, bx, by, box):
            return False
    return True


def generate_obstacles(rng: RngStream, region: tuple[float, float, float, float],
                       count: int, size_range: tuple[float, float],
                       keep_clear: list[Point2D] | None = None,
                       max_rejects: int = 10_000) -> list[Obstacle]:
    """Place `count` pairwise non-overlapping rectangles inside `region`.

    Rejection sampling; deterministic in the stream.  Points in `keep_clear`
    (e.g. the eNB) are never covered by an obstacle.
    """
    if count < 0:
        raise GeometryError("count must be >= 0")
    rx0, ry0, rx1, ry1 = region
    lo, hi = size_range
    obstacles: list[Obstacle] = []
    for _ in range(count):
        for attempt in range(max_rejects + 1):
            if attempt == max_rejects:
                raise GeometryError(
                    f"obstacle placement failed after {max_rejects} rejections; "
                    "region too dense"
                )
            w = lo + (hi - lo) * rng.uniform()
            h = lo + (hi - lo) * rng.uniform()
            if rx1 - rx0 < w or ry1 - ry0 < h:
                continue
            x = rx0 + (rx1 - rx0 - w) * rng.uniform()
            y = ry0 + (ry1 - ry0 - h) * rng.uniform()
            cand = Obstacle(x, y, x + w, y + h)
            if keep_clear and any(cand.contains(p.x, p.y) for p in keep_clear):
                continue
            if any(cand.overlaps(o) for o in obstacles):
                continue
            obstacles.append(cand)
            break
    return obstacles
