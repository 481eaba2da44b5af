"""Scenario documents: validation, defaults, JSON round-trip.

A scenario is a plain JSON object; every physical-layer and protocol
parameter has a named default so a minimal file only states what differs.
Unknown keys are rejected with a diagnostic naming the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .channel import ChannelConfig
from .cc import XtcpConfig
from .rlc import RlcConfig
from .sim_core import MS, SECOND

CC_FLAVORS = ("xtcp", "cubic", "bic", "illinois", "newreno")


class ConfigError(Exception):
    pass


def _take(d: dict, ctx: str, known: dict[str, Any]) -> dict:
    """Pop known keys (with defaults); reject anything left over."""
    out = {}
    for key, default in known.items():
        out[key] = d.pop(key, default)
    if d:
        bad = ", ".join(sorted(d))
        raise ConfigError(f"unknown key(s) in {ctx}: {bad}")
    return out


@dataclass
class ObstacleGenerator:
    count: int = 12
    size_range: tuple[float, float] = (4.0, 12.0)
    region: tuple[float, float, float, float] | None = None


@dataclass
class GeometryConfig:
    area: tuple[float, float] = (120.0, 60.0)
    enb: tuple[float, float] = (60.0, 30.0)
    obstacles: list[tuple[float, float, float, float]] | None = None
    generator: ObstacleGenerator | None = None


@dataclass
class UeConfig:
    start: tuple[float, float]
    heading: tuple[float, float]
    speed: float = 1.75
    cc: str = "xtcp"

    def __post_init__(self):
        if self.cc not in CC_FLAVORS:
            raise ConfigError(
                f"unknown cc flavor {self.cc!r}; valid: {', '.join(CC_FLAVORS)}")
        if self.speed <= 0:
            raise ConfigError("ue speed must be positive")


@dataclass
class TcpConfig:
    lam: float = 0.85
    epsilon_ms: float = 10.0
    initial_cwnd_segments: int = 10
    rto_min_ms: float = 200.0
    rto_max_s: float = 60.0
    initial_rto_s: float = 1.0

    def xtcp_config(self) -> XtcpConfig:
        return XtcpConfig(lam=self.lam, epsilon_ns=int(self.epsilon_ms * MS))


@dataclass
class MetricsConfig:
    warmup_s: float = 2.0
    sample_period_ms: float = 10.0
    goodput_window_ms: float = 100.0


@dataclass
class Scenario:
    name: str = "scenario"
    duration_s: float = 10.0
    seed: int = 1
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    ues: list[UeConfig] = field(default_factory=list)
    forced_outages: list[tuple[int, float, float]] = field(default_factory=list)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    rlc: RlcConfig = field(default_factory=RlcConfig)
    tcp: TcpConfig = field(default_factory=TcpConfig)
    rate_cap_bps: int = 1_000_000_000
    metrics: MetricsConfig = field(default_factory=MetricsConfig)

    def __post_init__(self):
        if not self.ues:
            raise ConfigError("scenario needs at least one UE")
        if self.duration_s <= 0:
            raise ConfigError("duration must be positive")
        for ue_id, start, dur in self.forced_outages:
            if not 0 <= ue_id < len(self.ues):
                raise ConfigError(f"forced outage references unknown UE {ue_id}")
            if dur <= 0:
                raise ConfigError("forced outage duration must be positive")

    @property
    def duration_ns(self) -> int:
        return int(self.duration_s * SECOND)

    # ------------------------------------------------------------- json i/o

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        doc = dict(doc)
        top = _take(doc, "scenario", {
            "name": "scenario", "duration_s": 10.0, "seed": 1,
            "geometry": {}, "ues": None, "forced_outages": [],
            "channel": {}, "rlc": {}, "tcp": {},
            "rate_cap_bps": 1_000_000_000, "metrics": {},
        })
        if not top["ues"]:
            raise ConfigError("scenario must define 'ues'")

        g = _take(dict(top["geometry"]), "geometry", {
            "area": (120.0, 60.0), "enb": (60.0, 30.0),
            "obstacles": None, "generator": None,
        })
        gen = None
        if g["generator"] is not None:
            gd = _take(dict(g["generator"]), "geometry.generator", {
                "count": 12, "size_range": (4.0, 12.0), "region": None})
            gen = ObstacleGenerator(int(gd["count"]),
                                    tuple(gd["size_range"]),
                                    tuple(gd["region"]) if gd["region"] else None)
        obstacles = ([tuple(o) for o in g["obstacles"]]
                     if g["obstacles"] is not None else None)
        geometry = GeometryConfig(tuple(g["area"]), tuple(g["enb"]),
                                  obstacles, gen)

        ues = []
        for i, u in enumerate(top["ues"]):
            ud = _take(dict(u), f"ues[{i}]", {
                "start": None, "heading": (1.0, 0.0),
                "speed": 1.75, "cc": "xtcp"})
            if ud["start"] is None:
                raise ConfigError(f"ues[{i}] missing 'start'")
            hx, hy = ud["heading"]
            norm = math.hypot(hx, hy)
            if norm == 0:
                raise ConfigError(f"ues[{i}] heading must be nonzero")
            ues.append(UeConfig(tuple(ud["start"]), (hx / norm, hy / norm),
                                float(ud["speed"]), ud["cc"]))

        ch = _take(dict(top["channel"]), "channel", {
            "tx_power_dbm": 30.0, "carrier_ghz": 28.0, "bandwidth_hz": 1e9,
            "noise_figure_db": 5.0, "n_los": 2.0, "n_nlos": 3.0,
            "sigma_los_db": 4.0, "sigma_nlos_db": 7.8,
            "shadowing_corr_time_ms": 100.0, "update_period_ms": 1.0,
            "los_check_period_ms": 10.0})
        channel = ChannelConfig(
            tx_power_dbm=float(ch["tx_power_dbm"]),
            carrier_ghz=float(ch["carrier_ghz"]),
            bandwidth_hz=float(ch["bandwidth_hz"]),
            noise_figure_db=float(ch["noise_figure_db"]),
            n_los=float(ch["n_los"]), n_nlos=float(ch["n_nlos"]),
            sigma_los_db=float(ch["sigma_los_db"]),
            sigma_nlos_db=float(ch["sigma_nlos_db"]),
            shadowing_corr_time_ns=int(float(ch["shadowing_corr_time_ms"]) * MS),
            update_period_ns=int(float(ch["update_period_ms"]) * MS),
            los_check_period_ns=int(float(ch["los_check_period_ms"]) * MS))

        rl = _take(dict(top["rlc"]), "rlc", {
            "capacity_bytes": 10_000_000, "status_period_ms": 5.0,
            "max_retx": 16})
        rlc = RlcConfig(int(rl["capacity_bytes"]),
                        int(float(rl["status_period_ms"]) * MS),
                        int(rl["max_retx"]))

        tc = _take(dict(top["tcp"]), "tcp", {
            "lambda": 0.85, "epsilon_ms": 10.0, "initial_cwnd_segments": 10,
            "rto_min_ms": 200.0, "rto_max_s": 60.0, "initial_rto_s": 1.0})
        tcp = TcpConfig(float(tc["lambda"]), float(tc["epsilon_ms"]),
                        int(tc["initial_cwnd_segments"]), float(tc["rto_min_ms"]),
                        float(tc["rto_max_s"]), float(tc["initial_rto_s"]))

        mt = _take(dict(top["metrics"]), "metrics", {
            "warmup_s": 2.0, "sample_period_ms": 10.0,
            "goodput_window_ms": 100.0})
        metrics = MetricsConfig(float(mt["warmup_s"]),
                                float(mt["sample_period_ms"]),
                                float(mt["goodput_window_ms"]))

        return cls(name=top["name"], duration_s=float(top["duration_s"]),
                   seed=int(top["seed"]), geometry=geometry, ues=ues,
                   forced_outages=[(int(a), float(b), float(c))
                                   for a, b, c in top["forced_outages"]],
                   channel=channel, rlc=rlc, tcp=tcp,
                   rate_cap_bps=int(top["rate_cap_bps"]), metrics=metrics)

    def to_dict(self) -> dict:
        g: dict[str, Any] = {"area": list(self.geometry.area),
                             "enb": list(self.geometry.enb)}
        if self.geometry.obstacles is not None:
            g["obstacles"] = [list(o) for o in self.geometry.obstacles]
        if self.geometry.generator is not None:
            gen = self.geometry.generator
            g["generator"] = {"count": gen.count,
                              "size_range": list(gen.size_range),
                              "region": list(gen.region) if gen.region else None}
        ch = self.channel
        return {
            "name": self.name,
            "duration_s": self.duration_s,
            "seed": self.seed,
            "geometry": g,
            "ues": [{"start": list(u.start), "heading": list(u.heading),
                     "speed": u.speed, "cc": u.cc} for u in self.ues],
            "forced_outages": [list(o) for o in self.forced_outages],
            "channel": {
                "tx_power_dbm": ch.tx_power_dbm, "carrier_ghz": ch.carrier_ghz,
                "bandwidth_hz": ch.bandwidth_hz,
                "noise_figure_db": ch.noise_figure_db,
                "n_los": ch.n_los, "n_nlos": ch.n_nlos,
                "sigma_los_db": ch.sigma_los_db,
                "sigma_nlos_db": ch.sigma_nlos_db,
                "shadowing_corr_time_ms": ch.shadowing_corr_time_ns / MS,
                "update_period_ms": ch.update_period_ns / MS,
                "los_check_period_ms": ch.los_check_period_ns / MS,
            },
            "rlc": {"capacity_bytes": self.rlc.capacity_bytes,
                    "status_period_ms": self.rlc.status_period_ns / MS,
                    "max_retx": self.rlc.max_retx},
            "tcp": {"lambda": self.tcp.lam, "epsilon_ms": self.tcp.epsilon_ms,
                    "initial_cwnd_segments": self.tcp.initial_cwnd_segments,
                    "rto_min_ms": self.tcp.rto_min_ms,
                    "rto_max_s": self.tcp.rto_max_s,
                    "initial_rto_s": self.tcp.initial_rto_s},
            "rate_cap_bps": self.rate_cap_bps,
            "metrics": {"warmup_s": self.metrics.warmup_s,
                        "sample_period_ms": self.metrics.sample_period_ms,
                        "goodput_window_ms": self.metrics.goodput_window_ms},
        }

    @classmethod
    def from_json(cls, path) -> "Scenario":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
