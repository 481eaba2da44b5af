"""Radio link abstraction: log-distance pathloss, Gauss-Markov shadowing, SINR.

The link quality is a close-in free-space reference model with separate
pathloss exponents for LOS and NLOS, which preserves the LOS/NLOS rate
contrast without a full statistical channel.  Shadowing follows a
first-order autoregressive process so the channel keeps short-term
coherence between updates.  Single cell: interference is zero and SINR
degenerates to SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geometry import Point2D, Trajectory, Obstacle, is_los
from .sim_core import MS, RngStream

THERMAL_NOISE_DBM_HZ = -174.0
OUTAGE_SINR_DB = -30.0      # below every MCS threshold: no allocation succeeds


class LinkCondition(Enum):
    LOS = "LOS"
    NLOS = "NLOS"
    OUTAGE = "OUTAGE"


@dataclass(frozen=True)
class LinkState:
    condition: LinkCondition
    sinr_db: float
    pathloss_db: float


@dataclass
class ChannelConfig:
    tx_power_dbm: float = 30.0
    carrier_ghz: float = 28.0
    bandwidth_hz: float = 1e9
    noise_figure_db: float = 5.0
    n_los: float = 2.0
    n_nlos: float = 3.0
    sigma_los_db: float = 4.0
    sigma_nlos_db: float = 7.8
    shadowing_corr_time_ns: int = 100 * MS
    update_period_ns: int = 1 * MS
    # blockage geometry is re-evaluated at this coarser cadence; UEs move a
    # few centimetres between checks, far below obstacle dimensions
    los_check_period_ns: int = 10 * MS

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")
        if self.update_period_ns <= 0:
            raise ValueError("update period must be positive")

    @property
    def noise_power_dbm(self) -> float:
        return (THERMAL_NOISE_DBM_HZ
                + 10.0 * math.log10(self.bandwidth_hz)
                + self.noise_figure_db)


def pathloss_db(cfg: ChannelConfig, d_m: float, condition: LinkCondition) -> float:
    """Close-in reference pathloss; distance clamped below 1 m."""
    d = max(d_m, 1.0)
    n = cfg.n_los if condition is LinkCondition.LOS else cfg.n_nlos
    return 32.4 + 20.0 * math.log10(cfg.carrier_ghz) + 10.0 * n * math.log10(d)


@dataclass
class _UeLink:
    trajectory: Trajectory
    shadow_db: float = 0.0
    state: LinkState = field(default=None)  # type: ignore[assignment]
    geo_los: bool = True
    next_los_check: int = 0


class Channel:
    """Per-run link tracker for all UEs.

    `update(ue_id, t)` advances shadowing one step and refreshes the cached
    LinkState; `state(ue_id)` returns the latest one.  Forced outage windows
    override geometry.
    """

    def __init__(self, cfg: ChannelConfig, enb: Point2D,
                 obstacles: list[Obstacle], rng: RngStream):
        self.cfg = cfg
        self.enb = enb
        self.obstacles = obstacles
        self._rng = rng
        self._links: dict[int, _UeLink] = {}
        self._outages: dict[int, list[tuple[int, int]]] = {}
        rho = math.exp(-cfg.update_period_ns / cfg.shadowing_corr_time_ns)
        self._rho = rho
        self._innov = math.sqrt(1.0 - rho * rho)

    def add_ue(self, ue_id: int, trajectory: Trajectory,
               forced_outages: list[tuple[int, int]] | None = None) -> None:
        self._links[ue_id] = _UeLink(trajectory)
        self._outages[ue_id] = forced_outages or []
        self.update(ue_id, trajectory.start_time)

    def _condition_at(self, ue_id: int, pos: Point2D, t: int) -> LinkCondition:
        for start, duration in self._outages[ue_id]:
            if start <= t < start + duration:
                return LinkCondition.OUTAGE
        link = self._links[ue_id]
        if t >= link.next_los_check:
            link.geo_los = is_los(pos, self.enb, self.obstacles)
            link.next_los_check = t + self.cfg.los_check_period_ns
        return LinkCondition.LOS if link.geo_los else LinkCondition.NLOS

    def update(self, ue_id: int, t: int) -> LinkState:
        link = self._links.get(ue_id)
        if link is None:
            raise KeyError(f"unknown ue_id {ue_id}")
        pos = link.trajectory.position_at(t)
        cond = self._condition_at(ue_id, pos, t)
        d = math.hypot(pos.x - self.enb.x, pos.y - self.enb.y)
        pl = pathloss_db(self.cfg, d, cond)
        sigma = (self.cfg.sigma_los_db if cond is LinkCondition.LOS
                 else self.cfg.sigma_nlos_db)
        link.shadow_db = (self._rho * link.shadow_db
                          + self._innov * self._rng.normal())
        if cond is LinkCondition.OUTAGE:
            sinr = OUTAGE_SINR_DB
        else:
            sinr = (self.cfg.tx_power_dbm - pl - sigma * link.shadow_db
                    - self.cfg.noise_power_dbm)
        link.state = LinkState(cond, sinr, pl)
        return link.state

    def state(self, ue_id: int) -> LinkState:
        link = self._links.get(ue_id)
        if link is None:
            raise KeyError(f"unknown ue_id {ue_id}")
        return link.state
