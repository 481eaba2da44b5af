"""Single-run orchestration: builds the full stack from a Scenario and runs it.

One master event per subframe drives TCP polling, round-robin scheduling,
TB transmission and periodic bookkeeping (channel updates, RLC status
reports, metric samples).  Everything is keyed off the run seed, so two
runs of the same scenario produce byte-identical output.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from .app_traffic import TrafficConfig
from .cc import MSS, CrossLayer, RttEstimator, make_controller
from .channel import Channel
from .flow import TcpFlow
from .geometry import Point2D, Trajectory, generate_obstacles, Obstacle
from .metrics import (CWND, GOODPUT_WINDOW, RLC_OCCUPANCY, RTT_SAMPLE, SRTT,
                      UeMetrics)
from .phy_mac import McsTable, schedule_subframe
from .rlc import RlcAm
from .scenario import Scenario
from .sim_core import MS, SECOND, SUBFRAME_NS, Engine, RngRegistry

_MCS_TABLE = McsTable.load_default()
_ETA = MSS / (MSS + 60)


class _UeStack:
    __slots__ = ("ue_id", "flow", "rlc", "metrics", "dci_hist", "dci_sum",
                 "link", "gross_by_window", "rtt_sum", "rtt_n")

    def __init__(self, ue_id, flow, rlc, metrics):
        self.ue_id = ue_id
        self.flow = flow
        self.rlc = rlc
        self.metrics = metrics
        self.dci_hist = []          # (t, tb_bytes); evicted as a sliding window
        self.dci_sum = 0
        self.link = None
        self.gross_by_window = {}
        self.rtt_sum = 0.0
        self.rtt_n = 0


@dataclass
class UeResult:
    ue_id: int
    cc: str
    mean_rtt_s: float
    mean_goodput_bps: float
    mean_occupancy_bytes: float
    goodput_windows_bps: list[float]
    gross_phy_by_window: dict[int, int]
    retransmissions: int
    rto_count: int
    delivered_app_bytes: int
    rlc_dropped_bytes: int = 0
    rlc_discarded_bytes: int = 0


@dataclass
class RunResult:
    scenario_name: str
    seed: int
    duration_ns: int
    ues: list[UeResult]
    samples: list[tuple[int, int, str, float]] = field(default_factory=list)
    conservation_ok: bool = True

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_ns", "ue_id", "kind", "value"])
            for row in self.samples:
                w.writerow([row[0], row[1], row[2], repr(row[3])])

    def summary_rows(self):
        for u in self.ues:
            yield (self.scenario_name, self.seed, u.ue_id, u.cc,
                   u.mean_rtt_s, u.mean_goodput_bps, u.mean_occupancy_bytes,
                   u.retransmissions, u.rto_count)


def build_obstacles(scn: Scenario, rngs: RngRegistry) -> list[Obstacle]:
    geo = scn.geometry
    if geo.obstacles is not None:
        return [Obstacle(*o) for o in geo.obstacles]
    gen = geo.generator
    if gen is None:
        return []
    w, h = geo.area
    region = gen.region or (0.08 * w, 0.12 * h, 0.92 * w, 0.88 * h)
    return generate_obstacles(rngs.stream("obstacles"), region, gen.count,
                              gen.size_range,
                              keep_clear=[Point2D(*geo.enb)])


def run_scenario(scn: Scenario, check_conservation: bool = False,
                 collect_samples: bool = True) -> RunResult:
    engine = Engine()
    rngs = RngRegistry(scn.seed)
    obstacles = build_obstacles(scn, rngs)
    channel = Channel(scn.channel, Point2D(*scn.geometry.enb), obstacles,
                      rngs.stream("shadowing"))
    tb_rng = rngs.stream("tb_error")
    table = _MCS_TABLE
    duration = scn.duration_ns
    mcfg = scn.metrics
    warmup = int(mcfg.warmup_s * SECOND)
    window_ns = int(mcfg.goodput_window_ms * MS)
    sample_period = int(mcfg.sample_period_ms * MS)
    xcfg = scn.tcp.xtcp_config()
    dr_window = xcfg.datarate_window_ns

    outages_by_ue: dict[int, list[tuple[int, int]]] = {}
    for ue_id, start_s, dur_s in scn.forced_outages:
        outages_by_ue.setdefault(ue_id, []).append(
            (int(start_s * SECOND), int(dur_s * SECOND)))

    stacks: list[_UeStack] = []
    for i, ue in enumerate(scn.ues):
        traj = Trajectory(Point2D(*ue.start), ue.heading, ue.speed)
        channel.add_ue(i, traj, outages_by_ue.get(i))
        rlc = RlcAm(scn.rlc)
        metrics = UeMetrics(i, warmup, window_ns)
        traffic = TrafficConfig(rate_cap_bps=scn.rate_cap_bps)
        controller = (CrossLayer(xcfg) if ue.cc == "xtcp"
                      else make_controller(ue.cc))
        rtt = RttEstimator(rto_min_ns=int(scn.tcp.rto_min_ms * MS),
                           rto_max_ns=int(scn.tcp.rto_max_s * SECOND),
                           rto=scn.tcp.initial_rto_s * SECOND)
        flow = TcpFlow(i, controller, rlc, engine, traffic, rtt,
                       initial_cwnd_segments=scn.tcp.initial_cwnd_segments,
                       on_goodput=metrics.on_goodput)
        st = _UeStack(i, flow, rlc, metrics)

        def make_rtt_hook(st=st):
            def hook(t, sample, n):
                if t >= warmup:
                    st.rtt_sum += sample * n
                    st.rtt_n += n
            return hook
        flow.on_rtt = make_rtt_hook()

        if isinstance(controller, CrossLayer):
            def make_datarate(st=st):
                def datarate(now):
                    hist = st.dci_hist
                    lo = now - dr_window
                    while hist and hist[0][0] <= lo:
                        st.dci_sum -= hist.pop(0)[1]
                    return st.dci_sum * 8.0 * _ETA * SECOND / dr_window
                return datarate
            flow.get_datarate = make_datarate()
            flow.get_sinr = (lambda st=st: st.link.sinr_db)
        stacks.append(st)

    all_ues = [st.ue_id for st in stacks]
    link_states = {}
    for st in stacks:
        st.link = channel.state(st.ue_id)
        link_states[st.ue_id] = st.link

    samples: list[tuple[int, int, str, float]] = []
    status_period = scn.rlc.status_period_ns
    update_period = scn.channel.update_period_ns
    next_channel = update_period
    next_status = status_period
    next_sample = sample_period
    conservation_ok = True

    def build_allocation():
        """(stack, tb_bytes, gross, bler) per granted UE; valid until the
        next channel update since the grant depends only on link states."""
        out = []
        for dci in schedule_subframe(table, 0, all_ues, link_states):
            st = stacks[dci.ue_id]
            out.append((st, dci.tb_bytes,
                        table.tb_gross(dci.mcs, dci.n_symbols),
                        table.bler(st.link.sinr_db, dci.mcs)))
        return out

    # Round robin over every attached UE: a UE with an empty queue still
    # receives its grant (padding), so the DCI stream reflects the fair
    # link share rather than the sender's current backlog.
    allocation = build_allocation()
    uniform = tb_rng.uniform
    # The MAC grants one TB per subframe; the protocol stack is stepped once
    # per channel-update period (an integral number of subframes), which is
    # far below the smallest end-to-end timescale (the 22 ms wired RTT).
    step = update_period
    tbs_per_step = step // SUBFRAME_NS

    now = 0
    while now <= duration:
        engine.now = now
        if now >= next_channel:
            for st in stacks:
                st.link = channel.update(st.ue_id, now)
                link_states[st.ue_id] = st.link
                # bound the DCI history for non-consumers too
                hist = st.dci_hist
                lo = now - dr_window
                while hist and hist[0][0] <= lo:
                    st.dci_sum -= hist.pop(0)[1]
            allocation = build_allocation()
            next_channel = now + update_period

        for st in stacks:
            st.flow.poll(now)

        w = now // window_ns
        n_tbs = min(tbs_per_step, (duration - now) // SUBFRAME_NS + 1)
        for st, tb_bytes, gross, bler in allocation:
            st.dci_hist.append((now, tb_bytes * n_tbs))
            st.dci_sum += tb_bytes * n_tbs
            rlc = st.rlc
            if rlc.occupancy > 0 or rlc.retx_q:
                if bler <= 0.0:
                    # error-free: one merged fill is byte-equivalent to n
                    # individual transport blocks and needs no loss draws
                    groups = rlc.fill_tb(tb_bytes * n_tbs)
                    if groups:
                        rlc.on_tb_result(groups, True)
                else:
                    # one loss draw per transport block; runs of successes
                    # merge into a single fill, failures stay TB-sized
                    i = 0
                    while i < n_tbs:
                        j = i
                        while j < n_tbs and uniform() >= bler:
                            j += 1
                        if j > i:
                            groups = rlc.fill_tb(tb_bytes * (j - i))
                            if groups:
                                rlc.on_tb_result(groups, True)
                        if j < n_tbs:
                            groups = rlc.fill_tb(tb_bytes)
                            if groups:
                                rlc.on_tb_result(groups, False)
                            j += 1
                        i = j
            gbw = st.gross_by_window
            gbw[w] = gbw.get(w, 0) + gross * n_tbs

        if now >= next_status:
            for st in stacks:
                st.rlc.on_status_report()
            next_status = now + status_period

        if now >= warmup:
            for st in stacks:
                m = st.metrics
                m.occupancy_integral += st.rlc.occupancy * step
                m.occupancy_time += step

        if collect_samples and now >= next_sample:
            for st in stacks:
                f = st.flow
                samples.append((now, st.ue_id, CWND, f.cwnd))
                samples.append((now, st.ue_id, SRTT, f.rtt.srtt))
                samples.append((now, st.ue_id, RTT_SAMPLE, f.last_rtt_sample))
                samples.append((now, st.ue_id, RLC_OCCUPANCY,
                                float(st.rlc.occupancy)))
            next_sample = now + sample_period

        if check_conservation:
            for st in stacks:
                if not st.rlc.conservation_holds():
                    conservation_ok = False
        now += step

    ues = []
    for st in stacks:
        m = st.metrics
        n_windows = duration // window_ns
        windows = [m.deliveries_by_window.get(w, 0) * 8.0 * SECOND / window_ns
                   for w in range(n_windows)]
        mean_rtt = (st.rtt_sum / st.rtt_n / SECOND) if st.rtt_n else math.nan
        ues.append(UeResult(
            ue_id=st.ue_id, cc=scn.ues[st.ue_id].cc,
            mean_rtt_s=mean_rtt,
            mean_goodput_bps=m.mean_goodput_bps(duration),
            mean_occupancy_bytes=m.mean_occupancy_bytes(),
            goodput_windows_bps=windows,
            gross_phy_by_window=st.gross_by_window,
            retransmissions=st.flow.retransmissions,
            rto_count=st.flow.rto_count,
            delivered_app_bytes=st.flow.rcv_nxt,
            rlc_dropped_bytes=st.rlc.dropped_bytes,
            rlc_discarded_bytes=st.rlc.discarded_bytes))
        if collect_samples:
            for w, rate in enumerate(windows):
                samples.append(((w + 1) * window_ns, st.ue_id,
                                GOODPUT_WINDOW, rate))

    samples.sort(key=lambda r: (r[0], r[1], r[2]))
    return RunResult(scn.name, scn.seed, duration, ues, samples,
                     conservation_ok)
