"""TCP sender and remote-host receiver over the RLC link and the wired path.

Data and ACKs move as contiguous byte ranges rather than per-packet
objects: the receiver ACKs every segment, but segments that arrive together
in one subframe collapse into a single cumulative record carrying the ACK
count, which keeps per-ACK controller semantics while staying fast.

Loss detection is standard: three duplicate ACKs trigger fast retransmit,
ACKs carry up to three SACK blocks so the sender can repair every known
hole within a round trip, and an expired RTO retransmits snd_una, doubles
the timer and re-enters slow start.
"""

from __future__ import annotations

import math
from collections import deque

from .app_traffic import TokenBucket, TrafficConfig
from .cc import MSS, CrossLayer, RttEstimator
from .rlc import PDCP_HEADER_BYTES, RlcAm
from .sim_core import MS

TCP_IP_HEADER_BYTES = 52        # TCP incl. timestamps (32) + IP (20)

SLOW_START = "SLOW_START"
CONG_AVOID = "CONG_AVOID"
FAST_RECOVERY = "FAST_RECOVERY"


class TcpFlow:
    """One uplink flow: UE-side sender, eNB-forwarded wired path, remote sink."""

    def __init__(self, ue_id: int, controller, rlc: RlcAm, engine,
                 traffic: TrafficConfig, rtt: RttEstimator | None = None,
                 initial_cwnd_segments: int = 10, start_time_ns: int = 0,
                 on_goodput=None):
        self.ue_id = ue_id
        self.cc = controller
        self.rlc = rlc
        self.engine = engine
        self.traffic = traffic
        self.mss = traffic.mss
        self.sdu_air = traffic.mss + TCP_IP_HEADER_BYTES + PDCP_HEADER_BYTES
        self.rtt = rtt or RttEstimator()
        self.wired_delay = traffic.wired_one_way_ns
        self.bucket = TokenBucket(traffic.rate_cap_bps)
        self.on_goodput = on_goodput or (lambda t, b: None)
        rlc.on_sdu_batch = self._on_rlc_release

        # handshake modeled as one fixed wired round trip
        self.start_time = start_time_ns + 2 * self.wired_delay

        # sender state
        self.snd_una = 0
        self.snd_nxt = 0
        if isinstance(controller, CrossLayer):
            self.cwnd = float(self.mss)
        else:
            self.cwnd = float(initial_cwnd_segments * self.mss)
        self.ssthresh = math.inf
        self.phase = SLOW_START
        self.dup_acks = 0
        self.recover = 0
        self.sacked: list[list[int]] = []   # merged [s, e) ranges from SACK
        self.rtx_high = 0                   # holes repaired up to this seq
        self.rtx_nxt = 0                    # go-back-N resend pointer after RTO
        self.rtx_pending: list[tuple[int, int]] = []
        self.rto_deadline: int | None = None
        self.retransmissions = 0
        self.rto_count = 0
        self.cwnd_limited = True   # window growth gate: only grow while the
                                   # window, not the application, is the limit

        # cross-layer hooks, wired in by the runner for the X-TCP flavor
        self.get_datarate = lambda now: 0.0
        self.get_sinr = lambda: 0.0

        # remote receiver state
        self.rcv_nxt = 0
        self.ooo: list[list[int]] = []

        # pipes: (available_time, ...) in FIFO order
        self.data_pipe: deque = deque()
        self.ack_pipe: deque = deque()

        # metric accumulators
        self.rtt_sample_sum = 0.0
        self.rtt_sample_n = 0
        self.last_rtt_sample = 0.0
        self.on_rtt = lambda t, sample, n: None

    # ---------------------------------------------------------------- pipes

    def _on_rlc_release(self, seq_start: int, n_sdus: int, seq_per: int,
                        ts: int) -> None:
        t_avail = self.engine.now + self.wired_delay
        pipe = self.data_pipe
        if pipe:
            last = pipe[-1]
            # contiguous bytes arriving together: one record, oldest timestamp
            if last[0] == t_avail and last[1] + last[2] == seq_start:
                last[2] += n_sdus * seq_per
                return
        pipe.append([t_avail, seq_start, n_sdus * seq_per, ts])

    def bytes_in_flight(self) -> int:
        return self.snd_nxt - self.snd_una

    # ----------------------------------------------------------------- poll

    def poll(self, now: int) -> None:
        """Per-subframe processing: receive, ACK, timers, send."""
        pipe = self.data_pipe
        while pipe and pipe[0][0] <= now:
            _, seq_s, nbytes, ts = pipe.popleft()
            self._receiver_accept(seq_s, seq_s + nbytes, ts, now)
        acks = self.ack_pipe
        while acks and acks[0][0] <= now:
            _, ack_seq, n_acks, echo_ts, n_dup, sack = acks.popleft()
            self._sender_ack(ack_seq, n_acks, echo_ts, n_dup, sack, now)
        if (self.rto_deadline is not None and now >= self.rto_deadline
                and self.bytes_in_flight() > 0):
            self._on_rto(now)
        self._send(now)

    # ------------------------------------------------------------- receiver

    def _receiver_accept(self, seq_s: int, seq_e: int, ts: int, now: int) -> None:
        mss = self.mss
        if seq_e <= self.rcv_nxt:
            # pure duplicate (e.g. spurious retransmission)
            self._emit_ack(now, self.rcv_nxt, 0, ts, (seq_e - seq_s) // mss)
            return
        if seq_s < self.rcv_nxt:
            seq_s = self.rcv_nxt
        if seq_s == self.rcv_nxt:
            old = self.rcv_nxt
            nxt = seq_e
            ooo = self.ooo
            while ooo and ooo[0][0] <= nxt:
                nxt = max(nxt, ooo.pop(0)[1])
            self.rcv_nxt = nxt
            self.on_goodput(now, nxt - old)
            self._emit_ack(now, nxt, (nxt - old + mss - 1) // mss, ts, 0)
        else:
            self._insert_ooo(seq_s, seq_e)
            self._emit_ack(now, self.rcv_nxt, 0, ts, (seq_e - seq_s) // mss)

    def _insert_ooo(self, s: int, e: int) -> None:
        ooo = self.ooo
        i = 0
        while i < len(ooo) and ooo[i][1] < s:
            i += 1
        j = i
        while j < len(ooo) and ooo[j][0] <= e:
            s = min(s, ooo[j][0])
            e = max(e, ooo[j][1])
            j += 1
        ooo[i:j] = [[s, e]]

    def _emit_ack(self, now: int, ack_seq: int, n_acks: int, echo_ts: int,
                  n_dup: int) -> None:
        sack = tuple((s, e) for s, e in self.ooo[:3]) if self.ooo else None
        self.ack_pipe.append((now + self.wired_delay,
                              ack_seq, n_acks, echo_ts, n_dup, sack))

    # --------------------------------------------------------------- sender

    def _sender_ack(self, ack_seq: int, n_acks: int, echo_ts: int,
                    n_dup: int, sack, now: int) -> None:
        rtt_sample = None
        if n_acks > 0 and echo_ts >= 0:
            rtt_sample = float(now - echo_ts)
            if rtt_sample > 0:
                self.rtt.on_sample(rtt_sample)
                self.rtt_sample_sum += rtt_sample * n_acks
                self.rtt_sample_n += n_acks
                self.last_rtt_sample = rtt_sample
                self.on_rtt(now, rtt_sample, n_acks)

        if sack:
            for s, e in sack:
                self._merge_sack(s, e)

        if ack_seq > self.snd_una:
            self.snd_una = ack_seq
            if self.rtx_nxt < ack_seq:
                self.rtx_nxt = ack_seq
            self._prune_sacked()
            if ack_seq >= self.recover:
                if self.phase == FAST_RECOVERY:
                    self.phase = CONG_AVOID
                    if math.isfinite(self.ssthresh):
                        self.cwnd = self.ssthresh
                self.dup_acks = 0
            else:
                # partial ACK while recovering (fast recovery or post-RTO):
                # repair the hole at the new left edge unless the SACK
                # scoreboard already retransmitted it
                if ack_seq >= self.rtx_high:
                    end = (self.sacked[0][0] if self.sacked
                           else ack_seq + self.mss)
                    end = min(end, self.recover)
                    if end > ack_seq:
                        self.rtx_pending.append((ack_seq, end))
                        self.retransmissions += (end - ack_seq) // self.mss
                        self.rtx_high = end
                self._sack_retransmit()
            self._cc_on_ack(ack_seq, n_acks, rtt_sample, now)
            if self.phase == SLOW_START and self.cwnd >= self.ssthresh:
                self.phase = CONG_AVOID
            self.rto_deadline = (now + int(self.rtt.rto)
                                 if self.bytes_in_flight() > 0 else None)
        elif n_dup > 0:
            self.dup_acks += n_dup
            if self.snd_una < self.recover:
                # already recovering: never restart recovery for old data
                self._sack_retransmit()
            elif self.dup_acks >= 3:
                self._fast_retransmit(now)
            if isinstance(self.cc, CrossLayer):
                self._cc_on_ack(ack_seq, 0, rtt_sample, now)

    def _merge_sack(self, s: int, e: int) -> None:
        if e <= self.snd_una:
            return
        sacked = self.sacked
        i = 0
        while i < len(sacked) and sacked[i][1] < s:
            i += 1
        j = i
        while j < len(sacked) and sacked[j][0] <= e:
            s = min(s, sacked[j][0])
            e = max(e, sacked[j][1])
            j += 1
        sacked[i:j] = [[s, e]]

    def _prune_sacked(self) -> None:
        una = self.snd_una
        sacked = self.sacked
        while sacked and sacked[0][1] <= una:
            sacked.pop(0)
        if sacked and sacked[0][0] < una:
            sacked[0][0] = una

    def _sack_retransmit(self) -> None:
        """Retransmit every hole below the highest SACKed byte, once."""
        if not self.sacked:
            return
        mss = self.mss
        prev = self.snd_una
        high = max(self.rtx_high, prev)
        for s, e in self.sacked:
            hs = max(prev, high)
            if s > hs:
                n = (s - hs) // mss
                if n > 0:
                    self.rtx_pending.append((hs, hs + n * mss))
                    self.retransmissions += n
            prev = e
        self.rtx_high = max(high, self.sacked[-1][1])

    def _cc_on_ack(self, ack_seq, n_acks, rtt_sample, now) -> None:
        newly = n_acks * self.mss
        if self.cc.needs_cross_layer:
            self.cc.on_ack(self, newly, max(n_acks, 1), rtt_sample, now,
                           datarate_bps=self.get_datarate(now),
                           sinr_db=self.get_sinr())
            self.ssthresh = math.inf
        elif (self.phase != FAST_RECOVERY and n_acks > 0
              and self.cwnd_limited):
            self.cc.on_ack(self, newly, n_acks, rtt_sample, now)

    def _fast_retransmit(self, now: int) -> None:
        self.recover = self.snd_nxt
        self.rtx_pending.append((self.snd_una, self.snd_una + self.mss))
        self.retransmissions += 1
        self.rtx_high = self.snd_una + self.mss
        self.cc.on_dup_ack_loss(self, now)
        self.phase = FAST_RECOVERY
        self._sack_retransmit()

    def _on_rto(self, now: int) -> None:
        self.rtx_pending.append((self.snd_una, self.snd_una + self.mss))
        self.retransmissions += 1
        self.rto_count += 1
        self.cc.on_rto(self, now)
        self.phase = SLOW_START
        self.dup_acks = 0
        self.recover = self.snd_nxt
        self.rtx_high = self.snd_una + self.mss
        # the pipe is considered empty: everything unacknowledged will be
        # resent in order, paced by the restarting window
        self.rtx_nxt = self.snd_una + self.mss
        self.rtt.rto = min(self.rtt.rto * 2.0, float(self.rtt.rto_max_ns))
        self.rto_deadline = now + int(self.rtt.rto)

    def _send(self, now: int) -> None:
        if now < self.start_time:
            return
        rlc = self.rlc
        if self.rtx_pending:
            for seq_s, seq_e in self.rtx_pending:
                n = (seq_e - seq_s) // self.mss
                if n > 0:
                    rlc.enqueue_batch(n, self.sdu_air, seq_s, self.mss, now)
            self.rtx_pending.clear()
        if (self.rtx_nxt < self.recover and self.snd_una < self.recover
                and self.phase != FAST_RECOVERY):
            # after an RTO the pipe is treated as empty: resend the old
            # window in order, paced by the restarting congestion window,
            # skipping ranges the receiver already reported via SACK
            mss = self.mss
            budget = int(self.cwnd) - (self.rtx_nxt - self.snd_una)
            while budget >= mss and self.rtx_nxt < self.recover:
                for s, e in self.sacked:
                    if s <= self.rtx_nxt < e:
                        self.rtx_nxt = e
                        break
                if self.rtx_nxt >= self.recover:
                    break
                limit = self.recover
                for s, _ in self.sacked:
                    if s > self.rtx_nxt:
                        limit = min(limit, s)
                        break
                n = min(budget, limit - self.rtx_nxt) // mss
                if n == 0:
                    break
                rlc.enqueue_batch(n, self.sdu_air, self.rtx_nxt, mss, now)
                self.retransmissions += n
                self.rtx_nxt += n * mss
                budget -= n * mss
            if self.rtx_high < self.rtx_nxt:
                self.rtx_high = self.rtx_nxt
            self.cwnd_limited = True
            return
        budget = int(self.cwnd) - (self.snd_nxt - self.snd_una)
        if budget < self.mss:
            self.cwnd_limited = True
            return
        self.cwnd_limited = False
        self.bucket.refill(now)
        n = self.bucket.take_segments(budget // self.mss, self.mss)
        if n == 0:
            return
        rlc.enqueue_batch(n, self.sdu_air, self.snd_nxt, self.mss, now)
        self.snd_nxt += n * self.mss
        if self.rto_deadline is None:
            self.rto_deadline = now + int(self.rtt.rto)
