"""RLC Acknowledged Mode: finite transmit buffer, segmentation, ARQ, in-order delivery.

The transmit queue is the bufferbloat site: drop-tail on overflow, so a
sender that overshoots the link rate eventually fills the buffer and loses
packets end to end.  Lost PDUs are NACKed in the next periodic status report
and retransmitted ahead of fresh data; a PDU that exceeds the retransmission
cap is discarded and surfaces as an end-to-end loss.

For speed, contiguous runs of whole SDUs that share one transport block are
tracked as a single PDU group (one sequence-number range), since every PDU
in a TB shares its fate.  Byte accounting is identical to per-PDU tracking.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .sim_core import MS

RLC_HEADER_BYTES = 3
MAC_SUBHEADER_BYTES = 2
PDU_OVERHEAD = RLC_HEADER_BYTES + MAC_SUBHEADER_BYTES
PDCP_HEADER_BYTES = 3


class EnqueueResult(Enum):
    ACCEPTED = "ACCEPTED"
    DROPPED = "DROPPED"


@dataclass
class RlcConfig:
    capacity_bytes: int = 10_000_000
    status_period_ns: int = 5 * MS
    max_retx: int = 16


WHOLE = 0   # group of n whole SDUs, one PDU each
FRAG = 1    # one PDU carrying a fragment of a single SDU
SKIP = 2    # tombstone for discarded SNs


class PduGroup:
    __slots__ = ("sn_start", "n_pdus", "payload", "kind", "retx_count",
                 "n_sdus", "seq_start", "seq_per", "sdu_air", "ts",
                 "frag_off", "frag_len")

    def __init__(self, sn_start, n_pdus, payload, kind,
                 seq_start=0, seq_per=0, sdu_air=0, ts=0, n_sdus=0,
                 frag_off=0, frag_len=0):
        self.sn_start = sn_start
        self.n_pdus = n_pdus
        self.payload = payload      # air bytes carried (excl. PDU headers)
        self.kind = kind
        self.retx_count = 0
        self.seq_start = seq_start
        self.seq_per = seq_per
        self.sdu_air = sdu_air
        self.ts = ts
        self.n_sdus = n_sdus
        self.frag_off = frag_off
        self.frag_len = frag_len

    def wire_cost(self) -> int:
        return self.payload + PDU_OVERHEAD * self.n_pdus


class _Batch:
    """Run of identical queued SDUs awaiting first transmission."""
    __slots__ = ("n", "sdu_air", "seq_start", "seq_per", "ts", "front_sent")

    def __init__(self, n, sdu_air, seq_start, seq_per, ts):
        self.n = n
        self.sdu_air = sdu_air
        self.seq_start = seq_start
        self.seq_per = seq_per
        self.ts = ts
        self.front_sent = 0   # air bytes of the front SDU already fragmented out


class RlcAm:
    """One uplink AM entity: UE-side transmitter plus eNB-side receiver.

    `on_sdu_batch(seq_start, n_sdus, seq_per_sdu, ts)` is invoked for SDUs
    released in order at the receiving end.
    """

    def __init__(self, cfg: RlcConfig, on_sdu_batch=None):
        self.cfg = cfg
        self.on_sdu_batch = on_sdu_batch or (lambda *a: None)
        # transmitter
        self.queue: deque[_Batch] = deque()
        self.occupancy = 0
        self.next_sn = 0
        self.retx_q: deque[PduGroup] = deque()
        self.lost_pending: list[PduGroup] = []
        # receiver
        self.expected_sn = 0
        self.pending: dict[int, PduGroup] = {}
        self.partial: dict[int, int] = {}       # sdu seq_start -> air bytes seen
        # conservation counters (air bytes, PDU payload granularity);
        # enqueued counts every offered byte, including drop-tail losses
        self.enqueued_bytes = 0
        self.dropped_bytes = 0
        self.delivered_bytes = 0
        self.discarded_bytes = 0
        # occupancy time integral support
        self.sdu_losses: list[tuple[int, int]] = []   # (seq_start, seq_per) surfaced

    # ------------------------------------------------------------------ tx

    def enqueue_sdu(self, sdu_bytes: int, t: int,
                    seq_start: int = 0, seq_per: int = 0) -> EnqueueResult:
        if sdu_bytes <= 0:
            raise ValueError("sdu_bytes must be positive")
        return self.enqueue_batch(1, sdu_bytes, seq_start, seq_per, t)

    def enqueue_batch(self, n_sdus: int, sdu_air: int, seq_start: int,
                      seq_per: int, ts: int) -> EnqueueResult:
        """Accept as many whole SDUs as fit; drop-tail the rest."""
        self.enqueued_bytes += n_sdus * sdu_air
        free = self.cfg.capacity_bytes - self.occupancy
        n_fit = min(n_sdus, free // sdu_air)
        if n_fit > 0:
            q = self.queue
            if (q and q[-1].ts == ts and q[-1].sdu_air == sdu_air
                    and q[-1].front_sent == 0 and q[-1].seq_per == seq_per
                    and q[-1].seq_start + q[-1].n * seq_per == seq_start):
                q[-1].n += n_fit
            else:
                q.append(_Batch(n_fit, sdu_air, seq_start, seq_per, ts))
            self.occupancy += n_fit * sdu_air
        n_drop = n_sdus - n_fit
        if n_drop > 0:
            self.dropped_bytes += n_drop * sdu_air
            for k in range(n_drop):
                self.sdu_losses.append((seq_start + (n_fit + k) * seq_per, seq_per))
            return EnqueueResult.DROPPED if n_fit == 0 else EnqueueResult.ACCEPTED
        return EnqueueResult.ACCEPTED

    def fill_tb(self, tb_bytes: int) -> list[PduGroup]:
        """Pack one transport block: retransmissions first, then fresh data."""
        budget = tb_bytes
        out: list[PduGroup] = []
        retx = self.retx_q
        while retx and budget > PDU_OVERHEAD:
            g = retx[0]
            cost = g.wire_cost()
            if cost <= budget:
                retx.popleft()
                out.append(g)
                budget -= cost
            elif g.kind == WHOLE and g.n_pdus > 1:
                per = g.payload // g.n_pdus + PDU_OVERHEAD
                n_fit = budget // per
                if n_fit == 0:
                    break
                head = self._split_whole(g, n_fit)
                out.append(head)
                budget -= head.wire_cost()
            else:
                break
        q = self.queue
        while q and budget > PDU_OVERHEAD:
            b = q[0]
            if b.front_sent > 0:
                rem = b.sdu_air - b.front_sent
                take = min(rem, budget - PDU_OVERHEAD)
                g = PduGroup(self.next_sn, 1, take, FRAG,
                             b.seq_start, b.seq_per, b.sdu_air, b.ts,
                             frag_off=b.front_sent, frag_len=take)
                self.next_sn += 1
                out.append(g)
                budget -= take + PDU_OVERHEAD
                self.occupancy -= take
                b.front_sent += take
                if b.front_sent == b.sdu_air:
                    b.front_sent = 0
                    b.n -= 1
                    b.seq_start += b.seq_per
                    if b.n == 0:
                        q.popleft()
                continue
            per = b.sdu_air + PDU_OVERHEAD
            n_fit = min(b.n, budget // per)
            if n_fit > 0:
                g = PduGroup(self.next_sn, n_fit, n_fit * b.sdu_air, WHOLE,
                             b.seq_start, b.seq_per, b.sdu_air, b.ts,
                             n_sdus=n_fit)
                self.next_sn += n_fit
                out.append(g)
                budget -= n_fit * per
                self.occupancy -= n_fit * b.sdu_air
                b.n -= n_fit
                b.seq_start += n_fit * b.seq_per
                if b.n == 0:
                    q.popleft()
            else:
                take = budget - PDU_OVERHEAD
                if take <= 0:
                    break
                g = PduGroup(self.next_sn, 1, take, FRAG,
                             b.seq_start, b.seq_per, b.sdu_air, b.ts,
                             frag_off=0, frag_len=take)
                self.next_sn += 1
                out.append(g)
                self.occupancy -= take
                b.front_sent = take
                budget = 0
        return out

    def _split_whole(self, g: PduGroup, n_head: int) -> PduGroup:
        """Split a WHOLE retransmission group at an SDU boundary; mutates g."""
        per_air = g.payload // g.n_pdus
        head = PduGroup(g.sn_start, n_head, n_head * per_air, WHOLE,
                        g.seq_start, g.seq_per, g.sdu_air, g.ts,
                        n_sdus=n_head)
        head.retx_count = g.retx_count
        g.sn_start += n_head
        g.n_pdus -= n_head
        g.n_sdus -= n_head
        g.payload -= head.payload
        g.seq_start += n_head * g.seq_per
        return head

    def on_tb_result(self, groups: list[PduGroup], delivered: bool) -> None:
        if delivered:
            self._receive(groups)
        else:
            self.lost_pending.extend(groups)

    def on_status_report(self) -> None:
        """Periodic report: NACKed groups requeue or are discarded at the cap."""
        if not self.lost_pending:
            return
        for g in self.lost_pending:
            g.retx_count += 1
            if g.retx_count > self.cfg.max_retx:
                self._discard(g)
            else:
                self.retx_q.append(g)
        self.lost_pending.clear()
        if len(self.retx_q) > 1:
            self.retx_q = deque(sorted(self.retx_q, key=lambda g: g.sn_start))

    def _discard(self, g: PduGroup) -> None:
        self.discarded_bytes += g.payload
        if g.kind == WHOLE:
            for i in range(g.n_sdus):
                self.sdu_losses.append((g.seq_start + i * g.seq_per, g.seq_per))
        else:
            self.sdu_losses.append((g.seq_start, g.seq_per))
        tomb = PduGroup(g.sn_start, g.n_pdus, 0, SKIP)
        tomb.seq_start = g.seq_start
        self._receive([tomb])

    # ------------------------------------------------------------------ rx

    def _deliver(self, g: PduGroup) -> None:
        if g.kind == WHOLE:
            self.delivered_bytes += g.payload
            self.on_sdu_batch(g.seq_start, g.n_sdus, g.seq_per, g.ts)
        elif g.kind == FRAG:
            self.delivered_bytes += g.payload
            seen = self.partial.get(g.seq_start, 0) + g.frag_len
            if seen >= g.sdu_air:
                self.partial.pop(g.seq_start, None)
                self.on_sdu_batch(g.seq_start, 1, g.seq_per, g.ts)
            else:
                self.partial[g.seq_start] = seen
        else:  # SKIP
            self.partial.pop(g.seq_start, None)

    def _receive(self, groups: list[PduGroup]) -> None:
        pending = self.pending
        exp = self.expected_sn
        if not pending:
            # fast path: everything already in sequence-number order
            i = 0
            for g in groups:
                if g.sn_start != exp:
                    break
                exp += g.n_pdus
                self._deliver(g)
                i += 1
            self.expected_sn = exp
            if i == len(groups):
                return
            groups = groups[i:]
        for g in groups:
            pending[g.sn_start] = g
        while True:
            g = pending.pop(self.expected_sn, None)
            if g is None:
                return
            self.expected_sn += g.n_pdus
            self._deliver(g)

    # -------------------------------------------------------------- checks

    def in_system_bytes(self) -> int:
        """Payload air bytes accepted but not yet delivered/dropped/discarded."""
        total = self.occupancy
        for g in self.retx_q:
            total += g.payload
        for g in self.lost_pending:
            total += g.payload
        for g in self.pending.values():
            total += g.payload
        return total

    def conservation_holds(self) -> bool:
        return (self.enqueued_bytes
                == self.delivered_bytes + self.dropped_bytes
                + self.discarded_bytes + self.in_system_bytes())
