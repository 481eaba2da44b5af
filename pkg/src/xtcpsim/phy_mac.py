"""TDD frame structure, MCS selection, TB sizing, round-robin scheduling, BLER.

The MCS table ships as a CSV data file.  Its top entry is calibrated so a
fully allocated subframe (24 symbols) carries exactly 40,000 gross bytes,
i.e. 3.2 Gbit/s sustained.  The block error model is the standard 10%
operating point at the selection threshold, linear in dB to 0% two dB above
and 100% two dB below.
"""

from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass
from importlib import resources

from .channel import LinkCondition, LinkState
from .sim_core import SUBFRAME_NS, SYMBOL_NS, RngStream

SYMBOLS_PER_SUBFRAME = 24
SUBFRAMES_PER_FRAME = 10
PHY_HEADER_BYTES = 24          # fixed per-TB allowance
BLER_AT_THRESHOLD = 0.10
BLER_ZERO_MARGIN_DB = 2.0

assert SYMBOLS_PER_SUBFRAME * SYMBOL_NS <= SUBFRAME_NS


@dataclass(frozen=True)
class McsEntry:
    index: int
    sinr_threshold_db: float
    bytes_per_symbol: float


@dataclass(frozen=True)
class DciRecord:
    subframe_start: int
    ue_id: int
    n_symbols: int
    mcs: int
    tb_bytes: int


class McsTable:
    def __init__(self, entries: list[McsEntry]):
        if not entries:
            raise ValueError("empty MCS table")
        for a, b in zip(entries, entries[1:]):
            if not (a.sinr_threshold_db < b.sinr_threshold_db
                    and a.bytes_per_symbol < b.bytes_per_symbol):
                raise ValueError("MCS thresholds/rates must be strictly increasing")
        self.entries = entries
        self._thresholds = [e.sinr_threshold_db for e in entries]

    @classmethod
    def load_default(cls) -> "McsTable":
        path = resources.files("xtcpsim.data").joinpath("mcs_table.csv")
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        return cls([McsEntry(int(r["index"]), float(r["sinr_threshold_db"]),
                             float(r["bytes_per_symbol"])) for r in rows])

    def select_mcs(self, sinr_db: float) -> int | None:
        """Highest index whose threshold <= sinr; None below the lowest."""
        i = bisect_right(self._thresholds, sinr_db)
        return i - 1 if i > 0 else None

    def tb_size(self, mcs: int | None, n_symbols: int) -> int:
        """Net TB payload bytes (gross minus the PHY header allowance)."""
        if mcs is None or n_symbols == 0:
            return 0
        if not 1 <= n_symbols <= SYMBOLS_PER_SUBFRAME:
            raise ValueError(f"n_symbols {n_symbols} out of range")
        gross = int(self.entries[mcs].bytes_per_symbol * n_symbols)
        return max(gross - PHY_HEADER_BYTES, 0)

    def tb_gross(self, mcs: int, n_symbols: int) -> int:
        return int(self.entries[mcs].bytes_per_symbol * n_symbols)

    def bler(self, sinr_db: float, mcs: int) -> float:
        thr = self.entries[mcs].sinr_threshold_db
        delta = sinr_db - thr
        if delta >= BLER_ZERO_MARGIN_DB:
            return 0.0
        if delta <= -BLER_ZERO_MARGIN_DB:
            return 1.0
        if delta >= 0.0:
            return BLER_AT_THRESHOLD * (1.0 - delta / BLER_ZERO_MARGIN_DB)
        return (BLER_AT_THRESHOLD
                + (1.0 - BLER_AT_THRESHOLD) * (-delta / BLER_ZERO_MARGIN_DB))


def schedule_subframe(table: McsTable, subframe_start: int,
                      backlogged_ues: list[int],
                      link_states: dict[int, LinkState]) -> list[DciRecord]:
    """Round robin: split the 24 symbols evenly among usable backlogged UEs.

    Remainder symbols go to the lowest UE ids.  One DciRecord per allocated
    UE, delivered at the subframe boundary.
    """
    usable = [ue for ue in sorted(backlogged_ues)
              if table.select_mcs(link_states[ue].sinr_db) is not None]
    if not usable:
        return []
    base, rem = divmod(SYMBOLS_PER_SUBFRAME, len(usable))
    dcis = []
    for i, ue in enumerate(usable):
        n_sym = base + (1 if i < rem else 0)
        if n_sym == 0:
            continue
        mcs = table.select_mcs(link_states[ue].sinr_db)
        dcis.append(DciRecord(subframe_start, ue, n_sym, mcs,
                              table.tb_size(mcs, n_sym)))
    return dcis


def transmit_tb(table: McsTable, dci: DciRecord, link: LinkState,
                rng: RngStream) -> bool:
    """True if delivered; loss drawn from the tb_error stream."""
    if link.condition is LinkCondition.OUTAGE:
        return False
    p = table.bler(link.sinr_db, dci.mcs)
    if p <= 0.0:
        return True
    return rng.uniform() >= p
