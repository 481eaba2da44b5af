"""Bundled, versioned scenario definitions.

Each bundle pairs a frozen scenario document with a short description and a
manifest of the aggregate checks it is designed to support.  The documents
live as JSON next to the package data so they are diff-able and stable
across releases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .scenario import Scenario

_DESCRIPTIONS = {
    "calibration-los": (
        "Single X-TCP UE pinned 50 m from the eNB, full LOS, shadowing off: "
        "the link sits at the top MCS so the gross PHY rate and the goodput "
        "ceiling can be checked against closed-form values."),
    "random-two-ue": (
        "Two UEs crossing a 120 m x 60 m area with randomly generated "
        "obstacles; both run the same congestion control flavor.  Used for "
        "RTT / buffer-occupancy / throughput comparisons between X-TCP and "
        "CUBIC under identical seeds."),
    "outage": (
        "Single UE at 5 m/s: LOS, NLOS behind a building wrapping a forced "
        "1 s outage at t = 6 s, then LOS with 5 small roadside obstacles. "
        "Exercises RTO recovery differences between flavors."),
    "overflow": (
        "Single CUBIC UE with a 1 MB RLC buffer driving through a deep NLOS "
        "stretch: forces drop-tail overflow, retransmissions and end-to-end "
        "loss, for byte-conservation and loss-path checks."),
    "mixed-fairness": (
        "One X-TCP UE and one CUBIC UE under saturation with staggered "
        "forced outages: measures inter-flavor fairness (Jain index) and "
        "the X-TCP throughput advantage after recoveries."),
}

_MANIFESTS = {
    "calibration-los": ("gross_phy_rate", "goodput_ceiling"),
    "random-two-ue": ("mean_rtt_ratio", "mean_occupancy_ratio",
                      "throughput_parity"),
    "outage": ("recovery_ordering", "recovery_confidence_intervals"),
    "overflow": ("byte_conservation", "drop_tail_loss"),
    "mixed-fairness": ("throughput_advantage", "jain_index_comparison"),
}


@dataclass(frozen=True)
class ScenarioBundle:
    name: str
    description: str
    scenario: Scenario
    manifest: tuple[str, ...]


def list_bundles() -> list[str]:
    return sorted(_DESCRIPTIONS)


def load_bundle(name: str) -> ScenarioBundle:
    if name not in _DESCRIPTIONS:
        raise KeyError(
            f"unknown bundle {name!r}; available: {', '.join(list_bundles())}")
    ref = resources.files("xtcpsim.data.scenarios") / f"{name}.json"
    doc = json.loads(ref.read_text())
    return ScenarioBundle(name=name,
                          description=_DESCRIPTIONS[name],
                          scenario=Scenario.from_dict(doc),
                          manifest=_MANIFESTS[name])


def bundle_document(name: str) -> dict:
    """The raw JSON document of a bundle (before validation defaults)."""
    if name not in _DESCRIPTIONS:
        raise KeyError(
            f"unknown bundle {name!r}; available: {', '.join(list_bundles())}")
    ref = resources.files("xtcpsim.data.scenarios") / f"{name}.json"
    return json.loads(ref.read_text())
