"""Discrete-event simulator of TCP uplink flows over an abstracted mmWave link.

Five pluggable congestion controllers (a cross-layer BDP-pinning scheme plus
NewReno, BIC, CUBIC and Illinois), a finite RLC AM buffer as the bufferbloat
site, round-robin MAC scheduling over a 29-entry MCS ladder, and log-distance
pathloss with Gauss-Markov shadowing.  Runs are deterministic: the same
scenario and seed always produce byte-identical output.
"""

from .bundles import ScenarioBundle, bundle_document, list_bundles, load_bundle
from .cc import (MSS, Bic, BicConfig, CrossLayer, Cubic, CubicConfig,
                 Illinois, IllinoisConfig, NewReno, RttEstimator, XtcpConfig,
                 cubic_window, estimate_datarate, illinois_params,
                 make_controller, xtcp_cwnd)
from .channel import Channel, ChannelConfig, LinkCondition, LinkState, pathloss_db
from .geometry import (GeometryError, Obstacle, Point2D, Trajectory,
                       generate_obstacles, is_los)
from .metrics import jain_index, mean_ci95, summarize, windowed_goodput
from .phy_mac import DciRecord, McsEntry, McsTable, schedule_subframe, transmit_tb
from .rlc import EnqueueResult, RlcAm, RlcConfig
from .cli import gen_scenario
from .runner import RunResult, UeResult, run_scenario
from .scenario import ConfigError, Scenario, UeConfig
from .sim_core import (MS, SECOND, SUBFRAME_NS, SYMBOL_NS, US, Engine,
                       RngRegistry, RngStream, SchedulingError)

__all__ = [
    "MSS", "MS", "SECOND", "SUBFRAME_NS", "SYMBOL_NS", "US",
    "Bic", "BicConfig", "Channel", "ChannelConfig", "ConfigError",
    "CrossLayer", "Cubic", "CubicConfig", "DciRecord", "Engine",
    "EnqueueResult", "GeometryError", "Illinois", "IllinoisConfig",
    "LinkCondition", "LinkState", "McsEntry", "McsTable", "NewReno",
    "Obstacle", "Point2D", "RlcAm", "RlcConfig", "RngRegistry", "RngStream",
    "RttEstimator", "RunResult", "Scenario", "ScenarioBundle",
    "SchedulingError", "Trajectory", "UeConfig", "UeResult", "XtcpConfig",
    "bundle_document", "cubic_window", "estimate_datarate", "gen_scenario",
    "generate_obstacles", "illinois_params", "is_los", "jain_index",
    "list_bundles", "load_bundle", "make_controller", "mean_ci95",
    "pathloss_db", "run_scenario", "schedule_subframe", "summarize",
    "transmit_tb", "windowed_goodput", "xtcp_cwnd",
]

__version__ = "0.1.0"
