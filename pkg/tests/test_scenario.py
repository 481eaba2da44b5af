"""Scenario document validation, defaults, and JSON round-trips."""

import pytest

from xtcpsim import ConfigError, Scenario
from xtcpsim.sim_core import MS, SECOND

MINIMAL = {"ues": [{"start": [10.0, 5.0]}]}


class TestValidation:
    def test_minimal_document_gets_defaults(self):
        scn = Scenario.from_dict(MINIMAL)
        assert scn.duration_s == 10.0
        assert scn.seed == 1
        assert scn.rate_cap_bps == 1_000_000_000
        assert scn.tcp.lam == 0.85
        assert scn.tcp.epsilon_ms == 10.0
        assert scn.rlc.capacity_bytes == 10_000_000
        assert scn.channel.tx_power_dbm == 30.0
        assert scn.ues[0].cc == "xtcp"
        assert scn.duration_ns == 10 * SECOND

    def test_unknown_top_level_key_rejected_by_name(self):
        with pytest.raises(ConfigError, match="bogus_key"):
            Scenario.from_dict(dict(MINIMAL, bogus_key=1))

    def test_unknown_nested_key_rejected_by_name(self):
        doc = dict(MINIMAL, channel={"tx_power": 30.0})
        with pytest.raises(ConfigError, match="tx_power"):
            Scenario.from_dict(doc)

    def test_missing_ues_rejected(self):
        with pytest.raises(ConfigError, match="ues"):
            Scenario.from_dict({})

    def test_unknown_cc_flavor_rejected(self):
        doc = {"ues": [{"start": [1.0, 1.0], "cc": "vegas"}]}
        with pytest.raises(ConfigError, match="vegas"):
            Scenario.from_dict(doc)

    def test_outage_for_unknown_ue_rejected(self):
        doc = dict(MINIMAL, forced_outages=[[3, 1.0, 1.0]])
        with pytest.raises(ConfigError, match="unknown UE"):
            Scenario.from_dict(doc)

    def test_non_positive_duration_rejected(self):
        with pytest.raises(ConfigError):
            Scenario.from_dict(dict(MINIMAL, duration_s=0.0))

    def test_heading_normalized_to_unit_vector(self):
        doc = {"ues": [{"start": [1.0, 1.0], "heading": [3.0, 4.0]}]}
        scn = Scenario.from_dict(doc)
        assert scn.ues[0].heading == (0.6, 0.8)

    def test_zero_heading_rejected(self):
        doc = {"ues": [{"start": [1.0, 1.0], "heading": [0.0, 0.0]}]}
        with pytest.raises(ConfigError):
            Scenario.from_dict(doc)


class TestRoundTrip:
    def test_to_dict_from_dict_is_identity(self):
        doc = {
            "name": "rt", "duration_s": 3.5, "seed": 9,
            "geometry": {"area": [100.0, 50.0], "enb": [50.0, 25.0],
                         "obstacles": [[1.0, 2.0, 3.0, 4.0]]},
            "ues": [{"start": [5.0, 5.0], "heading": [1.0, 0.0],
                     "speed": 2.0, "cc": "cubic"}],
            "forced_outages": [[0, 1.0, 0.5]],
            "rate_cap_bps": 2_000_000_000,
            "tcp": {"lambda": 0.9, "epsilon_ms": 5.0},
        }
        first = Scenario.from_dict(doc)
        second = Scenario.from_dict(first.to_dict())
        assert first == second
        assert second.to_dict() == first.to_dict()

    def test_json_file_round_trip(self, tmp_path):
        scn = Scenario.from_dict(MINIMAL)
        path = tmp_path / "scn.json"
        scn.to_json(path)
        assert Scenario.from_json(path) == scn

    def test_millisecond_fields_convert_to_nanoseconds(self):
        doc = dict(MINIMAL,
                   channel={"update_period_ms": 2.0},
                   rlc={"status_period_ms": 7.0})
        scn = Scenario.from_dict(doc)
        assert scn.channel.update_period_ns == 2 * MS
        assert scn.rlc.status_period_ns == 7 * MS
