"""Turn-based to concurrent conversion."""

from __future__ import annotations

import pytest

from congame import (
    InputError,
    NonRectangularActions,
    NotAlternating,
    ObjectiveKind,
    UnknownState,
    convert,
    game_to_dict,
    load_turn_based,
    solve,
    tb_from_dict,
)

from .conftest import GAMES, golden_json


def handshake_raw() -> dict:
    return {
        "states": [
            {"id": "u", "owner": 1},
            {"id": "v", "owner": 2},
            {"id": "w", "owner": 1},
        ],
        "transitions": [
            {"from": "u", "label": "a", "to": "v"},
            {"from": "v", "label": "b", "to": "w"},
        ],
        "winning": {
            "kind": "transitions",
            "items": [{"from": "v", "label": "b", "to": "w"}],
        },
        "objective_kind": "buchi",
    }


class TestConvert:
    def test_handshake_matches_golden(self):
        tb = load_turn_based(str(GAMES / "tb_handshake.json"))
        g, obj, stats = convert(tb)
        assert game_to_dict(g, obj) == golden_json("convert_tb_handshake.json")

    def test_handshake_structure(self):
        g, obj, stats = convert(tb_from_dict(handshake_raw()))
        assert g.states == ("u", "w")
        assert g.p1_actions("u") == ("a",)
        assert g.p2_actions("u") == ("b",)
        assert g.succ("u", "a", "b") == "w"
        # w has no usable moves and becomes absorbing
        assert g.p1_actions("w") == ("loop",)
        assert g.succ("w", "loop", "loop") == "w"
        assert obj.kind is ObjectiveKind.BUCHI
        assert obj.target == {"w"}
        assert stats.to_dict() == {
            "p1_states": 2, "p2_states": 1, "merged_transitions": 1,
            "dropped_actions": 0, "self_loops_added": 1}

    def test_converted_game_is_solvable(self):
        g, obj, _ = convert(tb_from_dict(handshake_raw()))
        assert solve(g, obj).winning == {"u", "w"}

    def test_not_alternating(self):
        raw = handshake_raw()
        raw["transitions"].append({"from": "u", "label": "z", "to": "w"})
        with pytest.raises(NotAlternating) as e:
            convert(tb_from_dict(raw))
        assert (e.value.src, e.value.dst) == ("u", "w")

    def test_non_rectangular(self):
        raw = handshake_raw()
        raw["states"].append({"id": "v2", "owner": 2})
        raw["transitions"] += [
            {"from": "u", "label": "c", "to": "v2"},
            {"from": "v2", "label": "zz", "to": "w"},
        ]
        with pytest.raises(NonRectangularActions) as e:
            convert(tb_from_dict(raw))
        assert e.value.state == "u"

    def test_dead_end_successor_drops_action(self):
        raw = handshake_raw()
        raw["states"].append({"id": "v2", "owner": 2})
        raw["transitions"].append({"from": "u", "label": "c", "to": "v2"})
        g, _, stats = convert(tb_from_dict(raw))
        assert g.p1_actions("u") == ("a",)
        assert stats.dropped_actions == 1

    def test_state_winning_marks(self):
        raw = handshake_raw()
        raw["winning"] = {"kind": "states", "items": ["v"]}
        _, obj, _ = convert(tb_from_dict(raw))
        # the winning player-2 state marks every merged target through it
        assert obj.target == {"w"}
        raw["winning"] = {"kind": "states", "items": ["u"]}
        _, obj, _ = convert(tb_from_dict(raw))
        assert obj.target == {"u"}

    def test_second_half_winning_transition(self):
        raw = handshake_raw()
        raw["winning"] = {
            "kind": "transitions",
            "items": [{"from": "u", "label": "a", "to": "v"}],
        }
        _, obj, _ = convert(tb_from_dict(raw))
        assert obj.target == {"w"}

    def test_no_p1_states(self):
        raw = {
            "states": [{"id": "v", "owner": 2}],
            "transitions": [],
            "winning": {"kind": "states", "items": []},
            "objective_kind": "safety",
        }
        with pytest.raises(InputError):
            convert(tb_from_dict(raw))


class TestParsing:
    def test_missing_keys(self):
        raw = handshake_raw()
        del raw["winning"]
        with pytest.raises(InputError):
            tb_from_dict(raw)

    def test_bad_owner(self):
        raw = handshake_raw()
        raw["states"][0]["owner"] = 3
        with pytest.raises(InputError):
            tb_from_dict(raw)

    def test_duplicate_state(self):
        raw = handshake_raw()
        raw["states"].append({"id": "u", "owner": 1})
        with pytest.raises(InputError):
            tb_from_dict(raw)

    def test_duplicate_move(self):
        raw = handshake_raw()
        raw["transitions"].append({"from": "u", "label": "a", "to": "v"})
        with pytest.raises(InputError):
            tb_from_dict(raw)

    def test_unknown_transition_endpoint(self):
        raw = handshake_raw()
        raw["transitions"].append({"from": "u", "label": "q", "to": "zz"})
        with pytest.raises(UnknownState):
            tb_from_dict(raw)

    def test_winning_transition_must_exist(self):
        raw = handshake_raw()
        raw["winning"]["items"] = [{"from": "u", "label": "zz", "to": "v"}]
        with pytest.raises(InputError):
            tb_from_dict(raw)

    def test_unknown_winning_state(self):
        raw = handshake_raw()
        raw["winning"] = {"kind": "states", "items": ["zz"]}
        with pytest.raises(UnknownState):
            tb_from_dict(raw)

    def test_unknown_winning_kind(self):
        raw = handshake_raw()
        raw["winning"] = {"kind": "colors", "items": []}
        with pytest.raises(InputError):
            tb_from_dict(raw)

    def test_unknown_objective_kind(self):
        raw = handshake_raw()
        raw["objective_kind"] = "parity"
        with pytest.raises(InputError):
            tb_from_dict(raw)
