"""Event-sourced session state: replay identity and block integrity."""

import pytest

from sumoflow.planner.conversation import (
    ConversationTurn,
    SessionState,
    invocation_block,
    parse_slot_answers,
    result_block,
    text_block,
)


def _sample_turns():
    return [
        ConversationTurn("user", [text_block("run a simulation")], 1.0),
        ConversationTurn(
            "agent",
            [
                {
                    "kind": "interpretation",
                    "intent": {"task_family": "simple_simulation", "slots": {}},
                    "complexity": {"level": "simple", "rationale": "r"},
                }
            ],
            2.0,
        ),
        ConversationTurn(
            "agent",
            [{"kind": "clarification", "questions": [{"slot": "condition", "question": "q", "default": "medium", "assumption": "a"}]}],
            3.0,
        ),
        ConversationTurn("user", [text_block("condition: light\nduration_s: 600")], 4.0),
        ConversationTurn(
            "agent",
            [
                {
                    "kind": "plan",
                    "plan": {
                        "inputs_summary": {},
                        "steps": [{"tool": "run_simulation", "args": {}, "note": ""}],
                        "expected_outputs": [],
                        "validation_checks": [],
                        "status": "confirmed",
                    },
                }
            ],
            5.0,
        ),
        ConversationTurn(
            "agent", [invocation_block("call_0_0", "run_simulation", {"label": "x"})], 6.0
        ),
        ConversationTurn(
            "tool",
            [
                result_block(
                    "call_0_0",
                    "run_simulation",
                    {
                        "content": [
                            {"type": "artifact", "role": "tripinfo", "path": "output/tripinfo.xml", "hash": "h1"},
                            {"type": "structured", "value": {"run_id": "s:run-1", "metrics": {}}},
                        ],
                        "isError": False,
                    },
                )
            ],
            7.0,
        ),
    ]


class TestReplay:
    def test_replay_reconstructs_identical_state(self):
        live = SessionState("s")
        for turn in _sample_turns():
            live.apply_turn(turn)
        replayed = SessionState.replay("s", _sample_turns())
        assert replayed.snapshot() == live.snapshot()

    def test_state_accumulates_artifacts_and_runs(self):
        state = SessionState.replay("s", _sample_turns())
        assert state.artifact_refs["tripinfo"]["hash"] == "h1"
        assert state.run_ids == ["s:run-1"]
        assert state.active_plan.status == "confirmed"

    def test_user_answers_merged_into_pending_intent(self):
        state = SessionState.replay("s", _sample_turns()[:4])
        assert state.pending_intent["slots"]["condition"] == "light"
        assert state.pending_intent["slots"]["duration_s"] == 600

    def test_save_load_round_trip(self, tmp_path):
        state = SessionState("s")
        for turn in _sample_turns():
            state.apply_turn(turn)
        state.save(tmp_path / "session.json")
        loaded = SessionState.load(tmp_path / "session.json")
        assert loaded.snapshot() == state.snapshot()


class TestIntegrity:
    def test_result_without_invocation_rejected(self):
        state = SessionState("s")
        state.apply_turn(
            ConversationTurn("tool", [result_block("ghost", "x", {"content": [], "isError": False})], 1.0)
        )
        with pytest.raises(ValueError):
            state.check_tool_result_references()

    def test_well_formed_history_passes(self):
        state = SessionState.replay("s", _sample_turns())
        state.check_tool_result_references()

    def test_unknown_block_kind_rejected(self):
        with pytest.raises(ValueError):
            ConversationTurn("agent", [{"kind": "telepathy"}])

    def test_unknown_role_rejected(self):
        with pytest.raises(ValueError):
            ConversationTurn("system", [text_block("x")])


class TestSlotAnswerParsing:
    def test_accept_defaults_marker(self):
        assert parse_slot_answers("accept defaults") == {"__accept_defaults__": True}

    def test_key_value_lines(self):
        parsed = parse_slot_answers("condition: heavy\nduration_s: 1800")
        assert parsed == {"condition": "heavy", "duration_s": 1800}

    def test_plain_chat_is_not_an_answer(self):
        assert parse_slot_answers("tell me more about the area") is None

    def test_json_values_parsed(self):
        parsed = parse_slot_answers('ev_ratios: [0, 0.5, 1.0]')
        assert parsed == {"ev_ratios": [0, 0.5, 1.0]}
