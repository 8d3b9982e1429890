"""Planner engine: clarify, confirm, gated execution, correction loops."""

import random

import pytest

from sumoflow.errors import NoPendingPlanError
from sumoflow.planner.conversation import SessionState
from sumoflow.planner.engine import PlannerEngine, parse_decision
from sumoflow.planner.llm import MockScriptBackend
from sumoflow.planner.sufficiency import schema_for
from sumoflow.tools_catalog import TOOL_SCHEMAS, build_registry

from support import SIMPLE_FLOW_SCRIPT, assert_gating, count_side_effecting_started

GANGNAM = "Run a traffic simulation around Gangnam Station in Seoul within a 2 km radius."
TEHERAN = (
    "One or two lanes on Teheran-ro will be closed for construction. "
    "How will this affect congestion?"
)


def make_engine(script: list[dict]) -> PlannerEngine:
    registry = build_registry(None, dry_run=True)
    fake_time = iter(range(1, 100000))
    return PlannerEngine(
        state=SessionState("t"),
        registry=registry,
        backend=MockScriptBackend(script),
        clock=lambda: float(next(fake_time)),
    )


class TestClarification:
    def test_missing_params_yield_matching_question_count(self):
        engine = make_engine(SIMPLE_FLOW_SCRIPT[:1])
        events = engine.step(GANGNAM)
        clarifications = [e for e in events if e.kind == "clarification"]
        assert len(clarifications) == 1
        questions = clarifications[0].payload["questions"]
        # spatial_scope and trip_type provided; condition + duration_s missing
        assert {q["slot"] for q in questions} == {"condition", "duration_s"}
        assert all(q["default"] is not None for q in questions)
        schema = schema_for("simple_simulation")
        required_missing = [
            s for s in schema.slots
            if s.required and s.name not in ("spatial_scope", "trip_type")
        ]
        assert len(questions) == len(required_missing)

    def test_no_execution_during_clarification(self):
        engine = make_engine(SIMPLE_FLOW_SCRIPT[:1])
        events = engine.step(GANGNAM)
        assert count_side_effecting_started(events, engine.registry) == 0


class TestSimpleFlow:
    def test_full_golden_sequence(self):
        engine = make_engine(SIMPLE_FLOW_SCRIPT)
        events = engine.step(GANGNAM)
        events += engine.step("accept defaults")
        kinds = [e.kind for e in events]
        assert kinds[0] == "clarification"
        assert "plan_preview" in kinds
        tool_events = [e for e in events if e.kind == "tool_started"]
        assert [e.payload["tool"] for e in tool_events] == [
            "generate_network",
            "generate_random_trips",
            "compute_routes",
            "assemble_config",
            "run_simulation",
        ]
        assert kinds[-1] == "agent_text"
        assert any(e.kind == "metrics_ready" for e in events)
        assert_gating(events, engine.registry)

    def test_plan_auto_confirmed_for_simple(self):
        engine = make_engine(SIMPLE_FLOW_SCRIPT)
        engine.step(GANGNAM)
        events = engine.step("accept defaults")
        preview = next(e for e in events if e.kind == "plan_preview")
        assert preview.payload["plan"]["status"] == "confirmed"

    def test_replay_reconstructs_state(self):
        engine = make_engine(SIMPLE_FLOW_SCRIPT)
        engine.step(GANGNAM)
        engine.step("accept defaults")
        replayed = SessionState.replay("t", engine.state.turns)
        assert replayed.snapshot() == engine.state.snapshot()
        engine.state.check_tool_result_references()


COMPLEX_INTERPRET = {
    "expect": {"role": "user"},
    "respond": {
        "classification": {"level": "complex", "rationale": "comparison request"},
        "intent": {
            "task_family": "policy_comparison",
            "slots": {
                "spatial_scope": {"place": "Teheran-ro, Seoul", "radius_m": 2000},
                "target_edge": "A1B1",
                "lanes_closed": 1,
                "condition": "medium",
                "duration_s": 3600,
            },
        },
    },
}


class TestConfirmationGate:
    def test_complex_plan_awaits_confirmation(self):
        engine = make_engine([COMPLEX_INTERPRET])
        events = engine.step(TEHERAN)
        preview = next(e for e in events if e.kind == "plan_preview")
        assert preview.payload["plan"]["status"] == "awaiting_confirmation"
        assert count_side_effecting_started(events, engine.registry) == 0

    def test_non_decision_message_reprompts_without_execution(self):
        engine = make_engine([COMPLEX_INTERPRET])
        engine.step(TEHERAN)
        events = engine.step("what is a lane closure anyway?")
        assert [e.kind for e in events] == ["clarification"]
        assert engine.state.active_plan.status == "awaiting_confirmation"
        assert count_side_effecting_started(events, engine.registry) == 0

    def test_reject_executes_nothing(self):
        engine = make_engine([COMPLEX_INTERPRET])
        engine.step(TEHERAN)
        events = engine.step("reject")
        assert count_side_effecting_started(events, engine.registry) == 0
        assert engine.state.active_plan is None

    def test_approve_enters_execution(self):
        script = [
            COMPLEX_INTERPRET,
            {"expect": {"role": "agent"}, "respond": {"tool_calls": [{"name": "generate_network", "arguments": {}}]}},
            {"expect": {"role": "tool"}, "respond": {"text": "done"}},
        ]
        engine = make_engine(script)
        engine.step(TEHERAN)
        events = engine.step("approve")
        started = [e for e in events if e.kind == "tool_started"]
        assert [e.payload["tool"] for e in started] == ["generate_network"]
        assert_gating(events, engine.registry)

    def test_modify_reenters_sufficiency(self):
        engine = make_engine([COMPLEX_INTERPRET])
        engine.step(TEHERAN)
        events = engine.step('modify: {"lanes_closed": 2}')
        preview = next(e for e in events if e.kind == "plan_preview")
        steps = preview.payload["plan"]["steps"]
        reduce_step = next(s for s in steps if s["tool"] == "reduce_lanes")
        assert reduce_step["args"]["lanes_removed"] == 2
        assert preview.payload["plan"]["status"] == "awaiting_confirmation"

    def test_structured_decide_plan_without_pending_raises(self):
        engine = make_engine([])
        with pytest.raises(NoPendingPlanError):
            engine.decide_plan("approve")


class TestExecutionGating:
    def test_tool_outside_plan_refused(self):
        script = [
            COMPLEX_INTERPRET,
            # close_road is side-effecting and NOT part of the lane-closure plan template
            {"expect": {"role": "agent"}, "respond": {"tool_calls": [{"name": "close_road", "arguments": {"edges": ["A1B1"]}}]}},
            {"expect": {"role": "tool"}, "respond": {"text": "understood, stopping"}},
        ]
        engine = make_engine(script)
        engine.step(TEHERAN)
        events = engine.step("approve")
        refusals = [e for e in events if e.kind == "error" and e.payload.get("tool") == "close_road"]
        assert len(refusals) == 1
        assert count_side_effecting_started(events, engine.registry) == 0
        # the correction is visible to the model as a tool result turn
        last_tool_turn = [t for t in engine.state.turns if t.role == "tool"][-1]
        assert "correction" in str(last_tool_turn.blocks)

    def test_malformed_tool_call_corrected_not_executed(self):
        script = [
            COMPLEX_INTERPRET,
            {"expect": {"role": "agent"}, "respond": {"tool_calls": [{"name": "reduce_lanes", "arguments": {"edge": "A1B1", "lanes_removed": "two"}}]}},
            {"expect": {"role": "tool"}, "respond": {"tool_calls": [{"name": "reduce_lanes", "arguments": {"edge": "A1B1", "lanes_removed": 1}}]}},
            {"expect": {"role": "tool"}, "respond": {"text": "done"}},
        ]
        engine = make_engine(script)
        engine.step(TEHERAN)
        events = engine.step("approve")
        errors = [e for e in events if e.kind == "error"]
        assert any("violations" in e.payload for e in errors)
        started = [e.payload["tool"] for e in events if e.kind == "tool_started"]
        assert started == ["reduce_lanes"]  # only the corrected call ran
        assert_gating(events, engine.registry)

    def test_unknown_tool_refused(self):
        script = [
            COMPLEX_INTERPRET,
            {"expect": {"role": "agent"}, "respond": {"tool_calls": [{"name": "format_disk", "arguments": {}}]}},
            {"expect": {"role": "tool"}, "respond": {"text": "ok"}},
        ]
        engine = make_engine(script)
        engine.step(TEHERAN)
        events = engine.step("approve")
        assert any(e.kind == "error" for e in events)
        assert count_side_effecting_started(events, engine.registry) == 0


class TestRandomizedGating:
    def test_rogue_scripts_never_execute_unconfirmed(self):
        side_effecting = [name for name, spec in TOOL_SCHEMAS.items() if spec[2]]
        rng = random.Random(1234)
        for trial in range(10):
            tools = [
                {"name": rng.choice(side_effecting), "arguments": {}}
                for _ in range(rng.randint(1, 3))
            ]
            script = [
                {
                    "expect": {"role": "user"},
                    "respond": {
                        "classification": {"level": "complex", "rationale": "r"},
                        "intent": {"task_family": "policy_comparison", "slots": {}},
                        # a rogue model attaches tool calls to the interpretation
                        "tool_calls": tools,
                    },
                },
            ]
            engine = make_engine(script)
            events = engine.step(TEHERAN)
            assert count_side_effecting_started(events, engine.registry) == 0, f"trial {trial}"
            assert_gating(events, engine.registry)


class TestDecisionParsing:
    @pytest.mark.parametrize("text,expected", [
        ("approve", ("approve", {})),
        ("Yes", ("approve", {})),
        ("reject", ("reject", {})),
        ("n", ("reject", {})),
        ('modify: {"radius_m": 1000}', ("modify", {"radius_m": 1000})),
        ("hm, tell me more", None),
    ])
    def test_parse(self, text, expected):
        assert parse_decision(text) == expected
