"""Golden transcripts: the three archetype sessions replay byte-identically.

Each scripted session runs against the mock backend with dry-run tools and a
fake clock; the serialized event log must equal the frozen golden file byte
for byte. Regenerate deliberately after a protocol change:
REGEN_GOLDEN=1 pytest tests/test_transcripts.py
"""

import json
import os
from pathlib import Path

import pytest

from sumoflow.planner.conversation import SessionState
from sumoflow.planner.engine import PlannerEngine
from sumoflow.planner.llm import MockScriptBackend
from sumoflow.tools_catalog import build_registry

from support import assert_gating

FIXTURES = Path(__file__).parent / "fixtures"
SCRIPTS = FIXTURES / "scripts"
GOLDEN = FIXTURES / "golden"

SESSIONS = {
    "gangnam_simple": [
        "Run a traffic simulation around Gangnam Station in Seoul within a 2 km radius.",
        "accept defaults",
    ],
    "teheran_complex": [
        "One or two lanes on Teheran-ro will be closed for construction. How will this affect congestion?",
        "target_edge: A1B1\nlanes_closed: 1\ncondition: medium\nduration_s: 3600",
        "approve",
    ],
    "msg_agentic": [
        "After an event at Madison Square Garden, spectator traffic spreads toward bridges "
        "and tunnels in all directions. I'd like to find where congestion builds up and "
        "how to clear it faster.",
        "accept defaults",
        "approve",
    ],
}


def run_session(name: str) -> tuple[bytes, "PlannerEngine"]:
    backend = MockScriptBackend.from_file(SCRIPTS / f"{name}.yaml")
    registry = build_registry(None, dry_run=True)
    ticks = iter(range(1, 100000))
    engine = PlannerEngine(
        state=SessionState(name),
        registry=registry,
        backend=backend,
        clock=lambda: float(next(ticks)),
    )
    events = []
    for user_text in SESSIONS[name]:
        events.extend(engine.step(user_text))
    payload = "\n".join(json.dumps(e.to_json(), sort_keys=True) for e in events) + "\n"
    return payload.encode("utf-8"), events, engine


@pytest.mark.parametrize("name", sorted(SESSIONS))
class TestGoldenTranscripts:
    def test_replay_matches_golden(self, name):
        transcript, events, engine = run_session(name)
        golden_path = GOLDEN / f"{name}.events.jsonl"
        if os.environ.get("REGEN_GOLDEN"):
            golden_path.parent.mkdir(exist_ok=True)
            golden_path.write_bytes(transcript)
        assert golden_path.exists(), "golden transcript missing; run with REGEN_GOLDEN=1"
        assert transcript == golden_path.read_bytes()
        assert_gating(events, engine.registry)

    def test_two_runs_byte_identical(self, name):
        first, _, _ = run_session(name)
        second, _, _ = run_session(name)
        assert first == second

    def test_history_replay_is_state_identical(self, name):
        _, _, engine = run_session(name)
        replayed = SessionState.replay(name, engine.state.turns)
        assert replayed.snapshot() == engine.state.snapshot()
        engine.state.check_tool_result_references()
