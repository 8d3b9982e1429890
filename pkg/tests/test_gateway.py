"""Gateway HTTP surface: sessions, ordering, resumable streams, decisions."""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from sumoflow.gateway.app import GatewayConfig, create_app
from sumoflow.planner.conversation import SessionState
from sumoflow.planner.engine import PlannerEngine
from sumoflow.planner.llm import MockScriptBackend
from sumoflow.tools_catalog import build_registry

FIXTURES = Path(__file__).parent / "fixtures"
SCRIPTS = FIXTURES / "scripts"

GANGNAM = "Run a traffic simulation around Gangnam Station in Seoul within a 2 km radius."


@pytest.fixture()
def client(tmp_path):
    config = GatewayConfig(
        workspace_root=tmp_path / "sessions",
        backend_factory=lambda: MockScriptBackend.from_file(SCRIPTS / "gangnam_simple.yaml"),
        dry_run_tools=True,
    )
    with TestClient(create_app(config)) as test_client:
        yield test_client


def _parse_sse(text: str) -> list[dict]:
    events = []
    for chunk in text.split("\n\n"):
        for line in chunk.splitlines():
            if line.startswith("data: "):
                events.append(json.loads(line[len("data: "):]))
    return events


class TestSessionLifecycle:
    def test_create_message_stream_in_seq_order(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        response = client.post(f"/sessions/{session_id}/messages", json={"text": GANGNAM})
        assert response.status_code == 200
        events = response.json()["events"]
        assert events[0]["kind"] == "clarification"

        streamed = _parse_sse(client.get(f"/sessions/{session_id}/events?from=0").text)
        seqs = [e["seq"] for e in streamed]
        assert seqs == sorted(seqs)
        assert seqs == list(range(1, len(seqs) + 1))
        assert [e["kind"] for e in streamed] == [e["kind"] for e in events]

    def test_resume_from_seq(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        client.post(f"/sessions/{session_id}/messages", json={"text": GANGNAM})
        client.post(f"/sessions/{session_id}/messages", json={"text": "accept defaults"})
        all_events = _parse_sse(client.get(f"/sessions/{session_id}/events?from=0").text)
        k = 3
        resumed = _parse_sse(client.get(f"/sessions/{session_id}/events?from={k}").text)
        assert resumed[0]["seq"] == k + 1
        assert resumed == all_events[k:]

    def test_resume_once_sees_complete_log(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        client.post(f"/sessions/{session_id}/messages", json={"text": GANGNAM})
        first_half = _parse_sse(client.get(f"/sessions/{session_id}/events?from=0").text)
        client.post(f"/sessions/{session_id}/messages", json={"text": "accept defaults"})
        resumed = _parse_sse(
            client.get(f"/sessions/{session_id}/events?from={first_half[-1]['seq']}").text
        )
        observed = first_half + resumed
        full = _parse_sse(client.get(f"/sessions/{session_id}/events?from=0").text)
        assert observed == full

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/state").status_code == 404

    def test_duplicate_session_conflict(self, client):
        client.post("/sessions", json={"session_id": "dup"})
        assert client.post("/sessions", json={"session_id": "dup"}).status_code == 409


class TestPlanDecision:
    def test_decision_with_no_pending_plan_conflicts(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        response = client.post(
            f"/sessions/{session_id}/plan-decision", json={"decision": "approve"}
        )
        assert response.status_code == 409

    def test_full_flow_reaches_execution(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        client.post(f"/sessions/{session_id}/messages", json={"text": GANGNAM})
        events = client.post(
            f"/sessions/{session_id}/messages", json={"text": "accept defaults"}
        ).json()["events"]
        kinds = [e["kind"] for e in events]
        assert "plan_preview" in kinds
        assert kinds.count("tool_started") == 5

    def test_state_endpoint_reflects_plan(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        client.post(f"/sessions/{session_id}/messages", json={"text": GANGNAM})
        client.post(f"/sessions/{session_id}/messages", json={"text": "accept defaults"})
        state = client.get(f"/sessions/{session_id}/state").json()
        assert state["active_plan"]["status"] == "executed"
        assert state["artifact_refs"]


class TestArtifactsAndRuns:
    def test_unknown_run_metrics_404(self, client):
        assert client.get("/runs/ghost:run-9/metrics").status_code == 404

    def test_artifact_served_by_hash_immutable(self, client, tmp_path):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        gateway = client.app.state.gateway
        workspace = gateway.manager.open(session_id)
        path = workspace.root / "plots" / "density.png"
        path.write_bytes(b"\x89PNG fake image bytes")
        artifact = workspace.register("plot", path)
        response = client.get(f"/artifacts/{artifact.content_hash}")
        assert response.status_code == 200
        assert response.content == b"\x89PNG fake image bytes"
        assert "immutable" in response.headers["cache-control"]

    def test_unknown_artifact_404(self, client):
        assert client.get("/artifacts/deadbeef").status_code == 404


class TestTransportParity:
    def test_gateway_and_direct_engine_produce_identical_event_logs(self, client):
        session_id = client.post("/sessions", json={}).json()["session_id"]
        client.post(f"/sessions/{session_id}/messages", json={"text": GANGNAM})
        client.post(f"/sessions/{session_id}/messages", json={"text": "accept defaults"})
        via_gateway = [
            {"kind": e["kind"], "payload": e["payload"]}
            for e in _parse_sse(client.get(f"/sessions/{session_id}/events?from=0").text)
        ]

        ticks = iter(range(1, 10000))
        engine = PlannerEngine(
            state=SessionState("parity"),
            registry=build_registry(None, dry_run=True),
            backend=MockScriptBackend.from_file(SCRIPTS / "gangnam_simple.yaml"),
            clock=lambda: float(next(ticks)),
        )
        direct = []
        for text in (GANGNAM, "accept defaults"):
            direct.extend(e.to_json() for e in engine.step(text))
        assert via_gateway == direct
