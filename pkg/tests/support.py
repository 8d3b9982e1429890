"""Shared helpers for planner end-to-end tests."""

from __future__ import annotations

from sumoflow.planner.engine import PlannerEvent
from sumoflow.toolserver.registry import ToolRegistry


def assert_gating(events: list[PlannerEvent], registry: ToolRegistry) -> None:
    """Every side-effecting tool_started must be dominated by a confirmed plan
    covering that tool, with no rejection in between."""
    active_allowed: set[str] | None = None
    for event in events:
        if event.kind == "plan_preview":
            plan = event.payload["plan"]
            if plan["status"] == "confirmed":
                active_allowed = {step["tool"] for step in plan["steps"]}
        if event.kind == "agent_text" and "rejected" in event.payload.get("text", "").lower():
            active_allowed = None
        if event.kind == "tool_started":
            tool = event.payload["tool"]
            if registry.get(tool).side_effecting:
                assert active_allowed is not None, f"{tool} ran with no confirmed plan"
                assert tool in active_allowed, f"{tool} ran outside the confirmed plan"


def count_side_effecting_started(events: list[PlannerEvent], registry: ToolRegistry) -> int:
    return sum(
        1
        for event in events
        if event.kind == "tool_started" and registry.get(event.payload["tool"]).side_effecting
    )


SIMPLE_FLOW_SCRIPT = [
    {
        "expect": {"role": "user", "contains": "Gangnam"},
        "respond": {
            "classification": {"level": "simple", "rationale": "single-step simulation request"},
            "intent": {
                "task_family": "simple_simulation",
                "slots": {"spatial_scope": {"place": "Gangnam Station, Seoul", "radius_m": 2000}, "trip_type": "random"},
            },
        },
    },
    {
        "expect": {"role": "agent"},
        "respond": {"tool_calls": [{"name": "generate_network", "arguments": {"place": "Gangnam Station, Seoul", "radius_m": 2000}}]},
    },
    {
        "expect": {"role": "tool"},
        "respond": {"tool_calls": [{"name": "generate_random_trips", "arguments": {"condition": "medium", "duration_s": 3600, "seed": 42}}]},
    },
    {
        "expect": {"role": "tool"},
        "respond": {"tool_calls": [{"name": "compute_routes", "arguments": {"seed": 42}}]},
    },
    {
        "expect": {"role": "tool"},
        "respond": {"tool_calls": [{"name": "assemble_config", "arguments": {"duration_s": 3600, "seed": 42}}]},
    },
    {
        "expect": {"role": "tool"},
        "respond": {"tool_calls": [{"name": "run_simulation", "arguments": {"label": "baseline"}}]},
    },
    {
        "expect": {"role": "tool"},
        "respond": {"text": "Simulation finished; metrics summarized from the baseline run."},
    },
]
