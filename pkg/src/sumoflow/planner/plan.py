"""Plan proposals and the clarify-before-execute state machine.

A proposal moves draft -> awaiting_confirmation -> {confirmed -> executed,
rejected}; a modification produces a fresh draft that re-enters the
sufficiency check. Side-effecting tools may only run while the active plan
is confirmed and lists them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import IllegalTransitionError, UnresolvedParametersError
from ..toolserver.registry import ToolRegistry
from .complexity import TaskComplexity
from .sufficiency import Intent, ScenarioSchema, check_sufficiency, schema_for

STATUSES = ("draft", "awaiting_confirmation", "confirmed", "rejected", "executed")

_TRANSITIONS = {
    ("draft", "awaiting_confirmation"),
    ("draft", "confirmed"),  # simple tasks with complete parameters bypass
    ("awaiting_confirmation", "confirmed"),
    ("awaiting_confirmation", "rejected"),
    ("confirmed", "executed"),
}


@dataclass
class PlanStep:
    tool: str
    args: dict[str, Any] = field(default_factory=dict)
    note: str = ""

    def to_json(self) -> dict:
        return {"tool": self.tool, "args": self.args, "note": self.note}


@dataclass
class PlanProposal:
    inputs_summary: dict[str, Any]
    steps: list[PlanStep]
    expected_outputs: list[str]
    validation_checks: list[str]
    assumptions: list[str] = field(default_factory=list)
    status: str = "draft"

    def transition(self, new_status: str) -> None:
        if (self.status, new_status) not in _TRANSITIONS:
            raise IllegalTransitionError(f"plan cannot move {self.status} -> {new_status}")
        self.status = new_status

    def allows_tool(self, tool_name: str) -> bool:
        return self.status == "confirmed" and any(s.tool == tool_name for s in self.steps)

    def to_json(self) -> dict:
        return {
            "inputs_summary": self.inputs_summary,
            "steps": [s.to_json() for s in self.steps],
            "expected_outputs": self.expected_outputs,
            "validation_checks": self.validation_checks,
            "assumptions": self.assumptions,
            "status": self.status,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlanProposal":
        return cls(
            inputs_summary=data["inputs_summary"],
            steps=[PlanStep(s["tool"], s.get("args", {}), s.get("note", "")) for s in data["steps"]],
            expected_outputs=data["expected_outputs"],
            validation_checks=data["validation_checks"],
            assumptions=data.get("assumptions", []),
            status=data.get("status", "draft"),
        )


def propose_plan(
    intent: Intent,
    complexity: TaskComplexity,
    registry: ToolRegistry,
    schema: ScenarioSchema | None = None,
) -> PlanProposal:
    """Build the tool plan for a validated intent.

    Requires an intent whose sufficiency check passes; simple tasks with
    complete parameters come back already confirmed, everything else is a
    draft the caller must submit for confirmation.
    """
    schema = schema or schema_for(intent.task_family)
    missing = check_sufficiency(intent, schema)
    if missing:
        names = [m.slot for m in missing]
        raise UnresolvedParametersError(f"cannot plan with unresolved parameters: {names}")

    builder = _PLAN_BUILDERS.get(intent.task_family)
    if builder is None:
        raise UnresolvedParametersError(f"no plan template for task family {intent.task_family!r}")
    plan = builder(intent)

    unknown = [s.tool for s in plan.steps if s.tool not in registry]
    if unknown:
        raise UnresolvedParametersError(f"plan references unregistered tools: {unknown}")
    for step in plan.steps:
        _validate_step_args(registry, step)

    if complexity.level == "simple":
        plan.assumptions.append("simple task with complete parameters; proceeding directly")
        plan.transition("confirmed")
    return plan


def _validate_step_args(registry: ToolRegistry, step: PlanStep) -> None:
    """Step summaries must not contradict the tool schema (types, enums)."""
    import jsonschema

    descriptor = registry.get(step.tool)
    relaxed = dict(descriptor.input_schema)
    relaxed.pop("required", None)
    validator = jsonschema.Draft7Validator(relaxed)
    errors = [e.message for e in validator.iter_errors(step.args)]
    if errors:
        raise UnresolvedParametersError(
            f"plan step {step.tool!r} has schema-invalid arguments: {errors}"
        )


# -- per-family plan templates ---------------------------------------------------


def _region_args(intent: Intent) -> dict:
    scope = intent.slots["spatial_scope"]
    if isinstance(scope, dict):
        return {k: v for k, v in scope.items() if k in ("place", "radius_m", "bbox", "derive_from_od", "margin_m", "network_type", "grid_number")}
    return {"place": str(scope)}


def _plan_simple(intent: Intent) -> PlanProposal:
    slots = intent.slots
    duration = slots["duration_s"]
    seed = slots.get("seed", 42)
    steps = [
        PlanStep("generate_network", _region_args(intent), "build the road network"),
        PlanStep(
            "generate_random_trips",
            {"condition": slots["condition"], "duration_s": duration, "seed": seed},
            "random demand scaled to network size",
        ),
        PlanStep("compute_routes", {"seed": seed}, "shortest-path routing"),
        PlanStep("assemble_config", {"duration_s": duration, "seed": seed}, "wire inputs and outputs"),
        PlanStep("run_simulation", {"label": "baseline"}, "execute and collect outputs"),
    ]
    return PlanProposal(
        inputs_summary={
            "spatial_scope": slots["spatial_scope"],
            "trip_type": slots["trip_type"],
            "condition": slots["condition"],
            "duration_s": duration,
            "seed": seed,
        },
        steps=steps,
        expected_outputs=["network", "routes", "tripinfo", "edgedata", "summary"],
        validation_checks=[
            "network parses with at least one edge",
            "trip count within 10% of the scaled target",
            "simulation exits cleanly",
        ],
    )


def _plan_policy_comparison(intent: Intent) -> PlanProposal:
    slots = intent.slots
    duration = slots["duration_s"]
    seed = slots.get("seed", 42)
    steps = [
        PlanStep("generate_network", _region_args(intent), "build the road network"),
        PlanStep(
            "generate_random_trips",
            {"condition": slots["condition"], "duration_s": duration, "seed": seed},
            "shared demand for both scenarios",
        ),
        PlanStep("compute_routes", {"seed": seed}, "routing on the unmodified network"),
        PlanStep("assemble_config", {"duration_s": duration, "seed": seed}, "pre-intervention config"),
        PlanStep("run_simulation", {"label": "pre"}, "baseline run"),
        PlanStep(
            "reduce_lanes",
            {"edge": str(slots["target_edge"]), "lanes_removed": int(slots["lanes_closed"])},
            "apply the construction closure",
        ),
        PlanStep("compute_routes", {"seed": seed}, "re-route on the patched network"),
        PlanStep("assemble_config", {"duration_s": duration, "seed": seed}, "post-intervention config"),
        PlanStep("run_simulation", {"label": "post"}, "identical seed on the patched network"),
        PlanStep(
            "compare_runs",
            {"metrics": list(slots.get("metrics") or ["density_veh_km", "time_loss_s"])},
            "pre/post deltas",
        ),
    ]
    return PlanProposal(
        inputs_summary={
            "spatial_scope": slots["spatial_scope"],
            "target_edge": slots["target_edge"],
            "lanes_closed": slots["lanes_closed"],
            "condition": slots["condition"],
            "duration_s": duration,
            "seed": seed,
        },
        steps=steps,
        expected_outputs=["paired runs (pre, post)", "per-metric deltas"],
        validation_checks=[
            "both runs share demand, seed, and duration",
            "patched network differs only at the target edge",
            "comparison reports signed percent change",
        ],
    )


def _plan_ev_adoption(intent: Intent) -> PlanProposal:
    slots = intent.slots
    duration = slots["duration_s"]
    seed = slots.get("seed", 42)
    ratios = list(slots["ev_ratios"])
    steps = [
        PlanStep("generate_network", _region_args(intent), "build the road network"),
        PlanStep(
            "generate_random_trips",
            {"condition": slots["condition"], "duration_s": duration, "seed": seed},
            "shared demand for the sweep",
        ),
        PlanStep("compute_routes", {"seed": seed}, "shared routes for the sweep"),
    ]
    for ratio in ratios:
        steps.append(
            PlanStep(
                "set_fleet_composition",
                {"ev_ratio": float(ratio), "seed": seed},
                f"assign {ratio:.0%} electric vehicles",
            )
        )
        steps.append(PlanStep("assemble_config", {"duration_s": duration, "seed": seed}))
        steps.append(PlanStep("run_simulation", {"label": f"ev_{int(round(ratio * 100))}"}))
    steps.append(
        PlanStep(
            "compare_runs",
            {"metrics": list(slots.get("metrics") or ["co2_abs_mg"])},
            "emissions across the sweep",
        )
    )
    return PlanProposal(
        inputs_summary={
            "spatial_scope": slots["spatial_scope"],
            "ev_ratios": ratios,
            "condition": slots["condition"],
            "duration_s": duration,
            "seed": seed,
        },
        steps=steps,
        expected_outputs=[f"one run per ratio in {ratios}", "emission comparison"],
        validation_checks=[
            "electric vehicle counts match the requested ratios exactly",
            "all runs share demand, seed, and duration",
        ],
    )


def _plan_event_management(intent: Intent) -> PlanProposal:
    slots = intent.slots
    duration = slots["duration_s"]
    seed = slots.get("seed", 42)
    split = slots["egress_split"]
    steps = [
        PlanStep("generate_network", _region_args(intent), "network covering all OD endpoints"),
        PlanStep(
            "generate_event_traffic",
            {
                "initial_fraction": float(split["initial_fraction"]),
                "initial_window_s": float(split["initial_window_s"]),
                "horizon_s": float(split["horizon_s"]),
                "seed": seed,
            },
            "two-phase egress demand from the OD table",
        ),
        PlanStep("compute_routes", {"seed": seed}, "route the event demand"),
        PlanStep("assemble_config", {"duration_s": duration, "seed": seed}, "post-event config"),
        PlanStep("run_simulation", {"label": "post_event"}, "congestion hotspot baseline"),
    ]
    for policy in slots["candidate_policies"]:
        steps.append(PlanStep(f"apply_{policy}", {}, f"candidate mitigation: {policy}"))
        steps.append(
            PlanStep(
                "assemble_config",
                {"duration_s": duration, "seed": seed, "use_signal_program": True},
            )
        )
        steps.append(PlanStep("run_simulation", {"label": policy}))
    steps.append(
        PlanStep(
            "compare_runs",
            {"metrics": list(slots.get("metrics") or ["density_veh_km"])},
            "candidates versus the post-event baseline",
        )
    )
    return PlanProposal(
        inputs_summary={
            "spatial_scope": slots["spatial_scope"],
            "od_table": slots["od_table"],
            "egress_split": split,
            "candidate_policies": list(slots["candidate_policies"]),
            "duration_s": duration,
            "seed": seed,
        },
        steps=steps,
        expected_outputs=["post-event baseline run", "one run per candidate policy", "density comparison"],
        validation_checks=[
            "departure split matches the declared egress profile exactly",
            "signal programs reference only existing signals",
            "comparison covers network-wide and venue-local density",
        ],
    )


_PLAN_BUILDERS = {
    "simple_simulation": _plan_simple,
    "policy_comparison": _plan_policy_comparison,
    "ev_adoption": _plan_ev_adoption,
    "event_management": _plan_event_management,
}
