"""Parameter sufficiency validation against per-family scenario schemas.

Every request maps to a scenario schema spanning five categories: spatial
scope, demand or OD data, policy interventions, experimental design, and
evaluation metrics. Required slots always carry a recommended default so
the agent can propose one instead of stalling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import UnknownTaskFamilyError

CATEGORIES = (
    "spatial_scope",
    "demand_or_od",
    "policy_interventions",
    "experimental_design",
    "evaluation_metrics",
)


@dataclass(frozen=True)
class Slot:
    name: str
    category: str
    semantic_type: str
    required: bool
    default: Any
    question: str
    assumption: str

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown slot category {self.category!r}")
        if self.required and self.default is None:
            raise ValueError(f"required slot {self.name!r} must carry a recommended default")
        if not self.question:
            raise ValueError(f"slot {self.name!r} needs a clarification question")


@dataclass(frozen=True)
class ScenarioSchema:
    task_family: str
    slots: tuple[Slot, ...]

    def slot(self, name: str) -> Slot:
        for slot in self.slots:
            if slot.name == name:
                return slot
        raise KeyError(name)


@dataclass(frozen=True)
class MissingParameter:
    slot: str
    question: str
    default: Any
    assumption: str


@dataclass
class Intent:
    """Structured interpretation of a user request."""

    task_family: str
    slots: dict[str, Any] = field(default_factory=dict)
    query: str = ""

    def merged_with_defaults(self, schema: ScenarioSchema) -> "Intent":
        filled = dict(self.slots)
        for slot in schema.slots:
            if slot.required and slot.name not in filled:
                filled[slot.name] = slot.default
        return Intent(task_family=self.task_family, slots=filled, query=self.query)


def _metrics_slot(default: list[str]) -> Slot:
    return Slot(
        name="metrics",
        category="evaluation_metrics",
        semantic_type="metric list",
        required=False,
        default=default,
        question="Which metrics should the report include?",
        assumption=f"standard metric set {default}",
    )


_DURATION = Slot(
    name="duration_s",
    category="experimental_design",
    semantic_type="seconds",
    required=True,
    default=3600,
    question="How long should the simulation run (seconds)?",
    assumption="one hour of simulated time",
)
_SEED = Slot(
    name="seed",
    category="experimental_design",
    semantic_type="integer",
    required=False,
    default=42,
    question="Which random seed should be used?",
    assumption="fixed seed 42 for reproducibility",
)

SCHEMAS: dict[str, ScenarioSchema] = {
    "simple_simulation": ScenarioSchema(
        "simple_simulation",
        (
            Slot(
                name="spatial_scope",
                category="spatial_scope",
                semantic_type="place + radius or bbox",
                required=True,
                default={"place": "Gangnam Station, Seoul", "radius_m": 2000},
                question="Which area should be simulated (place and radius)?",
                assumption="2 km radius around the named center",
            ),
            Slot(
                name="trip_type",
                category="demand_or_od",
                semantic_type="random | coordinate_od | zone_od",
                required=True,
                default="random",
                question="Should demand be random or from OD data?",
                assumption="random demand scaled to the network",
            ),
            Slot(
                name="condition",
                category="demand_or_od",
                semantic_type="light | medium | heavy",
                required=True,
                default="medium",
                question="Which traffic condition: light, medium, or heavy?",
                assumption="medium traffic",
            ),
            _DURATION,
            _SEED,
            _metrics_slot(["duration_s", "time_loss_s", "density_veh_km", "co2_abs_mg"]),
        ),
    ),
    "policy_comparison": ScenarioSchema(
        "policy_comparison",
        (
            Slot(
                name="spatial_scope",
                category="spatial_scope",
                semantic_type="place + radius or bbox",
                required=True,
                default={"place": "Gangnam Station, Seoul", "radius_m": 2000},
                question="Which area should be simulated (place and radius)?",
                assumption="2 km radius around the named center",
            ),
            Slot(
                name="target_edge",
                category="policy_interventions",
                semantic_type="edge id or street name",
                required=True,
                default="busiest",
                question="Which road segment is affected?",
                assumption="the busiest corridor edge in the network",
            ),
            Slot(
                name="lanes_closed",
                category="policy_interventions",
                semantic_type="count",
                required=True,
                default=1,
                question="How many lanes will be closed?",
                assumption="a single lane closed",
            ),
            Slot(
                name="condition",
                category="demand_or_od",
                semantic_type="light | medium | heavy",
                required=True,
                default="medium",
                question="Which traffic condition should the demand model use?",
                assumption="medium traffic",
            ),
            _DURATION,
            _SEED,
            _metrics_slot(["density_veh_km", "duration_s", "time_loss_s", "speed_m_s"]),
        ),
    ),
    "ev_adoption": ScenarioSchema(
        "ev_adoption",
        (
            Slot(
                name="spatial_scope",
                category="spatial_scope",
                semantic_type="place + radius or bbox",
                required=True,
                default={"place": "Gangnam Station, Seoul", "radius_m": 2000},
                question="Which area should be simulated (place and radius)?",
                assumption="2 km radius around the named center",
            ),
            Slot(
                name="ev_ratios",
                category="policy_interventions",
                semantic_type="fractions in [0, 1]",
                required=True,
                default=[0.0, 0.25, 0.5, 0.75, 1.0],
                question="Which electric-vehicle shares should be swept?",
                assumption="default increments 0%, 25%, 50%, 75%, 100%",
            ),
            Slot(
                name="condition",
                category="demand_or_od",
                semantic_type="light | medium | heavy",
                required=True,
                default="medium",
                question="Which traffic condition should the demand model use?",
                assumption="medium traffic",
            ),
            _DURATION,
            _SEED,
            _metrics_slot(["co2_abs_mg", "nox_abs_mg", "pmx_abs_mg", "electricity_abs_wh"]),
        ),
    ),
    "event_management": ScenarioSchema(
        "event_management",
        (
            Slot(
                name="spatial_scope",
                category="spatial_scope",
                semantic_type="bbox derived from OD coordinates",
                required=True,
                default={"derive_from_od": True, "margin_m": 500},
                question="Should the simulation area be derived from the OD coordinates?",
                assumption="bbox of all OD endpoints with a 500 m margin",
            ),
            Slot(
                name="od_table",
                category="demand_or_od",
                semantic_type="list of coordinate OD pairs with counts",
                required=True,
                default="event_default",
                question="Which origin-destination table should drive the event demand?",
                assumption="the venue egress table distributed with the session",
            ),
            Slot(
                name="egress_split",
                category="demand_or_od",
                semantic_type="{initial_fraction, initial_window_s, horizon_s}",
                required=True,
                default={"initial_fraction": 0.6, "initial_window_s": 1800, "horizon_s": 7200},
                question="What share of vehicles departs in the first window?",
                assumption="60% depart within the first 30 minutes",
            ),
            Slot(
                name="candidate_policies",
                category="policy_interventions",
                semantic_type="signal strategies to compare",
                required=True,
                default=["green_wave", "webster"],
                question="Which mitigation strategies should be compared?",
                assumption="green-wave coordination versus cycle adaptation",
            ),
            _DURATION,
            _SEED,
            _metrics_slot(["density_veh_km", "time_loss_s", "speed_m_s"]),
        ),
    ),
}


def schema_for(task_family: str) -> ScenarioSchema:
    try:
        return SCHEMAS[task_family]
    except KeyError:
        raise UnknownTaskFamilyError(f"no scenario schema for task family {task_family!r}") from None


def check_sufficiency(intent: Intent, schema: ScenarioSchema | None = None) -> list[MissingParameter]:
    """Empty list iff every required slot is filled."""
    schema = schema or schema_for(intent.task_family)
    missing = []
    for slot in schema.slots:
        if slot.required and intent.slots.get(slot.name) in (None, ""):
            missing.append(
                MissingParameter(
                    slot=slot.name,
                    question=slot.question,
                    default=slot.default,
                    assumption=slot.assumption,
                )
            )
    return missing
