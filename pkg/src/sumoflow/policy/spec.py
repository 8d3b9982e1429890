"""Policy intervention descriptors and lineage records."""

from __future__ import annotations

from dataclasses import dataclass, field

POLICY_KINDS = (
    "green_wave",
    "webster",
    "road_closure",
    "lane_reduction",
    "speed_adjust",
    "fleet_composition",
    "vehicle_generation",
)


@dataclass(frozen=True)
class PolicySpec:
    kind: str
    target_edges: tuple[str, ...] = ()
    lanes_removed: int | None = None
    new_speed_m_s: float | None = None
    ev_ratio: float | None = None
    flow: dict | None = None  # {veh_per_hour, begin_s, end_s}

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "lane_reduction" and (self.lanes_removed is None or self.lanes_removed < 1):
            raise ValueError("lane_reduction requires lanes_removed >= 1")
        if self.kind == "road_closure" and not self.target_edges:
            raise ValueError("road_closure requires target edges")
        if self.kind == "speed_adjust" and self.new_speed_m_s is None:
            raise ValueError("speed_adjust requires new_speed_m_s")
        if self.kind == "fleet_composition":
            if self.ev_ratio is None or not 0 <= self.ev_ratio <= 1:
                raise ValueError("fleet_composition requires ev_ratio in [0, 1]")


@dataclass(frozen=True)
class AppliedPolicy:
    """Links a policy output back to the exact network it patched."""

    spec: PolicySpec
    produced_artifact: str
    parent_network_hash: str
    warnings: tuple[str, ...] = field(default=())
