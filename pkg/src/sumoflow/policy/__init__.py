from .event_traffic import generate_event_traffic
from .fleet import set_fleet_composition
from .network_edit import (
    PatchResult,
    adjust_speed,
    canonical_edge_diff,
    close_road,
    reduce_lanes,
)
from .signals import apply_green_wave, apply_webster
from .spec import AppliedPolicy, PolicySpec

__all__ = [
    "AppliedPolicy",
    "generate_event_traffic",
    "PatchResult",
    "PolicySpec",
    "adjust_speed",
    "apply_green_wave",
    "apply_webster",
    "canonical_edge_diff",
    "close_road",
    "reduce_lanes",
    "set_fleet_composition",
]
