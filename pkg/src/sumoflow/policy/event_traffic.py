"""Event egress demand: a venue OD table with a two-phase departure profile."""

from __future__ import annotations

from ..errors import EmptyDemandError, MixedModeError
from ..scenario.demand import DepartureSplit, ODPair, od_to_trips, split_counts
from ..toolserver.workspace import Artifact, Workspace


def generate_event_traffic(
    workspace: Workspace,
    od_table: list[ODPair],
    split: DepartureSplit,
    seed: int,
    coordinate_system: str = "lonlat",
) -> tuple[Artifact, int, int]:
    """Trips for a post-event surge; returns (artifact, initial, later) counts."""
    if not od_table:
        raise EmptyDemandError("event OD table is empty")
    for pair in od_table:
        if not pair.is_coordinate_mode:
            raise MixedModeError("event traffic needs coordinate-mode OD pairs")
    artifact = od_to_trips(workspace, od_table, split, seed, coordinate_system)
    initial = later = 0
    for pair in od_table:
        first, rest = split_counts(pair.vehicles, split)
        initial += first
        later += rest
    return artifact, initial, later
