"""Trip demand generation: random, coordinate-OD, and zone-OD modes.

Coordinate OD pairs carry (lon, lat) endpoints; map-matching is delegated to
the router, so trip files emit the raw coordinates. The two-phase departure
split puts round-half-up(vehicles * initial_fraction) departures uniformly in
the initial window and the remainder uniformly in the rest of the horizon.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import quoteattr

from ..errors import (
    ChainFailureError,
    EmptyDemandError,
    EmptyNetworkError,
    GenerationFailureError,
    MixedModeError,
    UnknownZoneError,
)
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint, hash_file

# veh/h per lane-km; ordered light < medium < heavy, ratios calibrated against
# observed city-scale volumes (heavy/light around 4.3)
DEFAULT_RATE_COEFFICIENTS = {"light": 8.0, "medium": 21.0, "heavy": 34.0}


@dataclass(frozen=True)
class TrafficCondition:
    level: str
    rate_coefficient: float

    def __post_init__(self) -> None:
        if self.level not in DEFAULT_RATE_COEFFICIENTS:
            raise ValueError(f"unknown traffic condition {self.level!r}")
        if self.rate_coefficient <= 0:
            raise ValueError("rate coefficient must be positive")

    @classmethod
    def named(cls, level: str) -> "TrafficCondition":
        return cls(level=level, rate_coefficient=DEFAULT_RATE_COEFFICIENTS[level])


@dataclass(frozen=True)
class ODPair:
    """Demand between an origin and a destination, in coordinates or zone ids."""

    origin: tuple[float, float] | str  # (lon, lat) or zone id
    destination: tuple[float, float] | str
    vehicles: int
    label: str | None = None

    def __post_init__(self) -> None:
        if self.vehicles < 0:
            raise ValueError("vehicle count must be >= 0")
        if isinstance(self.origin, str) != isinstance(self.destination, str):
            raise MixedModeError("origin and destination must share a mode")

    @property
    def is_coordinate_mode(self) -> bool:
        return not isinstance(self.origin, str)


@dataclass(frozen=True)
class DepartureSplit:
    initial_fraction: float
    initial_window_s: float
    horizon_s: float

    def __post_init__(self) -> None:
        if not 0 <= self.initial_fraction <= 1:
            raise ValueError("initial_fraction must lie in [0, 1]")
        if self.initial_window_s < 0 or self.horizon_s < 0:
            raise ValueError("windows must be non-negative")
        if self.initial_window_s > self.horizon_s:
            raise ValueError("initial window must not exceed the horizon")


@dataclass
class DemandSpec:
    mode: str  # random | coordinate_od | zone_od
    duration_s: float
    seed: int
    condition: TrafficCondition | None = None
    od_pairs: list[ODPair] = field(default_factory=list)
    split: DepartureSplit | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("random", "coordinate_od", "zone_od"):
            raise ValueError(f"unknown demand mode {self.mode!r}")
        if self.mode == "random" and self.condition is None:
            raise ValueError("random mode requires a traffic condition")
        if self.mode in ("coordinate_od", "zone_od") and not self.od_pairs:
            raise EmptyDemandError(f"{self.mode} requires at least one OD pair")


def round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def split_counts(vehicles: int, split: DepartureSplit) -> tuple[int, int]:
    """(initial, later) counts; initial = round-half-up(n * fraction)."""
    initial = min(vehicles, round_half_up(vehicles * split.initial_fraction))
    return initial, vehicles - initial


def scale_demand(total_lane_km: float, condition: TrafficCondition) -> int:
    """Vehicles per hour proportional to network size."""
    if total_lane_km <= 0:
        raise EmptyNetworkError("network has zero lane kilometers")
    return round(condition.rate_coefficient * total_lane_km)


def _departure_times(count_initial: int, count_later: int, split: DepartureSplit, rng: random.Random) -> list[float]:
    times = [rng.uniform(0.0, split.initial_window_s) for _ in range(count_initial)]
    times += [
        rng.uniform(split.initial_window_s, split.horizon_s) for _ in range(count_later)
    ]
    return times


def od_to_trips(
    workspace: Workspace,
    pairs: list[ODPair],
    split: DepartureSplit,
    seed: int,
    coordinate_system: str = "lonlat",
) -> Artifact:
    """Write a trip file carrying raw OD coordinates and split departures.

    coordinate_system selects the trip attributes: "lonlat" emits
    fromLonLat/toLonLat for geo-referenced networks, "xy" emits fromXY/toXY
    in network coordinates (useful on synthetic grids).
    """
    if not pairs:
        raise EmptyDemandError("OD table is empty")
    if coordinate_system not in ("lonlat", "xy"):
        raise ValueError(f"unknown coordinate system {coordinate_system!r}")
    for pair in pairs:
        if not pair.is_coordinate_mode:
            raise MixedModeError("od_to_trips needs coordinate-mode pairs")

    rng = random.Random(seed)
    entries: list[tuple[float, str, ODPair]] = []
    for index, pair in enumerate(pairs):
        initial, later = split_counts(pair.vehicles, split)
        for veh_index, depart in enumerate(_departure_times(initial, later, split, rng)):
            entries.append((depart, f"od{index}.{veh_index}", pair))
    entries.sort(key=lambda e: (e[0], e[1]))

    from_attr = "fromLonLat" if coordinate_system == "lonlat" else "fromXY"
    to_attr = "toLonLat" if coordinate_system == "lonlat" else "toXY"
    lines = ["<routes>"]
    for depart, trip_id, pair in entries:
        o = f"{pair.origin[0]:.6f},{pair.origin[1]:.6f}"
        d = f"{pair.destination[0]:.6f},{pair.destination[1]:.6f}"
        lines.append(
            f'    <trip id={quoteattr(trip_id)} depart="{depart:.2f}" '
            f'{from_attr}="{o}" {to_attr}="{d}"/>'
        )
    lines.append("</routes>")

    path = workspace.allocate("trips")
    fp = fingerprint(
        {
            "op": "od_to_trips",
            "pairs": [
                (p.origin, p.destination, p.vehicles, p.label) for p in pairs
            ],
            "split": (split.initial_fraction, split.initial_window_s, split.horizon_s),
            "seed": seed,
            "coords": coordinate_system,
        }
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return workspace.register("trips", path, fp)


def gen_random_trips(
    runner: SubprocessRunner,
    workspace: Workspace,
    network: Artifact,
    condition: TrafficCondition,
    duration_s: float,
    seed: int,
    total_lane_km: float,
) -> Artifact:
    """Random demand via the SUMO trip generator, scaled to network size."""
    vehicles_per_hour = scale_demand(total_lane_km, condition)
    period = 3600.0 / vehicles_per_hour
    fp = fingerprint(
        {
            "op": "gen_random_trips",
            "network": network.content_hash,
            "condition": condition.level,
            "rate": condition.rate_coefficient,
            "duration": duration_s,
            "seed": seed,
        }
    )
    reusable = workspace.find_reusable("trips", fp)
    if reusable is not None:
        return reusable

    out = workspace.allocate("trips")
    if duration_s <= 0:
        out.write_text("<routes>\n</routes>\n", encoding="utf-8")
        return workspace.register("trips", out, fp)
    result = runner.run(
        SubprocessSpec(
            program="randomTrips.py",
            argv=[
                "-n", str(network.path),
                "-o", str(out),
                "-b", "0",
                "-e", str(duration_s),
                "--period", f"{period:.6f}",
                "--seed", str(seed),
                "--validate",
            ],
            workspace=workspace,
            expected_artifacts=[("trips", out)],
            input_fingerprint=fp,
        )
    )
    if result.exit_code != 0:
        raise GenerationFailureError(f"random trip generation failed:\n{result.stderr}")
    return result.produced_artifacts[0]


def _od_matrix_text(pairs: list[ODPair], duration_s: float) -> str:
    """OD matrix in the O-format (origin/destination/count per line)."""
    # O-format time stamps are HH.MM, not decimal hours
    end_h, end_m = int(duration_s // 3600), int(duration_s % 3600 // 60)
    lines = [
        "$OR;D2",
        "* From-Time  To-Time",
        f"0.00 {end_h}.{end_m:02d}",
        "* Factor",
        "1.00",
    ]
    for pair in pairs:
        lines.append(f"{pair.origin:>14} {pair.destination:>14} {pair.vehicles}")
    return "\n".join(lines) + "\n"


def zone_od_to_trips(
    runner: SubprocessRunner,
    workspace: Workspace,
    network: Artifact,
    pairs: list[ODPair],
    shapefile_prefix: Path,
    duration_s: float,
    seed: int,
) -> Artifact:
    """Zone-based demand: polyconvert -> edgesInDistricts -> od2trips."""
    if not pairs:
        raise EmptyDemandError("OD matrix is empty")
    for pair in pairs:
        if pair.is_coordinate_mode:
            raise MixedModeError("zone_od_to_trips needs zone-id pairs")

    shape_hashes = [
        hash_file(p)
        for p in sorted(shapefile_prefix.parent.glob(shapefile_prefix.name + ".*"))
        if p.suffix in (".shp", ".shx", ".dbf", ".prj")
    ]
    chain_fp = fingerprint(
        {
            "op": "zone_od_to_trips",
            "network": network.content_hash,
            "shapes": shape_hashes,
            "pairs": [(p.origin, p.destination, p.vehicles) for p in pairs],
            "duration": duration_s,
            "seed": seed,
        }
    )
    reusable = workspace.find_reusable("trips", chain_fp)
    if reusable is not None:
        return reusable

    zones_out = workspace.allocate("zones")
    result = runner.run(
        SubprocessSpec(
            program="polyconvert",
            argv=[
                "-n", str(network.path),
                "--shapefile-prefixes", str(shapefile_prefix),
                "--shapefile.id-column", "id",
                "--shapefile.fill", "true",
                "-o", str(zones_out),
            ],
            workspace=workspace,
            expected_artifacts=[("zones", zones_out)],
        )
    )
    if result.exit_code != 0:
        raise ChainFailureError("polyconvert", result.stderr)

    known_zones = _poly_ids(zones_out)
    for pair in pairs:
        for zone in (pair.origin, pair.destination):
            if zone not in known_zones:
                raise UnknownZoneError(f"zone {zone!r} not present in the zone polygons")

    taz_out = workspace.allocate("districts")
    result = runner.run(
        SubprocessSpec(
            program="edgesInDistricts.py",
            argv=[
                "-n", str(network.path),
                "-t", str(zones_out),
                "-o", str(taz_out),
            ],
            workspace=workspace,
            expected_artifacts=[("districts", taz_out)],
        )
    )
    if result.exit_code != 0:
        raise ChainFailureError("edgesInDistricts", result.stderr)

    matrix_path = workspace.allocate("od_matrix")
    matrix_path.write_text(_od_matrix_text(pairs, duration_s), encoding="utf-8")
    workspace.register("od_matrix", matrix_path)

    trips_out = workspace.allocate("trips")
    total = sum(p.vehicles for p in pairs)
    if total == 0:
        trips_out.write_text("<routes>\n</routes>\n", encoding="utf-8")
        return workspace.register("trips", trips_out, chain_fp)
    result = runner.run(
        SubprocessSpec(
            program="od2trips",
            argv=[
                "-n", str(taz_out),
                "-d", str(matrix_path),
                "-o", str(trips_out),
                "--seed", str(seed),
            ],
            workspace=workspace,
            expected_artifacts=[("trips", trips_out)],
            input_fingerprint=chain_fp,
        )
    )
    if result.exit_code != 0:
        raise ChainFailureError("od2trips", result.stderr)
    return result.produced_artifacts[0]


def _poly_ids(path: Path) -> set[str]:
    import xml.etree.ElementTree as ET

    root = ET.parse(path).getroot()
    return {p.get("id") for p in root.iter("poly")}
