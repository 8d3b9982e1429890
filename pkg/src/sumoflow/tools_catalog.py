"""The default tool catalog: every workflow operation published over MCP.

Handlers close over a per-session ToolContext (workspace, runner, result
store, geocoder). Artifact references in results use paths relative to the
session workspace so transcripts and UI payloads are machine-independent.

build_registry(ctx, dry_run=True) swaps the handlers for deterministic
stubs with identical descriptors; the planner's golden-transcript tests and
plan previews run on those.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .analysis.metrics import DEFAULT_PLAN, MetricsSummary, aggregate, spatial_filter
from .analysis.parsers import parse_edgedata, parse_tripinfo
from .analysis.plots import plot_edge_metric
from .analysis.simulate import run_simulation as run_sim
from .analysis.store import ResultStore, RunRecord
from .errors import ArtifactNotFoundError, SumoflowError
from .mcp.messages import ToolDescriptor, ToolResult
from .policy.event_traffic import generate_event_traffic
from .policy.fleet import set_fleet_composition
from .policy.network_edit import adjust_speed, close_road, reduce_lanes
from .policy.signals import apply_green_wave, apply_webster
from .scenario.config import assemble_config
from .scenario.demand import DepartureSplit, ODPair, TrafficCondition, gen_random_trips, od_to_trips, zone_od_to_trips
from .scenario.geo import BoundingBox, RegionSpec, compute_bbox_from_od
from .scenario.geocode import Geocoder
from .scenario.network import (
    build_grid_network,
    build_network,
    edge_midpoints,
    fetch_osm,
    network_stats,
)
from .scenario.routing import route
from .toolserver.registry import ToolRegistry
from .toolserver.runner import SubprocessRunner
from .toolserver.workspace import Artifact, Workspace


@dataclass
class ToolContext:
    workspace: Workspace
    runner: SubprocessRunner
    store: ResultStore
    geocoder: Geocoder = field(default_factory=Geocoder)
    osm_fixture: Path | None = None
    session_id: str = "default"


def _rel(ctx: ToolContext, artifact: Artifact) -> str:
    try:
        return str(artifact.path.relative_to(ctx.workspace.root))
    except ValueError:
        return str(artifact.path)


def _artifact_result(ctx: ToolContext, artifact: Artifact, text: str) -> ToolResult:
    result = ToolResult.text(text)
    result.add_artifact(artifact.role, _rel(ctx, artifact), artifact.content_hash)
    return result


def _od_pairs(raw_pairs: list[dict]) -> list[ODPair]:
    pairs = []
    for entry in raw_pairs:
        origin = entry["origin"]
        destination = entry["destination"]
        pairs.append(
            ODPair(
                origin=tuple(origin) if isinstance(origin, list) else origin,
                destination=tuple(destination) if isinstance(destination, list) else destination,
                vehicles=int(entry["vehicles"]),
                label=entry.get("label"),
            )
        )
    return pairs


# -- handler implementations ---------------------------------------------------------


def _make_handlers(ctx: ToolContext) -> dict:
    def geocode_place(place: str) -> ToolResult:
        lat, lon = ctx.geocoder.geocode(place)
        result = ToolResult.text(f"{place} resolves to lat={lat:.4f}, lon={lon:.4f}")
        result.add_value({"lat": lat, "lon": lon})
        return result

    def generate_network(
        place: str | None = None,
        lat: float | None = None,
        lon: float | None = None,
        radius_m: float = 2000.0,
        bbox: list[float] | None = None,
        network_type: str = "osm",
        grid_number: int = 5,
        derive_from_od: bool = False,
        margin_m: float = 500.0,
    ) -> ToolResult:
        if network_type == "grid":
            artifact = build_grid_network(ctx.runner, ctx.workspace, grid_number=grid_number)
        else:
            region = _resolve_region(place, lat, lon, radius_m, bbox, derive_from_od, margin_m)
            extract = fetch_osm(ctx.runner, ctx.workspace, region, fixture=ctx.osm_fixture)
            artifact = build_network(ctx.runner, ctx.workspace, extract)
        stats = network_stats(artifact.path)
        return _artifact_result(
            ctx,
            artifact,
            f"network ready: {stats.edge_count} edges, {stats.total_lane_km:.2f} lane-km, "
            f"{stats.signal_count} signals",
        )

    def _resolve_region(place, lat, lon, radius_m, bbox, derive_from_od, margin_m) -> RegionSpec:
        if bbox is not None:
            return RegionSpec(bbox=BoundingBox(*bbox))
        if derive_from_od:
            trips = ctx.workspace.try_resolve("od_pairs_json")
            if trips is None:
                raise ArtifactNotFoundError(
                    "derive_from_od requested but no OD table is registered in this session"
                )
            raw = json.loads(Path(trips.path).read_text())
            return RegionSpec(bbox=compute_bbox_from_od(_od_pairs(raw), margin_m))
        if place is not None:
            lat, lon = ctx.geocoder.geocode(place)
        if lat is None or lon is None:
            raise SumoflowError("generate_network needs place, lat/lon, or bbox")
        return RegionSpec(center=(lat, lon), radius_m=radius_m)

    def generate_random_trips(
        condition: str, duration_s: float, seed: int = 42, rate_coefficient: float | None = None
    ) -> ToolResult:
        network = ctx.workspace.resolve("network")
        stats = network_stats(network.path)
        traffic = (
            TrafficCondition(level=condition, rate_coefficient=rate_coefficient)
            if rate_coefficient is not None
            else TrafficCondition.named(condition)
        )
        artifact = gen_random_trips(
            ctx.runner,
            ctx.workspace,
            network,
            traffic,
            duration_s,
            seed,
            stats.total_lane_km,
        )
        count = _count_trips(artifact.path)
        return _artifact_result(
            ctx, artifact, f"{count} random trips over {duration_s:.0f}s ({condition} demand)"
        )

    def generate_od_trips(
        od_pairs: list[dict],
        initial_fraction: float = 0.6,
        initial_window_s: float = 1800.0,
        horizon_s: float = 7200.0,
        seed: int = 42,
        coordinate_system: str = "lonlat",
    ) -> ToolResult:
        pairs = _od_pairs(od_pairs)
        split = DepartureSplit(initial_fraction, initial_window_s, horizon_s)
        artifact = od_to_trips(ctx.workspace, pairs, split, seed, coordinate_system)
        total = sum(p.vehicles for p in pairs)
        return _artifact_result(ctx, artifact, f"{total} OD trips written with two-phase departures")

    def generate_event_traffic_tool(
        od_pairs: list[dict],
        initial_fraction: float = 0.6,
        initial_window_s: float = 1800.0,
        horizon_s: float = 7200.0,
        seed: int = 42,
        coordinate_system: str = "lonlat",
    ) -> ToolResult:
        pairs = _od_pairs(od_pairs)
        split = DepartureSplit(initial_fraction, initial_window_s, horizon_s)
        artifact, initial, later = generate_event_traffic(
            ctx.workspace, pairs, split, seed, coordinate_system
        )
        result = _artifact_result(
            ctx,
            artifact,
            f"event demand: {initial + later} vehicles, {initial} in the first "
            f"{initial_window_s:.0f}s and {later} after",
        )
        result.add_value({"total": initial + later, "initial": initial, "later": later})
        return result

    def generate_zone_od_trips(
        matrix: list[dict], shapefile: str, duration_s: float = 3600.0, seed: int = 42
    ) -> ToolResult:
        network = ctx.workspace.resolve("network")
        pairs = [
            ODPair(origin=m["from_zone"], destination=m["to_zone"], vehicles=int(m["vehicles"]))
            for m in matrix
        ]
        prefix = Path(shapefile)
        if not prefix.is_absolute():
            prefix = ctx.workspace.root / shapefile
        artifact = zone_od_to_trips(
            ctx.runner, ctx.workspace, network, pairs, prefix, duration_s, seed
        )
        count = _count_trips(artifact.path)
        return _artifact_result(ctx, artifact, f"{count} trips from the zone OD matrix")

    def compute_routes(seed: int = 42) -> ToolResult:
        network = ctx.workspace.resolve("network")
        trips = ctx.workspace.resolve("trips")
        artifact, unrouted = route(ctx.runner, ctx.workspace, network, trips, seed)
        routed = _count_vehicles(artifact.path)
        text = f"routed {routed} vehicles"
        if unrouted:
            text += f" ({unrouted} unroutable, below threshold)"
        result = _artifact_result(ctx, artifact, text)
        result.add_value({"routed": routed, "unrouted": unrouted})
        return result

    def assemble_config_tool(
        duration_s: float,
        seed: int = 42,
        use_signal_program: bool = False,
        edgedata_period_s: float | None = None,
    ) -> ToolResult:
        network = ctx.workspace.resolve("network")
        routes = ctx.workspace.resolve("routes")
        extra = []
        if use_signal_program:
            extra.append(ctx.workspace.resolve("signal_program"))
        artifact = assemble_config(
            ctx.workspace, network, routes, duration_s, seed, extra, edgedata_period_s
        )
        return _artifact_result(
            ctx, artifact, f"config assembled for {duration_s:.0f}s (seed {seed})"
        )

    def run_simulation(label: str = "run") -> ToolResult:
        config = ctx.workspace.resolve("config")
        outputs = run_sim(ctx.runner, ctx.workspace, config)
        network = ctx.workspace.resolve("network")
        trip_records = parse_tripinfo(outputs.tripinfo.path)
        edge_records = parse_edgedata(outputs.edgedata.path, edge_midpoints(network.path))
        summary = _merged_summary(trip_records, edge_records)
        run_id = ctx.store.next_run_id(ctx.session_id)
        summary.run_id = run_id
        ctx.store.persist_run(
            RunRecord(
                run_id=run_id,
                session_id=ctx.session_id,
                config_hash=config.content_hash,
                scenario_label=label,
                output_hashes=outputs.hashes(),
            ),
            metrics=summary,
            trip_records=trip_records,
            edge_records=edge_records,
        )
        result = ToolResult.text(
            f"simulation {run_id} ({label}) finished: {len(trip_records)} trips"
        )
        for artifact in (outputs.tripinfo, outputs.edgedata, outputs.summary):
            result.add_artifact(artifact.role, _rel(ctx, artifact), artifact.content_hash)
        result.add_value({"run_id": run_id, "label": label, "metrics": summary.to_document()["metrics"]})
        return result

    def analyze_results(
        center_x: float | None = None,
        center_y: float | None = None,
        radius_m: float | None = None,
    ) -> ToolResult:
        tripinfo = ctx.workspace.resolve("tripinfo")
        edgedata = ctx.workspace.resolve("edgedata")
        network = ctx.workspace.resolve("network")
        trip_records = parse_tripinfo(tripinfo.path)
        edge_records = parse_edgedata(edgedata.path, edge_midpoints(network.path))
        scope = "network-wide"
        if center_x is not None and center_y is not None and radius_m is not None:
            edge_records = spatial_filter(edge_records, (center_x, center_y), radius_m)
            scope = f"within {radius_m:.0f} m of ({center_x:.0f}, {center_y:.0f})"
        summary = _merged_summary(trip_records, edge_records)
        result = ToolResult.text(f"metrics aggregated ({scope})")
        result.add_value({"metrics": summary.to_document()["metrics"], "scope": scope})
        return result

    def compare_runs(
        metrics: list[str],
        run_a: str | None = None,
        run_b: str | None = None,
        stat: str = "mean",
    ) -> ToolResult:
        if run_a is None or run_b is None:
            labels = ctx.store.all_runs(ctx.session_id)
            if len(labels) < 2:
                raise SumoflowError("need two stored runs to compare")
            run_a = run_a or labels[-2]
            run_b = run_b or labels[-1]
        entries = ctx.store.compare_runs(run_a, run_b, metrics, stat)
        lines = []
        payload = []
        for entry in entries:
            percent = "undefined (baseline 0)" if entry.division_guard else f"{entry.percent_change:+.1f}%"
            lines.append(f"{entry.metric}: {entry.a:.4g} -> {entry.b:.4g} ({percent})")
            payload.append(
                {
                    "metric": entry.metric,
                    "a": entry.a,
                    "b": entry.b,
                    "delta": entry.delta,
                    "percent_change": entry.percent_change,
                    "division_guard": entry.division_guard,
                }
            )
        result = ToolResult.text(f"comparison {run_a} vs {run_b}:\n" + "\n".join(lines))
        result.add_value({"comparison": payload, "run_a": run_a, "run_b": run_b})
        return result

    def apply_green_wave_tool() -> ToolResult:
        network = ctx.workspace.resolve("network")
        routes = ctx.workspace.resolve("routes")
        artifact = apply_green_wave(ctx.runner, ctx.workspace, network, routes)
        result = _artifact_result(ctx, artifact, "green-wave offsets computed")
        result.add_value(
            {"applied_policy": {"kind": "green_wave", "parent_network_hash": network.content_hash}}
        )
        return result

    def apply_webster_tool() -> ToolResult:
        network = ctx.workspace.resolve("network")
        routes = ctx.workspace.resolve("routes")
        artifact = apply_webster(ctx.runner, ctx.workspace, network, routes)
        result = _artifact_result(ctx, artifact, "cycle lengths and splits adapted")
        result.add_value(
            {"applied_policy": {"kind": "webster", "parent_network_hash": network.content_hash}}
        )
        return result

    def close_road_tool(edges: list[str]) -> ToolResult:
        network = ctx.workspace.resolve("network")
        patch = close_road(ctx.workspace, network, edges)
        text = f"closed {len(edges)} edge(s): {', '.join(edges)}"
        if patch.warnings:
            text += "\nwarning: " + "; ".join(patch.warnings)
        result = _artifact_result(ctx, patch.artifact, text)
        result.add_value(
            {
                "applied_policy": {
                    "kind": "road_closure",
                    "edges": list(edges),
                    "parent_network_hash": network.content_hash,
                },
                "warnings": patch.warnings,
            }
        )
        return result

    def reduce_lanes_tool(edge: str, lanes_removed: int) -> ToolResult:
        network = ctx.workspace.resolve("network")
        patch = reduce_lanes(ctx.runner, ctx.workspace, network, edge, lanes_removed)
        result = _artifact_result(
            ctx, patch.artifact, f"removed {lanes_removed} lane(s) from {edge}"
        )
        result.add_value(
            {
                "applied_policy": {
                    "kind": "lane_reduction",
                    "edge": edge,
                    "lanes_removed": lanes_removed,
                    "parent_network_hash": network.content_hash,
                }
            }
        )
        return result

    def adjust_speed_tool(edge: str, new_speed_m_s: float) -> ToolResult:
        network = ctx.workspace.resolve("network")
        patch = adjust_speed(ctx.workspace, network, edge, new_speed_m_s)
        result = _artifact_result(
            ctx, patch.artifact, f"speed on {edge} set to {new_speed_m_s:.2f} m/s"
        )
        result.add_value(
            {
                "applied_policy": {
                    "kind": "speed_adjust",
                    "edge": edge,
                    "new_speed_m_s": new_speed_m_s,
                    "parent_network_hash": network.content_hash,
                }
            }
        )
        return result

    def set_fleet_composition_tool(ev_ratio: float, seed: int = 42) -> ToolResult:
        routes = ctx.workspace.resolve("routes")
        artifact, electric = set_fleet_composition(ctx.workspace, routes, ev_ratio, seed)
        result = _artifact_result(
            ctx, artifact, f"fleet composition set: {electric} electric vehicles ({ev_ratio:.0%})"
        )
        result.add_value(
            {
                "applied_policy": {
                    "kind": "fleet_composition",
                    "ev_ratio": ev_ratio,
                    "electric_count": electric,
                    "parent_routes_hash": routes.content_hash,
                }
            }
        )
        return result

    def plot_density(metric: str = "density") -> ToolResult:
        network = ctx.workspace.resolve("network")
        edgedata = ctx.workspace.resolve("edgedata")
        artifact = plot_edge_metric(ctx.runner, ctx.workspace, network, edgedata, metric)
        return _artifact_result(ctx, artifact, f"{metric} heatmap rendered")

    return {
        "geocode_place": geocode_place,
        "generate_network": generate_network,
        "generate_random_trips": generate_random_trips,
        "generate_od_trips": generate_od_trips,
        "generate_event_traffic": generate_event_traffic_tool,
        "generate_zone_od_trips": generate_zone_od_trips,
        "compute_routes": compute_routes,
        "assemble_config": assemble_config_tool,
        "run_simulation": run_simulation,
        "analyze_results": analyze_results,
        "compare_runs": compare_runs,
        "apply_green_wave": apply_green_wave_tool,
        "apply_webster": apply_webster_tool,
        "close_road": close_road_tool,
        "reduce_lanes": reduce_lanes_tool,
        "adjust_speed": adjust_speed_tool,
        "set_fleet_composition": set_fleet_composition_tool,
        "plot_density": plot_density,
    }


def _count_trips(path: Path) -> int:
    import xml.etree.ElementTree as ET

    root = ET.parse(path).getroot()
    return sum(1 for tag in ("trip", "vehicle") for _ in root.iter(tag))


def _count_vehicles(path: Path) -> int:
    import xml.etree.ElementTree as ET

    root = ET.parse(path).getroot()
    return sum(1 for _ in root.iter("vehicle"))


def _merged_summary(trip_records, edge_records) -> MetricsSummary:
    merged = MetricsSummary(run_id=None)
    if trip_records:
        trips = aggregate(trip_records, DEFAULT_PLAN)
        merged.metrics.update(trips.metrics)
        merged.labels.update(trips.labels)
        merged.plan.update(trips.plan)
    if edge_records:
        edges = aggregate(edge_records, DEFAULT_PLAN)
        merged.metrics.update(edges.metrics)
        merged.labels.update(edges.labels)
        merged.plan.update(edges.plan)
    return merged


# -- descriptors ------------------------------------------------------------------------


def _obj(properties: dict, required: list[str] | None = None) -> dict:
    schema: dict = {"type": "object", "properties": properties, "additionalProperties": False}
    if required:
        schema["required"] = required
    return schema


_OD_PAIRS_SCHEMA = {
    "type": "array",
    "minItems": 1,
    "items": _obj(
        {
            "origin": {"type": ["array", "string"], "items": {"type": "number"}},
            "destination": {"type": ["array", "string"], "items": {"type": "number"}},
            "vehicles": {"type": "integer", "minimum": 0},
            "label": {"type": ["string", "null"]},
        },
        ["origin", "destination", "vehicles"],
    ),
}

_SPLIT_PROPS = {
    "initial_fraction": {"type": "number", "minimum": 0, "maximum": 1},
    "initial_window_s": {"type": "number", "minimum": 0},
    "horizon_s": {"type": "number", "minimum": 0},
    "seed": {"type": "integer"},
    "coordinate_system": {"type": "string", "enum": ["lonlat", "xy"]},
}

TOOL_SCHEMAS: dict[str, tuple[str, dict, bool]] = {
    # name: (description, input schema, side_effecting)
    "geocode_place": (
        "Resolve a free-text place name to latitude/longitude coordinates. "
        "Use before network generation when the user names a location.",
        _obj({"place": {"type": "string", "minLength": 1}}, ["place"]),
        False,
    ),
    "generate_network": (
        "Build the simulation road network. Provide a place name (geocoded) or "
        "lat/lon with radius_m, or an explicit bbox [min_lon, min_lat, max_lon, "
        "max_lat]; network_type 'grid' creates a synthetic signalized grid instead.",
        _obj(
            {
                "place": {"type": "string"},
                "lat": {"type": "number"},
                "lon": {"type": "number"},
                "radius_m": {"type": "number", "minimum": 0},
                "bbox": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
                "network_type": {"type": "string", "enum": ["osm", "grid"]},
                "grid_number": {"type": "integer", "minimum": 2, "maximum": 20},
                "derive_from_od": {"type": "boolean"},
                "margin_m": {"type": "number", "minimum": 0},
            }
        ),
        True,
    ),
    "generate_random_trips": (
        "Generate random trip demand scaled to the network size for a named "
        "traffic condition (light, medium, heavy) over a duration in seconds; "
        "rate_coefficient (veh/h per lane-km) overrides the condition default.",
        _obj(
            {
                "condition": {"type": "string", "enum": ["light", "medium", "heavy"]},
                "duration_s": {"type": "number", "minimum": 0},
                "seed": {"type": "integer"},
                "rate_coefficient": {"type": "number", "exclusiveMinimum": 0},
            },
            ["condition", "duration_s"],
        ),
        True,
    ),
    "generate_od_trips": (
        "Convert coordinate origin-destination pairs into a trip file with a "
        "two-phase departure split (initial_fraction in the first window).",
        _obj({"od_pairs": _OD_PAIRS_SCHEMA, **_SPLIT_PROPS}, ["od_pairs"]),
        True,
    ),
    "generate_event_traffic": (
        "Generate post-event egress demand from a venue OD table with a "
        "two-phase departure profile; reports initial/later counts.",
        _obj({"od_pairs": _OD_PAIRS_SCHEMA, **_SPLIT_PROPS}, ["od_pairs"]),
        True,
    ),
    "generate_zone_od_trips": (
        "Convert a zone-based OD matrix plus a zone polygon shapefile into "
        "trips (polygon import, district assignment, matrix conversion).",
        _obj(
            {
                "matrix": {
                    "type": "array",
                    "minItems": 1,
                    "items": _obj(
                        {
                            "from_zone": {"type": "string"},
                            "to_zone": {"type": "string"},
                            "vehicles": {"type": "integer", "minimum": 0},
                        },
                        ["from_zone", "to_zone", "vehicles"],
                    ),
                },
                "shapefile": {"type": "string"},
                "duration_s": {"type": "number", "minimum": 0},
                "seed": {"type": "integer"},
            },
            ["matrix", "shapefile"],
        ),
        True,
    ),
    "compute_routes": (
        "Route the current trip demand over the current network with the "
        "shortest-path router; reports unroutable trips.",
        _obj({"seed": {"type": "integer"}}),
        True,
    ),
    "assemble_config": (
        "Assemble the simulation configuration from the current network and "
        "routes, requesting trip, edge, and summary outputs. Set "
        "use_signal_program to include the latest signal-program artifact.",
        _obj(
            {
                "duration_s": {"type": "number", "minimum": 1},
                "seed": {"type": "integer"},
                "use_signal_program": {"type": "boolean"},
                "edgedata_period_s": {"type": ["number", "null"], "minimum": 1},
            },
            ["duration_s"],
        ),
        True,
    ),
    "run_simulation": (
        "Execute the assembled configuration, parse the outputs, persist the "
        "run under a scenario label, and return its metrics.",
        _obj({"label": {"type": "string"}}),
        True,
    ),
    "analyze_results": (
        "Aggregate metrics from the newest simulation outputs; optionally "
        "filter edges to a radius around network coordinates.",
        _obj(
            {
                "center_x": {"type": "number"},
                "center_y": {"type": "number"},
                "radius_m": {"type": "number", "minimum": 0},
            }
        ),
        False,
    ),
    "compare_runs": (
        "Compare two stored runs on the given metrics, reporting deltas and "
        "signed percent change; defaults to the two most recent runs.",
        _obj(
            {
                "metrics": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "run_a": {"type": "string"},
                "run_b": {"type": "string"},
                "stat": {"type": "string", "enum": ["mean", "sum", "min", "max"]},
            },
            ["metrics"],
        ),
        False,
    ),
    "apply_green_wave": (
        "Coordinate signal offsets along corridors (green wave) using the "
        "current network and routes; yields a signal-program artifact.",
        _obj({}),
        True,
    ),
    "apply_webster": (
        "Adapt signal cycle lengths and phase splits to measured demand; "
        "yields a signal-program artifact.",
        _obj({}),
        True,
    ),
    "close_road": (
        "Close the listed edges to all traffic (edges stay in the network for "
        "pre/post comparison). Warns when a closure isolates demand endpoints.",
        _obj(
            {"edges": {"type": "array", "items": {"type": "string"}, "minItems": 1}},
            ["edges"],
        ),
        True,
    ),
    "reduce_lanes": (
        "Remove lanes from one edge (construction closure); at least one lane "
        "must remain, otherwise use close_road.",
        _obj(
            {
                "edge": {"type": "string"},
                "lanes_removed": {"type": "integer", "minimum": 1},
            },
            ["edge", "lanes_removed"],
        ),
        True,
    ),
    "adjust_speed": (
        "Set the speed limit (m/s) of one edge; every other attribute is untouched.",
        _obj(
            {
                "edge": {"type": "string"},
                "new_speed_m_s": {"type": "number", "exclusiveMinimum": 0},
            },
            ["edge", "new_speed_m_s"],
        ),
        True,
    ),
    "set_fleet_composition": (
        "Assign an exact share of the routed vehicles the electric vehicle "
        "type (zero tailpipe emissions, battery device); the rest stay "
        "combustion. Deterministic for a fixed seed.",
        _obj(
            {
                "ev_ratio": {"type": "number", "minimum": 0, "maximum": 1},
                "seed": {"type": "integer"},
            },
            ["ev_ratio"],
        ),
        True,
    ),
    "plot_density": (
        "Render a per-edge heatmap image (density, speed, or occupancy) for "
        "the newest run via the network plotting scripts.",
        _obj({"metric": {"type": "string", "enum": ["density", "speed", "occupancy"]}}),
        True,
    ),
}


def build_registry(ctx: ToolContext, dry_run: bool = False) -> ToolRegistry:
    """Publish the full catalog; dry_run swaps handlers for deterministic stubs."""
    registry = ToolRegistry()
    handlers = _stub_handlers() if dry_run else _make_handlers(ctx)
    for name, (description, schema, side_effecting) in TOOL_SCHEMAS.items():
        registry.register(
            ToolDescriptor(
                name=name,
                description=description,
                input_schema=schema,
                side_effecting=side_effecting,
                handler=handlers[name],
            )
        )
    return registry


def _stub_handlers() -> dict:
    """Deterministic canned handlers: same surface, no subprocesses, no files."""

    def make_stub(name: str, side_effecting: bool):
        role_by_tool = {
            "generate_network": "network",
            "generate_random_trips": "trips",
            "generate_od_trips": "trips",
            "generate_event_traffic": "trips",
            "generate_zone_od_trips": "trips",
            "compute_routes": "routes",
            "assemble_config": "config",
            "apply_green_wave": "signal_program",
            "apply_webster": "signal_program",
            "close_road": "network",
            "reduce_lanes": "network",
            "adjust_speed": "network",
            "set_fleet_composition": "routes",
            "plot_density": "plot",
        }
        counters = {"runs": 0}

        def stub(**args) -> ToolResult:
            digest = hashlib.sha256(
                json.dumps({"tool": name, "args": args}, sort_keys=True).encode()
            ).hexdigest()
            result = ToolResult.text(f"[dry-run] {name} ok")
            if name in role_by_tool:
                role = role_by_tool[name]
                result.add_artifact(role, f"stub/{name}.{role}", digest)
            if name == "run_simulation":
                counters["runs"] += 1
                run_id = f"run-{counters['runs']}"
                result.add_artifact("tripinfo", f"stub/tripinfo.{counters['runs']}.xml", digest)
                result.add_value(
                    {
                        "run_id": run_id,
                        "label": args.get("label", "run"),
                        "metrics": {
                            "duration_s": {"count": 100, "mean": 256.38, "min": 10.0, "max": 900.0},
                            "density_veh_km": {"count": 80, "mean": 2.42, "min": 0.0, "max": 12.0},
                        },
                    }
                )
            if name == "compare_runs":
                result.add_value(
                    {
                        "comparison": [
                            {
                                "metric": metric,
                                "a": 16.5,
                                "b": 12.9,
                                "delta": -3.6,
                                "percent_change": -21.818181818181817,
                                "division_guard": False,
                            }
                            for metric in args.get("metrics", ["density_veh_km"])
                        ],
                        "run_a": args.get("run_a", "run-1"),
                        "run_b": args.get("run_b", "run-2"),
                    }
                )
            if name == "generate_event_traffic":
                total = sum(int(p["vehicles"]) for p in args.get("od_pairs", []))
                fraction = float(args.get("initial_fraction", 0.6))
                initial = int(total * fraction + 0.5)
                result.add_value({"total": total, "initial": initial, "later": total - initial})
            if name == "set_fleet_composition":
                result.add_value(
                    {
                        "applied_policy": {
                            "kind": "fleet_composition",
                            "ev_ratio": args.get("ev_ratio"),
                            "electric_count": None,
                        }
                    }
                )
            if name in ("close_road", "reduce_lanes", "adjust_speed", "apply_green_wave", "apply_webster"):
                result.add_value(
                    {"applied_policy": {"kind": name, "args": args, "parent_network_hash": digest}}
                )
            if name == "geocode_place":
                result.add_value({"lat": 0.0, "lon": 0.0})
            if name == "analyze_results":
                result.add_value({"metrics": {"duration_s": {"count": 100, "mean": 256.38}}})
            return result

        return stub

    return {name: make_stub(name, spec[2]) for name, spec in TOOL_SCHEMAS.items()}
