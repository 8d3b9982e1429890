"""Declarative scenario execution: the full pipeline without any LLM.

A scenario file (YAML, schema version 1, see fixtures/scenario_schema.json)
names a network, a demand model, and one or more labeled runs with optional
policies. Execution drives the same registered tools the agent would call,
so every argument passes the same schema validation.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import yaml

from .errors import ScenarioParseError, SumoflowError
from .mcp.messages import ToolResult

SCHEMA_PATH = Path(__file__).resolve().parent / "fixtures" / "scenario_schema.json"


def load_scenario(path: Path) -> dict:
    """Parse and schema-validate a scenario file."""
    try:
        payload = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file: {exc}") from None
    except yaml.YAMLError as exc:
        raise ScenarioParseError(f"scenario file is not valid YAML: {exc}") from None
    schema = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(payload), key=lambda e: list(e.absolute_path))
    if errors:
        where = ".".join(str(p) for p in errors[0].absolute_path) or "document"
        raise ScenarioParseError(f"{where}: {errors[0].message}")
    return payload


def run_scenario(scenario: dict, registry, workspace_root: Path) -> dict:
    """Execute a parsed scenario; returns the metrics document."""
    demand = scenario["demand"]
    duration = demand["duration_s"]
    seed = demand["seed"]

    _call(registry, "generate_network", _network_args(scenario["network"]))
    _generate_demand(registry, demand)

    run_payloads: dict[str, dict] = {}
    labels: list[str] = []
    for run_spec in scenario["runs"]:
        label = run_spec["label"]
        policies = run_spec.get("policies", [])
        network_patches = [p for p in policies if p["kind"] in ("close_road", "reduce_lanes", "adjust_speed")]
        fleet = [p for p in policies if p["kind"] == "fleet_composition"]
        signals = [p for p in policies if p["kind"] in ("green_wave", "webster")]

        for policy in network_patches:
            _apply_policy(registry, policy, seed)
        routed = _structured(_call(registry, "compute_routes", {"seed": seed}))
        for policy in fleet:
            _apply_policy(registry, policy, seed)
        for policy in signals:
            _apply_policy(registry, policy, seed)
        config_args = {"duration_s": duration, "seed": seed}
        if signals:
            config_args["use_signal_program"] = True
        _call(registry, "assemble_config", config_args)
        result = _call(registry, "run_simulation", {"label": label})
        payload = _structured(result)
        payload["routed_vehicles"] = routed.get("routed")
        run_payloads[label] = payload
        labels.append(label)

    document: dict = {"runs": run_payloads}
    compare = scenario.get("compare")
    if compare and len(labels) >= 2:
        run_a = run_payloads[labels[0]]["run_id"]
        run_b = run_payloads[labels[-1]]["run_id"]
        compare_args = {"metrics": compare["metrics"], "run_a": run_a, "run_b": run_b}
        if "stat" in compare:
            compare_args["stat"] = compare["stat"]
        result = _call(registry, "compare_runs", compare_args)
        document["comparison"] = _structured(result)
    if scenario.get("plot"):
        result = _call(registry, "plot_density", {"metric": scenario["plot"]})
        document["plot"] = [b for b in result.content if b.get("type") == "artifact"]

    metrics_path = workspace_root / "output" / "metrics.json"
    metrics_path.parent.mkdir(parents=True, exist_ok=True)
    metrics_path.write_text(json.dumps(document, indent=2, sort_keys=True), encoding="utf-8")
    document["metrics_path"] = str(metrics_path)
    return document


def _network_args(network: dict) -> dict:
    args: dict = {}
    if network.get("type") == "grid":
        args["network_type"] = "grid"
        if "grid_number" in network:
            args["grid_number"] = network["grid_number"]
    else:
        args["network_type"] = "osm"
        for key in ("place", "lat", "lon", "radius_m", "bbox"):
            if key in network:
                args[key] = network[key]
    return args


def _generate_demand(registry, demand: dict) -> None:
    mode = demand["mode"]
    if mode == "random":
        if "condition" not in demand:
            raise ScenarioParseError("demand.condition is required for random mode")
        _call(
            registry,
            "generate_random_trips",
            {
                "condition": demand["condition"],
                "duration_s": demand["duration_s"],
                "seed": demand["seed"],
            },
        )
    elif mode == "coordinate_od":
        if not demand.get("od_pairs"):
            raise ScenarioParseError("demand.od_pairs is required for coordinate_od mode")
        split = demand.get("split") or {}
        args = {
            "od_pairs": demand["od_pairs"],
            "seed": demand["seed"],
            "coordinate_system": demand.get("coordinate_system", "lonlat"),
        }
        for key in ("initial_fraction", "initial_window_s", "horizon_s"):
            if key in split:
                args[key] = split[key]
        _call(registry, "generate_od_trips", args)
    else:  # zone_od
        if not demand.get("matrix") or not demand.get("shapefile"):
            raise ScenarioParseError("demand.matrix and demand.shapefile are required for zone_od mode")
        _call(
            registry,
            "generate_zone_od_trips",
            {
                "matrix": demand["matrix"],
                "shapefile": demand["shapefile"],
                "duration_s": demand["duration_s"],
                "seed": demand["seed"],
            },
        )


def _apply_policy(registry, policy: dict, seed: int) -> None:
    kind = policy["kind"]
    if kind == "close_road":
        _call(registry, "close_road", {"edges": policy["edges"]})
    elif kind == "reduce_lanes":
        _call(registry, "reduce_lanes", {"edge": policy["edge"], "lanes_removed": policy["lanes_removed"]})
    elif kind == "adjust_speed":
        _call(registry, "adjust_speed", {"edge": policy["edge"], "new_speed_m_s": policy["new_speed_m_s"]})
    elif kind == "fleet_composition":
        _call(registry, "set_fleet_composition", {"ev_ratio": policy["ev_ratio"], "seed": policy.get("seed", seed)})
    elif kind == "green_wave":
        _call(registry, "apply_green_wave", {})
    elif kind == "webster":
        _call(registry, "apply_webster", {})
    else:
        raise ScenarioParseError(f"unknown policy kind {kind!r}")


def _call(registry, name: str, args: dict) -> ToolResult:
    result = registry.call(name, args)
    if result.is_error:
        raise SumoflowError(f"{name} failed: {result.first_text()}")
    return result


def _structured(result: ToolResult) -> dict:
    for block in result.content:
        if block.get("type") == "structured":
            return block["value"]
    return {}
