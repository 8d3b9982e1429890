"""Acceptance suite: one test per criterion, each printing a PASS line.

Criteria 7-10 additionally need a local SUMO installation and are marked
integration; everything else runs pure. Tolerances are pinned here, not
configurable.
"""

import json
import math
import random
import time
import xml.etree.ElementTree as ET
from pathlib import Path
from xml.dom import minidom

import jsonschema
import pytest

from sumoflow.analysis.metrics import DEFAULT_PLAN, aggregate
from sumoflow.analysis.parsers import parse_edgedata, parse_tripinfo
from sumoflow.analysis.store import ResultStore, RunRecord
from sumoflow.analysis.metrics import MetricStats, MetricsSummary
from sumoflow.errors import SchemaViolationError
from sumoflow.mcp.server import INVALID_PARAMS, McpServer
from sumoflow.planner.conversation import SessionState
from sumoflow.planner.engine import PlannerEngine
from sumoflow.planner.llm import MockScriptBackend
from sumoflow.planner.context import assemble_prompt
from sumoflow.scenario.demand import DepartureSplit, ODPair, TrafficCondition, gen_random_trips, od_to_trips
from sumoflow.scenario.network import edge_midpoints, network_stats
from sumoflow.scenario.routing import route
from sumoflow.scenario.config import assemble_config
from sumoflow.analysis.simulate import run_simulation
from sumoflow.policy.fleet import set_fleet_composition
from sumoflow.policy.network_edit import canonical_edge_diff, reduce_lanes
from sumoflow.policy.signals import apply_green_wave, apply_webster
from sumoflow.toolserver.registry import ToolRegistry
from sumoflow.toolserver.runner import SubprocessRunner
from sumoflow.toolserver.workspace import Workspace, hash_file
from sumoflow.tools_catalog import TOOL_SCHEMAS, ToolContext, build_registry

from conftest import FIXTURES, requires_sumo
from support import SIMPLE_FLOW_SCRIPT, assert_gating

GRID = FIXTURES / "grid5.net.xml"

EVENT_OD_TABLE = [
    ODPair((-73.9927, 40.7519), (-74.0024, 40.7604), 200),
    ODPair((-73.9927, 40.7519), (-73.9846, 40.7741), 300),
    ODPair((-73.9927, 40.7519), (-73.9617, 40.7685), 300),
    ODPair((-73.9934, 40.7505), (-73.9725, 40.7134), 200),
    ODPair((-73.9934, 40.7505), (-73.9684, 40.7474), 200),
    ODPair((-73.9934, 40.7505), (-73.9544, 40.7570), 200),
    ODPair((-73.9969, 40.7466), (-74.0119, 40.7256), 200),
    ODPair((-73.9969, 40.7466), (-74.0142, 40.7015), 200),
    ODPair((-73.9969, 40.7466), (-73.9969, 40.7061), 200),
]

# demand scaled so the toy grid actually congests; the light<medium<heavy
# ratio structure is what the criterion exercises
MONO_SCALE = 6


def _grid_workspace(tmp_path, name="acc") -> tuple[Workspace, "SubprocessRunner"]:
    workspace = Workspace.load(name, tmp_path / name)
    target = workspace.allocate("network")
    target.write_bytes(GRID.read_bytes())
    workspace.register("network", target)
    return workspace, SubprocessRunner(read_only_roots=[FIXTURES])


def _report(number: int, text: str) -> None:
    print(f"ACCEPTANCE {number:02d} PASS: {text}")


class TestCriterion01McpConformance:
    def test_criterion(self, tmp_path):
        started = time.monotonic()
        workspace = Workspace.load("mcp", tmp_path / "mcp")
        runner = SubprocessRunner(read_only_roots=[FIXTURES])
        ctx = ToolContext(
            workspace=workspace, runner=runner, store=ResultStore(tmp_path / "r.sqlite"),
            session_id="mcp",
        )
        registry = build_registry(ctx)
        server = McpServer(registry)
        server.handle_initialize({"protocolVersion": server.config.protocol_versions[0]})

        tools = server.handle_tools_list()["tools"]
        assert len(tools) >= 12
        for tool in tools:
            jsonschema.Draft7Validator.check_schema(tool["inputSchema"])
            assert tool["description"].strip()

        snapshot = _workspace_digest(workspace.root)
        spawns = runner.spawn_count
        with pytest.raises(SchemaViolationError) as excinfo:
            server.handle_tools_call(
                {"name": "generate_random_trips", "arguments": {"condition": "extreme", "duration_s": 60}}
            )
        assert any("condition" in v for v in excinfo.value.violations)
        assert runner.spawn_count == spawns
        assert _workspace_digest(workspace.root) == snapshot

        from sumoflow.mcp.messages import RpcMessage

        response = server.handle_message(
            RpcMessage(id=7, method="tools/call",
                       params={"name": "generate_random_trips", "arguments": {"condition": "extreme", "duration_s": 60}})
        )
        assert response.error["code"] == INVALID_PARAMS

        elapsed = time.monotonic() - started
        assert elapsed < 5.0
        _report(1, f"{len(tools)} schema-valid tools; violating call spawned nothing ({elapsed:.2f}s)")


class TestCriterion02ExecutionGating:
    def test_criterion(self):
        started = time.monotonic()
        side_effecting = [name for name, spec in TOOL_SCHEMAS.items() if spec[2]]
        rng = random.Random(20240607)
        total_refusals = 0
        for trial in range(50):
            registry, counters = _instrumented_registry()
            script = _random_rogue_script(rng, side_effecting)
            ticks = iter(range(1, 100000))
            engine = PlannerEngine(
                state=SessionState(f"g{trial}"),
                registry=registry,
                backend=MockScriptBackend(script["entries"]),
                clock=lambda: float(next(ticks)),
            )
            events = []
            for message in script["user_messages"]:
                events.extend(engine.step(message))
            assert_gating(events, registry)
            executed_uncovered = [
                name for name, count in counters.items()
                if count > 0 and name not in script["allowed"]
            ]
            assert executed_uncovered == [], f"trial {trial}: {executed_uncovered}"
            total_refusals += sum(1 for e in events if e.kind == "error" and "refused" in e.payload.get("message", ""))
        elapsed = time.monotonic() - started
        assert elapsed < 30.0
        _report(2, f"50 rogue scripts, 0 unauthorized executions, {total_refusals} refusals ({elapsed:.2f}s)")


class TestCriterion03DepartureSplit:
    def test_criterion(self, tmp_path):
        workspace = Workspace.load("split", tmp_path / "split")
        split = DepartureSplit(0.6, 1800.0, 7200.0)

        single = od_to_trips(workspace, [ODPair((0.0, 0.0), (1.0, 1.0), 200)], split, seed=5)
        departs = _departures(single.path)
        assert len(departs) == 200
        assert sum(1 for d in departs if d < 1800.0) == 120
        assert sum(1 for d in departs if d >= 1800.0) == 80

        full = od_to_trips(workspace, EVENT_OD_TABLE, split, seed=5)
        departs = _departures(full.path)
        assert len(departs) == 2000
        assert sum(1 for d in departs if d < 1800.0) == 1200
        _report(3, "split 120/80 exact on one pair; 2000 total with 1200 initial on the full table")


class TestCriterion04AggregationOracle:
    def test_criterion(self, tmp_path):
        rng = random.Random(11)
        checked = 0
        for case in range(20):
            if case % 2 == 0:
                path = tmp_path / f"trip{case}.xml"
                _write_random_tripinfo(path, rng)
                summary = aggregate(parse_tripinfo(path), DEFAULT_PLAN)
                oracle = _oracle_tripinfo(path)
            else:
                path = tmp_path / f"edge{case}.xml"
                _write_random_edgedata(path, rng)
                summary = aggregate(parse_edgedata(path), DEFAULT_PLAN)
                oracle = _oracle_edgedata(path)
            for name, stats in summary.metrics.items():
                for stat_name in ("mean", "sum", "min", "max"):
                    expected = oracle[name][stat_name]
                    actual = stats.stat(stat_name)
                    assert _rel_close(actual, expected, 1e-9), (case, name, stat_name)
                    checked += 1
        _report(4, f"20 randomized fixtures, {checked} statistics within 1e-9 of the brute-force oracle")


class TestCriterion05ComparisonArithmetic:
    def test_criterion(self, tmp_path):
        store = ResultStore(tmp_path / "cmp.sqlite")
        for run_id, value in (("c:run-1", 16.5), ("c:run-2", 12.9), ("c:run-3", 73.3), ("c:run-4", 51.9)):
            summary = MetricsSummary(run_id=run_id)
            summary.metrics["density_veh_km"] = MetricStats(count=1, mean=value, sum=value, min=value, max=value)
            summary.plan["density_veh_km"] = ("mean",)
            store.persist_run(RunRecord(run_id, "c", "h", run_id, {}), metrics=summary)

        network_wide = store.compare_runs("c:run-1", "c:run-2", ["density_veh_km"])[0]
        assert network_wide.percent_change == pytest.approx(-21.8, abs=0.1)
        local = store.compare_runs("c:run-3", "c:run-4", ["density_veh_km"])[0]
        assert local.percent_change == pytest.approx(-29.2, abs=0.1)

        same = store.compare_runs("c:run-1", "c:run-1", ["density_veh_km"])[0]
        assert same.delta == 0 and same.percent_change == 0
        _report(5, f"16.5->12.9 = {network_wide.percent_change:.1f}%; 73.3->51.9 = {local.percent_change:.1f}%")


class TestCriterion06FleetExactness:
    def test_criterion(self, tmp_path):
        workspace = Workspace.load("fleet", tmp_path / "fleet")
        routes_path = workspace.allocate("routes")
        vehicles = "\n".join(
            f'    <vehicle id="v{i}" depart="{i}.00"><route edges="E0"/></vehicle>' for i in range(100)
        )
        routes_path.write_text(f"<routes>\n{vehicles}\n</routes>\n")
        routes = workspace.register("routes", routes_path)

        expected = {0.0: 0, 0.25: 25, 0.5: 50, 0.75: 75, 1.0: 100}
        for ratio, target in expected.items():
            first, count_one = set_fleet_composition(workspace, routes, ratio, seed=42)
            second, count_two = set_fleet_composition(workspace, routes, ratio, seed=42)
            assert count_one == count_two == target, ratio
            assert first.content_hash == second.content_hash
            electric = sum(
                1 for v in ET.parse(first.path).getroot().iter("vehicle") if v.get("type") == "electric"
            )
            assert electric == target
        _report(6, "electric counts {0,25,50,75,100} exact and rerun-stable for N=100")


@requires_sumo
@pytest.mark.integration
class TestCriterion07DemandMonotonicity:
    def test_criterion(self, tmp_path):
        started = time.monotonic()
        results: dict[int, dict[str, tuple[float, float]]] = {}
        for seed in (1, 2, 3):
            results[seed] = {}
            for level in ("light", "medium", "heavy"):
                workspace, runner = _grid_workspace(tmp_path, f"mono-{level}-{seed}")
                network = workspace.resolve("network")
                stats = network_stats(network.path)
                condition = TrafficCondition(
                    level=level,
                    rate_coefficient=TrafficCondition.named(level).rate_coefficient * MONO_SCALE,
                )
                trips = gen_random_trips(runner, workspace, network, condition, 900.0, seed, stats.total_lane_km)
                routes, _ = route(runner, workspace, network, trips)
                config = assemble_config(workspace, network, routes, 3600.0, 42)
                outputs = run_simulation(runner, workspace, config)
                trip_records = parse_tripinfo(outputs.tripinfo.path)
                edge_records = parse_edgedata(outputs.edgedata.path)
                mean_duration = sum(r.duration_s for r in trip_records) / len(trip_records)
                mean_density = sum(r.density_veh_km for r in edge_records) / len(edge_records)
                results[seed][level] = (mean_density, mean_duration)
        for seed, row in results.items():
            assert row["light"][0] < row["medium"][0] < row["heavy"][0], f"density not monotone for seed {seed}: {row}"
            assert row["light"][1] < row["medium"][1] < row["heavy"][1], f"duration not monotone for seed {seed}: {row}"
        elapsed = time.monotonic() - started
        assert elapsed < 120.0
        _report(7, f"density and duration strictly increasing for seeds 1-3 ({elapsed:.1f}s)")


@requires_sumo
@pytest.mark.integration
class TestCriterion08LaneClosureDirection:
    def test_criterion(self, tmp_path):
        started = time.monotonic()
        workspace, runner = _grid_workspace(tmp_path, "closure")
        network = workspace.resolve("network")
        stats = network_stats(network.path)
        condition = TrafficCondition(
            level="heavy", rate_coefficient=TrafficCondition.named("heavy").rate_coefficient * MONO_SCALE
        )
        trips = gen_random_trips(runner, workspace, network, condition, 900.0, 7, stats.total_lane_km)

        routes_pre, _ = route(runner, workspace, network, trips)
        config_pre = assemble_config(workspace, network, routes_pre, 3600.0, 42)
        pre = run_simulation(runner, workspace, config_pre)
        pre_time_loss = _mean_time_loss(pre.tripinfo.path)

        patch = reduce_lanes(runner, workspace, network, "C2D2", 1)
        diff = canonical_edge_diff(
            network.path, patch.artifact.path, compare_geometry=False, include_internal=False
        )
        assert diff == ["C2D2"]

        routes_post, _ = route(runner, workspace, patch.artifact, trips)
        config_post = assemble_config(workspace, patch.artifact, routes_post, 3600.0, 42)
        post = run_simulation(runner, workspace, config_post)
        post_time_loss = _mean_time_loss(post.tripinfo.path)

        assert post_time_loss >= pre_time_loss
        elapsed = time.monotonic() - started
        assert elapsed < 60.0
        _report(8, f"time_loss {pre_time_loss:.2f} -> {post_time_loss:.2f}s; diff touches only C2D2 ({elapsed:.1f}s)")


@requires_sumo
@pytest.mark.integration
class TestCriterion09EvSweepDirection:
    def test_criterion(self, tmp_path):
        started = time.monotonic()
        workspace, runner = _grid_workspace(tmp_path, "ev")
        network = workspace.resolve("network")
        stats = network_stats(network.path)
        trips = gen_random_trips(
            runner, workspace, network, TrafficCondition.named("medium"), 900.0, 13, stats.total_lane_km
        )
        base_routes, _ = route(runner, workspace, network, trips)

        co2_totals = {}
        electricity_totals = {}
        for ratio in (0.0, 0.5, 1.0):
            typed, _count = set_fleet_composition(workspace, base_routes, ratio, seed=42)
            config = assemble_config(workspace, network, typed, 3600.0, 42)
            outputs = run_simulation(runner, workspace, config)
            records = parse_tripinfo(outputs.tripinfo.path)
            co2_totals[ratio] = sum(r.co2_abs_mg for r in records)
            electricity_totals[ratio] = sum(r.electricity_abs_wh for r in records)

        assert co2_totals[0.0] > co2_totals[0.5] > co2_totals[1.0]
        assert co2_totals[1.0] == 0.0
        assert electricity_totals[1.0] > 0.0
        elapsed = time.monotonic() - started
        assert elapsed < 60.0
        _report(
            9,
            f"CO2 {co2_totals[0.0]:.0f} > {co2_totals[0.5]:.0f} > {co2_totals[1.0]:.0f} mg; "
            f"electricity at 100% = {electricity_totals[1.0]:.0f} Wh ({elapsed:.1f}s)",
        )


@requires_sumo
@pytest.mark.integration
class TestCriterion10SignalPipeline:
    def test_criterion(self, tmp_path):
        started = time.monotonic()
        workspace, runner = _grid_workspace(tmp_path, "signals")
        network = workspace.resolve("network")
        stats = network_stats(network.path)
        trips = gen_random_trips(
            runner, workspace, network, TrafficCondition.named("medium"), 900.0, 17, stats.total_lane_km
        )
        routes, _ = route(runner, workspace, network, trips)
        known = set(stats.signal_ids)

        for apply_tool in (apply_green_wave, apply_webster):
            program = apply_tool(runner, workspace, network, routes)
            referenced = {t.get("id") for t in ET.parse(program.path).getroot().iter("tlLogic")}
            assert referenced and referenced <= known
            config = assemble_config(workspace, network, routes, 3600.0, 42, extra_additional=[program])
            outputs = run_simulation(runner, workspace, config)
            assert outputs.tripinfo.path.exists()
        elapsed = time.monotonic() - started
        assert elapsed < 60.0
        _report(10, f"green-wave and cycle-adaptation programs valid; both runs exit 0 ({elapsed:.1f}s)")


class TestCriterion11GoldenTranscripts:
    def test_criterion(self):
        started = time.monotonic()
        from test_transcripts import SESSIONS, run_session

        for name in sorted(SESSIONS):
            transcript, events, engine = run_session(name)
            golden = (FIXTURES / "golden" / f"{name}.events.jsonl").read_bytes()
            assert transcript == golden, f"{name} transcript drifted"
            again, _, _ = run_session(name)
            assert transcript == again
        elapsed = time.monotonic() - started
        assert elapsed < 10.0
        _report(11, f"3 archetype sessions replay byte-identically ({elapsed:.2f}s)")


class TestCriterion12CacheAccounting:
    def test_criterion(self):
        extension = [
            {"expect": {"role": "user", "contains": "Times Square"},
             "respond": {
                 "classification": {"level": "simple", "rationale": "another run"},
                 "intent": {"task_family": "simple_simulation",
                            "slots": {"spatial_scope": {"place": "Times Square, Manhattan", "radius_m": 2000},
                                      "trip_type": "random", "condition": "light", "duration_s": 1800}},
             }},
            {"expect": {"role": "agent"}, "respond": {"tool_calls": [{"name": "generate_network", "arguments": {"place": "Times Square, Manhattan"}}]}},
            {"expect": {"role": "tool"}, "respond": {"tool_calls": [{"name": "generate_random_trips", "arguments": {"condition": "light", "duration_s": 1800}}]}},
            {"expect": {"role": "tool"}, "respond": {"tool_calls": [{"name": "compute_routes", "arguments": {}}]}},
            {"expect": {"role": "tool"}, "respond": {"tool_calls": [{"name": "assemble_config", "arguments": {"duration_s": 1800}}]}},
            {"expect": {"role": "tool"}, "respond": {"tool_calls": [{"name": "run_simulation", "arguments": {"label": "second"}}]}},
            {"expect": {"role": "tool"}, "respond": {"text": "Second run complete."}},
        ]
        backend = MockScriptBackend(SIMPLE_FLOW_SCRIPT + extension)
        registry = build_registry(None, dry_run=True)
        ticks = iter(range(1, 100000))
        engine = PlannerEngine(
            state=SessionState("cache"), registry=registry, backend=backend,
            clock=lambda: float(next(ticks)),
        )
        engine.step("Run a traffic simulation around Gangnam Station in Seoul within a 2 km radius.")
        engine.step("accept defaults")
        engine.step("Now run one around Times Square, Manhattan with light traffic for 1800 seconds.")

        llm_calls = backend.cursor
        assert llm_calls >= 10, f"session made only {llm_calls} model calls"
        assert len(backend.seen_cache_keys) == 1
        bundle = assemble_prompt(SessionState("cache"), [], registry.descriptors())
        assert backend.static_bytes_sent == bundle.static_bytes  # transmitted exactly once

        smaller = assemble_prompt(SessionState("cache"), [], registry.descriptors()[:-1])
        assert smaller.cache_key != bundle.cache_key
        _report(12, f"{llm_calls}-call session: static bytes sent once, key constant; catalog change flips key")


# -- helpers ----------------------------------------------------------------------


def _workspace_digest(root: Path) -> str:
    entries = []
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.name not in ("commands.jsonl",):
            entries.append(f"{path.relative_to(root)}:{hash_file(path)}")
    return "|".join(entries)


def _departures(path: Path) -> list[float]:
    return [float(t.get("depart")) for t in ET.parse(path).getroot().iter("trip")]


def _mean_time_loss(path: Path) -> float:
    records = parse_tripinfo(path)
    return sum(r.time_loss_s for r in records) / len(records)


def _instrumented_registry() -> tuple[ToolRegistry, dict[str, int]]:
    from sumoflow.mcp.messages import ToolDescriptor

    base = build_registry(None, dry_run=True)
    registry = ToolRegistry()
    counters: dict[str, int] = {}
    for descriptor in base.descriptors():
        counters[descriptor.name] = 0

        def wrapped(handler=descriptor.handler, name=descriptor.name, **args):
            counters[name] += 1
            return handler(**args)

        registry.register(
            ToolDescriptor(
                name=descriptor.name,
                description=descriptor.description,
                input_schema=descriptor.input_schema,
                side_effecting=descriptor.side_effecting,
                handler=wrapped,
            )
        )
    return registry, counters


def _random_rogue_script(rng: random.Random, side_effecting: list[str]) -> dict:
    """A mock script that tries side-effecting calls at disallowed moments."""
    def rogue_calls():
        return [{"name": rng.choice(side_effecting), "arguments": {}} for _ in range(rng.randint(1, 3))]

    pattern = rng.choice(["interpret_attack", "await_attack", "post_approve_attack"])
    if pattern == "interpret_attack":
        return {
            "entries": [
                {"expect": {"role": "user"},
                 "respond": {"classification": {"level": "complex", "rationale": "r"},
                             "intent": {"task_family": "policy_comparison", "slots": {}},
                             "tool_calls": rogue_calls()}},
            ],
            "user_messages": ["How will closing lanes affect congestion?"],
            "allowed": set(),
        }
    complete_intent = {
        "task_family": "policy_comparison",
        "slots": {"spatial_scope": {"place": "x", "radius_m": 1000}, "target_edge": "A1B1",
                  "lanes_closed": 1, "condition": "medium", "duration_s": 600},
    }
    if pattern == "await_attack":
        return {
            "entries": [
                {"expect": {"role": "user"},
                 "respond": {"classification": {"level": "complex", "rationale": "r"},
                             "intent": complete_intent, "tool_calls": rogue_calls()}},
            ],
            "user_messages": [
                "How will closing lanes affect congestion?",
                "interesting, tell me more",  # not a decision; must not execute
            ],
            "allowed": set(),
        }
    # post_approve_attack: plan approved, then the model calls tools outside it
    plan_tools = {"generate_network", "generate_random_trips", "compute_routes",
                  "assemble_config", "run_simulation", "reduce_lanes", "compare_runs"}
    outside = [t for t in side_effecting if t not in plan_tools]
    return {
        "entries": [
            {"expect": {"role": "user"},
             "respond": {"classification": {"level": "complex", "rationale": "r"},
                         "intent": complete_intent}},
            {"expect": {"role": "agent"},
             "respond": {"tool_calls": [{"name": rng.choice(outside), "arguments": {}}]}},
            {"expect": {"role": "tool"}, "respond": {"text": "stopping"}},
        ],
        "user_messages": ["How will closing lanes affect congestion?", "approve"],
        "allowed": set(),
    }


def _write_random_tripinfo(path: Path, rng: random.Random) -> None:
    rows = []
    for index in range(rng.randint(1, 60)):
        emissions = ""
        if rng.random() > 0.2:
            emissions = (
                f'<emissions CO2_abs="{rng.uniform(0, 5e5):.4f}" PMx_abs="{rng.uniform(0, 50):.4f}" '
                f'NOx_abs="{rng.uniform(0, 500):.4f}" fuel_abs="{rng.uniform(0, 2e4):.4f}" '
                f'electricity_abs="{rng.uniform(0, 100):.4f}"/>'
            )
        rows.append(
            f'<tripinfo id="t{index}" depart="{rng.uniform(0, 600):.2f}" '
            f'duration="{rng.uniform(1, 900):.2f}" timeLoss="{rng.uniform(0, 400):.2f}">{emissions}</tripinfo>'
        )
    path.write_text("<tripinfos>" + "".join(rows) + "</tripinfos>")


def _write_random_edgedata(path: Path, rng: random.Random) -> None:
    intervals = []
    for k in range(rng.randint(1, 3)):
        rows = []
        for index in range(rng.randint(1, 40)):
            rows.append(
                f'<edge id="e{index}" density="{rng.uniform(0, 80):.4f}" '
                f'occupancy="{rng.uniform(0, 100):.4f}" speed="{rng.uniform(0, 30):.4f}"/>'
            )
        intervals.append(f'<interval begin="{k * 60}" end="{(k + 1) * 60}">' + "".join(rows) + "</interval>")
    path.write_text("<meandata>" + "".join(intervals) + "</meandata>")


def _oracle_tripinfo(path: Path) -> dict:
    """Brute-force pass over the raw XML, independent of the production parser."""
    doc = minidom.parse(str(path))
    columns: dict[str, list[float]] = {name: [] for name in (
        "duration_s", "time_loss_s", "co2_abs_mg", "pmx_abs_mg", "nox_abs_mg", "fuel_abs_mg", "electricity_abs_wh",
    )}
    for node in doc.getElementsByTagName("tripinfo"):
        columns["duration_s"].append(float(node.getAttribute("duration") or 0))
        columns["time_loss_s"].append(float(node.getAttribute("timeLoss") or 0))
        emissions = node.getElementsByTagName("emissions")
        getter = emissions[0].getAttribute if emissions else (lambda _a: "")
        columns["co2_abs_mg"].append(float(getter("CO2_abs") or 0))
        columns["pmx_abs_mg"].append(float(getter("PMx_abs") or 0))
        columns["nox_abs_mg"].append(float(getter("NOx_abs") or 0))
        columns["fuel_abs_mg"].append(float(getter("fuel_abs") or 0))
        columns["electricity_abs_wh"].append(float(getter("electricity_abs") or 0))
    return {name: _column_stats(values) for name, values in columns.items()}


def _oracle_edgedata(path: Path) -> dict:
    doc = minidom.parse(str(path))
    columns = {"density_veh_km": [], "occupancy_pct": [], "speed_m_s": []}
    for node in doc.getElementsByTagName("edge"):
        columns["density_veh_km"].append(float(node.getAttribute("density") or 0))
        columns["occupancy_pct"].append(float(node.getAttribute("occupancy") or 0))
        columns["speed_m_s"].append(float(node.getAttribute("speed") or 0))
    return {name: _column_stats(values) for name, values in columns.items()}


def _column_stats(values: list[float]) -> dict:
    total = sum(values)
    return {"mean": total / len(values), "sum": total, "min": min(values), "max": max(values)}


def _rel_close(a: float, b: float, tolerance: float) -> bool:
    if a == b:
        return True
    return abs(a - b) <= tolerance * max(abs(a), abs(b))
