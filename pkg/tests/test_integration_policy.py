"""Policy tools on real networks: patches, signal optimizers, fleet quotas."""

import xml.etree.ElementTree as ET

import pytest

from sumoflow.errors import (
    EmptyRoutesError,
    NonPositiveSpeedError,
    NoSignalsError,
    PolicyToolFailureError,
    UnknownEdgeError,
    WouldRemoveAllLanesError,
)
from sumoflow.policy.fleet import set_fleet_composition
from sumoflow.policy.network_edit import adjust_speed, canonical_edge_diff, close_road, reduce_lanes
from sumoflow.policy.signals import (
    WEBSTER_MAX_CYCLE_S,
    WEBSTER_MIN_CYCLE_S,
    apply_green_wave,
    apply_webster,
    program_cycle_lengths,
)
from sumoflow.scenario.demand import DepartureSplit, ODPair, TrafficCondition, gen_random_trips, od_to_trips
from sumoflow.scenario.network import build_grid_network, network_stats
from sumoflow.scenario.routing import route
from sumoflow.toolserver.runner import SubprocessSpec

from conftest import requires_sumo

pytestmark = [requires_sumo, pytest.mark.integration]


@pytest.fixture()
def grid(workspace, grid_net_path):
    target = workspace.allocate("network")
    target.write_bytes(grid_net_path.read_bytes())
    return workspace.register("network", target)


class TestCloseRoad:
    def test_closed_edge_disallows_all_and_others_identical(self, workspace, grid):
        patch = close_road(workspace, grid, ["C2D2"])
        root = ET.parse(patch.artifact.path).getroot()
        target = next(e for e in root.iter("edge") if e.get("id") == "C2D2")
        assert all(lane.get("disallow") == "all" for lane in target.findall("lane"))
        diff = canonical_edge_diff(grid.path, patch.artifact.path, compare_geometry=True)
        assert diff == ["C2D2"]

    def test_router_avoids_closed_edge(self, runner, workspace, grid):
        # corner-to-corner demand, then close one edge on the straight path
        pair = ODPair((10.0, 406.0), (790.0, 406.0), 2)  # along row 2
        trips = od_to_trips(workspace, [pair], DepartureSplit(0.5, 10.0, 20.0), 3, "xy")
        patch = close_road(workspace, grid, ["C2D2", "D2C2"])
        routes, unrouted = route(runner, workspace, patch.artifact, trips)
        assert unrouted == 0
        for vehicle in ET.parse(routes.path).getroot().iter("vehicle"):
            edges = vehicle.find("route").get("edges").split()
            assert "C2D2" not in edges and "D2C2" not in edges

    def test_unknown_edge_rejected(self, workspace, grid):
        with pytest.raises(UnknownEdgeError):
            close_road(workspace, grid, ["nope"])

    def test_closing_only_path_warns_but_succeeds(self, runner, manager):
        workspace = manager.open("closewarn")
        network = _build_chain_net(runner, workspace)
        patch = close_road(
            workspace, network, ["middle"], od_endpoints=[("start", "finish")]
        )
        assert patch.warnings
        assert "isolates" in patch.warnings[0]


class TestReduceLanes:
    def test_two_lane_edge_reduced_to_one(self, runner, workspace, grid):
        patch = reduce_lanes(runner, workspace, grid, "C2D2", 1)
        root = ET.parse(patch.artifact.path).getroot()
        target = next(e for e in root.iter("edge") if e.get("id") == "C2D2")
        assert len(target.findall("lane")) == 1

    def test_semantic_patch_locality(self, runner, workspace, grid):
        patch = reduce_lanes(runner, workspace, grid, "C2D2", 1)
        diff = canonical_edge_diff(
            grid.path, patch.artifact.path, compare_geometry=False, include_internal=False
        )
        assert diff == ["C2D2"]

    def test_removing_all_lanes_rejected(self, runner, workspace, grid):
        with pytest.raises(WouldRemoveAllLanesError):
            reduce_lanes(runner, workspace, grid, "C2D2", 2)

    def test_remove_two_from_three_keeps_speed(self, runner, manager):
        workspace = manager.open("threelane")
        network = build_grid_network(runner, workspace, grid_number=3, lanes=3)
        before = _edge_attrs(network.path, "A0A1")
        patch = reduce_lanes(runner, workspace, network, "A0A1", 2)
        root = ET.parse(patch.artifact.path).getroot()
        target = next(e for e in root.iter("edge") if e.get("id") == "A0A1")
        lanes = target.findall("lane")
        assert len(lanes) == 1
        assert lanes[0].get("speed") == before["speed"]

    def test_unknown_edge_rejected(self, runner, workspace, grid):
        with pytest.raises(UnknownEdgeError):
            reduce_lanes(runner, workspace, grid, "ghost", 1)


class TestAdjustSpeed:
    def test_speed_set_exactly(self, workspace, grid):
        patch = adjust_speed(workspace, grid, "C2D2", 8.33)
        root = ET.parse(patch.artifact.path).getroot()
        target = next(e for e in root.iter("edge") if e.get("id") == "C2D2")
        assert all(lane.get("speed") == "8.33" for lane in target.findall("lane"))
        diff = canonical_edge_diff(grid.path, patch.artifact.path, compare_geometry=True)
        assert diff == ["C2D2"]

    def test_setting_current_speed_is_a_noop_patch(self, workspace, grid):
        # 13.89 is the grid's existing limit; the canonical diff must be empty
        patch = adjust_speed(workspace, grid, "C2D2", 13.89)
        diff = canonical_edge_diff(grid.path, patch.artifact.path, compare_geometry=True)
        assert diff == []

    def test_negative_speed_rejected(self, workspace, grid):
        with pytest.raises(NonPositiveSpeedError):
            adjust_speed(workspace, grid, "C2D2", -3.0)

    def test_patch_twice_last_write_wins(self, workspace, grid):
        first = adjust_speed(workspace, grid, "C2D2", 10.0)
        second = adjust_speed(workspace, first.artifact, "C2D2", 5.0)
        root = ET.parse(second.artifact.path).getroot()
        target = next(e for e in root.iter("edge") if e.get("id") == "C2D2")
        assert all(lane.get("speed") == "5.00" for lane in target.findall("lane"))

    def test_disjoint_patches_commute(self, runner, workspace, grid):
        a_then_b = adjust_speed(
            workspace, reduce_lanes(runner, workspace, grid, "A0A1", 1).artifact, "E4E3", 7.0
        )
        b_then_a = reduce_lanes(
            runner, workspace, adjust_speed(workspace, grid, "E4E3", 7.0).artifact, "A0A1", 1
        )
        diff = canonical_edge_diff(
            a_then_b.artifact.path, b_then_a.artifact.path, compare_geometry=False, include_internal=False
        )
        assert diff == []


@pytest.fixture()
def grid_with_routes(runner, manager, grid_net_path):
    workspace = manager.open("signals")
    target = workspace.allocate("network")
    target.write_bytes(grid_net_path.read_bytes())
    network = workspace.register("network", target)
    stats = network_stats(network.path)
    trips = gen_random_trips(
        runner, workspace, network, TrafficCondition.named("medium"), 1800.0, 17, stats.total_lane_km
    )
    routes, _ = route(runner, workspace, network, trips)
    return workspace, network, routes


class TestSignalTools:
    def test_green_wave_references_only_existing_signals(self, runner, grid_with_routes):
        workspace, network, routes = grid_with_routes
        artifact = apply_green_wave(runner, workspace, network, routes)
        program_ids = {t.get("id") for t in ET.parse(artifact.path).getroot().iter("tlLogic")}
        assert program_ids
        assert program_ids <= set(network_stats(network.path).signal_ids)

    def test_webster_cycles_within_bounds(self, runner, grid_with_routes):
        workspace, network, routes = grid_with_routes
        artifact = apply_webster(runner, workspace, network, routes)
        cycles = program_cycle_lengths(artifact.path)
        assert cycles
        for signal_id, cycle in cycles.items():
            assert WEBSTER_MIN_CYCLE_S <= cycle <= WEBSTER_MAX_CYCLE_S + 5, signal_id

    def test_rerun_identical_inputs_identical_artifact(self, runner, grid_with_routes):
        workspace, network, routes = grid_with_routes
        first = apply_green_wave(runner, workspace, network, routes)
        second = apply_green_wave(runner, workspace, network, routes)
        assert first.content_hash == second.content_hash

    def test_unsignalized_network_rejected(self, runner, manager):
        workspace = manager.open("nosig")
        network = build_grid_network(runner, workspace, grid_number=3, signalized=False)
        dummy = workspace.allocate("routes")
        dummy.write_text("<routes/>")
        routes = workspace.register("routes", dummy)
        with pytest.raises(NoSignalsError):
            apply_green_wave(runner, workspace, network, routes)

    def test_empty_routes_tool_failure_with_stderr(self, runner, manager, grid_net_path):
        workspace = manager.open("emptyroutes")
        target = workspace.allocate("network")
        target.write_bytes(grid_net_path.read_bytes())
        network = workspace.register("network", target)
        empty = workspace.allocate("routes")
        empty.write_text("<routes/>")
        routes = workspace.register("routes", empty)
        with pytest.raises(PolicyToolFailureError):
            apply_webster(runner, workspace, network, routes)


class TestFleetComposition:
    def _routes(self, runner, manager, grid_net_path, n=100):
        workspace = manager.open(f"fleet{n}")
        target = workspace.allocate("network")
        target.write_bytes(grid_net_path.read_bytes())
        network = workspace.register("network", target)
        pair = ODPair((10.0, 10.0), (790.0, 790.0), n)
        trips = od_to_trips(workspace, [pair], DepartureSplit(0.5, 600.0, 1200.0), 3, "xy")
        routes, _ = route(runner, workspace, network, trips)
        return workspace, routes

    def test_quota_exact_and_stable(self, runner, manager, grid_net_path):
        workspace, routes = self._routes(runner, manager, grid_net_path)
        first, count_first = set_fleet_composition(workspace, routes, 0.75, seed=42)
        second, count_second = set_fleet_composition(workspace, routes, 0.75, seed=42)
        assert count_first == count_second == 75
        assert first.content_hash == second.content_hash
        assert _type_counts(first.path) == {"electric": 75, "combustion": 25}

    def test_ratio_zero_all_combustion(self, runner, manager, grid_net_path):
        workspace, routes = self._routes(runner, manager, grid_net_path)
        artifact, count = set_fleet_composition(workspace, routes, 0.0, seed=1)
        assert count == 0
        assert _type_counts(artifact.path) == {"combustion": 100}

    def test_ratio_one_all_electric(self, runner, manager, grid_net_path):
        workspace, routes = self._routes(runner, manager, grid_net_path)
        artifact, count = set_fleet_composition(workspace, routes, 1.0, seed=1)
        assert count == 100
        assert _type_counts(artifact.path) == {"electric": 100}

    def test_empty_routes_rejected(self, workspace):
        empty = workspace.allocate("routes")
        empty.write_text("<routes/>")
        routes = workspace.register("routes", empty)
        with pytest.raises(EmptyRoutesError):
            set_fleet_composition(workspace, routes, 0.5, seed=1)


# -- helpers --------------------------------------------------------------------


def _type_counts(path) -> dict:
    counts: dict = {}
    for vehicle in ET.parse(path).getroot().iter("vehicle"):
        counts[vehicle.get("type")] = counts.get(vehicle.get("type"), 0) + 1
    return counts


def _edge_attrs(path, edge_id) -> dict:
    root = ET.parse(path).getroot()
    edge = next(e for e in root.iter("edge") if e.get("id") == edge_id)
    lane = edge.find("lane")
    return dict(lane.attrib)


def _build_chain_net(runner, workspace):
    """start -> middle -> finish; closing 'middle' severs the only path."""
    nodes = workspace.root / "net" / "chain.nod.xml"
    edges = workspace.root / "net" / "chain.edg.xml"
    nodes.write_text(
        "<nodes>\n"
        '  <node id="n1" x="0" y="0"/>\n'
        '  <node id="n2" x="200" y="0"/>\n'
        '  <node id="n3" x="400" y="0"/>\n'
        '  <node id="n4" x="600" y="0"/>\n'
        "</nodes>\n"
    )
    edges.write_text(
        "<edges>\n"
        '  <edge id="start" from="n1" to="n2" numLanes="1" speed="13.9"/>\n'
        '  <edge id="middle" from="n2" to="n3" numLanes="1" speed="13.9"/>\n'
        '  <edge id="finish" from="n3" to="n4" numLanes="1" speed="13.9"/>\n'
        "</edges>\n"
    )
    out = workspace.allocate("network")
    result = runner.run(
        SubprocessSpec(
            program="netconvert",
            argv=["-n", str(nodes), "-e", str(edges), "-o", str(out)],
            workspace=workspace,
            expected_artifacts=[("network", out)],
        )
    )
    assert result.exit_code == 0
    return result.produced_artifacts[0]
