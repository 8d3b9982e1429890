"""Shortest-path routing of trip files via duarouter."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from ..errors import RoutingFailureError
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint

DEFAULT_UNROUTABLE_THRESHOLD = 0.05


def route(
    runner: SubprocessRunner,
    workspace: Workspace,
    network: Artifact,
    trips: Artifact,
    seed: int = 23423,
    unroutable_threshold: float = DEFAULT_UNROUTABLE_THRESHOLD,
) -> tuple[Artifact, int]:
    """Route trips over the network; returns (routes artifact, unrouted count).

    Unroutable trips below the threshold are reported, not fatal; above it
    the routing fails with counts attached.
    """
    fp = fingerprint(
        {
            "op": "route",
            "network": network.content_hash,
            "trips": trips.content_hash,
            "seed": seed,
        }
    )
    reusable = workspace.find_reusable("routes", fp)
    if reusable is not None:
        return reusable, _count_unrouted(trips.path, reusable.path)

    out = workspace.allocate("routes")
    n_trips = _count_trips(trips.path)
    if n_trips == 0:
        out.write_text('<routes/>\n', encoding="utf-8")
        return workspace.register("routes", out, fp), 0

    result = runner.run(
        SubprocessSpec(
            program="duarouter",
            argv=[
                "-n", str(network.path),
                "--route-files", str(trips.path),
                "-o", str(out),
                "--seed", str(seed),
                "--ignore-errors",
                "--no-warnings",
                "--mapmatch.junctions", "false",
            ],
            workspace=workspace,
            expected_artifacts=[("routes", out)],
            input_fingerprint=fp,
        )
    )
    if result.exit_code != 0:
        raise RoutingFailureError(f"duarouter failed:\n{result.stderr}")
    artifact = result.produced_artifacts[0]
    unrouted = _count_unrouted(trips.path, artifact.path)
    if n_trips > 0 and unrouted / n_trips > unroutable_threshold:
        raise RoutingFailureError(
            f"{unrouted} of {n_trips} trips unroutable (threshold "
            f"{unroutable_threshold:.0%})",
            total=n_trips,
            unrouted=unrouted,
        )
    return artifact, unrouted


def _count_trips(path: Path) -> int:
    root = ET.parse(path).getroot()
    return sum(1 for tag in ("trip", "vehicle") for _ in root.iter(tag))


def _count_unrouted(trips_path: Path, routes_path: Path) -> int:
    return max(0, _count_trips(trips_path) - _count_vehicles(routes_path))


def _count_vehicles(path: Path) -> int:
    root = ET.parse(path).getroot()
    return sum(1 for _ in root.iter("vehicle"))
