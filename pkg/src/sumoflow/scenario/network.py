"""Network construction: OSM retrieval, conversion, and synthetic grids."""

from __future__ import annotations

import shutil
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from ..errors import (
    ConversionFailureError,
    DownloadFailureError,
    EmptyExtractError,
    OversizedRegionError,
)
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint
from .geo import RegionSpec

# ~80 km x 80 km; beyond this the OSM endpoint and netconvert both struggle
DEFAULT_AREA_CAP_M2 = 6.4e9


def fetch_osm(
    runner: SubprocessRunner,
    workspace: Workspace,
    region: RegionSpec,
    fixture: Path | None = None,
    area_cap_m2: float = DEFAULT_AREA_CAP_M2,
) -> Artifact:
    """Retrieve the OSM extract for a region, or pass through a bundled fixture."""
    bbox = region.resolve()
    area = bbox.area_m2()
    if area > area_cap_m2:
        raise OversizedRegionError(
            f"requested region covers {area / 1e6:.0f} km^2, above the cap of "
            f"{area_cap_m2 / 1e6:.0f} km^2; narrow the radius or bbox"
        )

    out = workspace.allocate("extract")
    if fixture is not None:
        if not Path(fixture).exists():
            raise DownloadFailureError(f"fixture extract {fixture} does not exist")
        shutil.copyfile(fixture, out)
        artifact = workspace.register("extract", out)
    else:
        prefix = out.name.split(".")[0]
        result = runner.run(
            SubprocessSpec(
                program="osmGet.py",
                argv=["--bbox", bbox.as_osm_string(), "--prefix", prefix, "--output-dir", str(out.parent)],
                workspace=workspace,
                timeout=600.0,
            )
        )
        if result.exit_code != 0:
            raise DownloadFailureError(f"OSM retrieval failed:\n{result.stderr}")
        downloaded = out.parent / f"{prefix}_bbox.osm.xml"
        if not downloaded.exists():
            raise DownloadFailureError("OSM retrieval produced no extract file")
        downloaded.replace(out)
        artifact = workspace.register("extract", out)

    if b"<way" not in out.read_bytes():
        raise EmptyExtractError("extract contains no ways (empty region?)")
    return artifact


def build_network(
    runner: SubprocessRunner,
    workspace: Workspace,
    extract: Artifact,
    extra_options: list[str] | None = None,
) -> Artifact:
    """Convert an OSM extract into a simulation network via netconvert."""
    options = extra_options or []
    fp = fingerprint(
        {"op": "build_network", "extract": extract.content_hash, "options": options}
    )
    reusable = workspace.find_reusable("network", fp)
    if reusable is not None:
        return reusable

    out = workspace.allocate("network")
    result = runner.run(
        SubprocessSpec(
            program="netconvert",
            argv=["--osm-files", str(extract.path), "-o", str(out), *options],
            workspace=workspace,
            expected_artifacts=[("network", out)],
            input_fingerprint=fp,
        )
    )
    if result.exit_code != 0:
        raise ConversionFailureError(f"netconvert failed:\n{result.stderr}")
    artifact = result.produced_artifacts[0]
    stats = network_stats(artifact.path)
    if stats.edge_count < 1:
        raise ConversionFailureError("converted network contains no edges")
    return artifact


def build_grid_network(
    runner: SubprocessRunner,
    workspace: Workspace,
    grid_number: int = 5,
    edge_length_m: float = 200.0,
    lanes: int = 2,
    signalized: bool = True,
) -> Artifact:
    """Synthetic signalized grid via netgenerate, for fixtures and demos."""
    fp = fingerprint(
        {
            "op": "build_grid_network",
            "grid": grid_number,
            "length": edge_length_m,
            "lanes": lanes,
            "signalized": signalized,
        }
    )
    reusable = workspace.find_reusable("network", fp)
    if reusable is not None:
        return reusable

    out = workspace.allocate("network")
    argv = [
        "--grid",
        "--grid.number", str(grid_number),
        "--grid.length", str(edge_length_m),
        "--default.lanenumber", str(lanes),
        "-o", str(out),
    ]
    if signalized:
        argv += ["--tls.guess", "true"]
    result = runner.run(
        SubprocessSpec(
            program="netgenerate",
            argv=argv,
            workspace=workspace,
            expected_artifacts=[("network", out)],
            input_fingerprint=fp,
        )
    )
    if result.exit_code != 0:
        raise ConversionFailureError(f"netgenerate failed:\n{result.stderr}")
    return result.produced_artifacts[0]


@dataclass(frozen=True)
class NetworkStats:
    edge_count: int
    total_lane_km: float
    signal_ids: tuple[str, ...]

    @property
    def signal_count(self) -> int:
        return len(self.signal_ids)


def network_stats(path: Path) -> NetworkStats:
    """Edge count, lane kilometers, and signal ids of a network file."""
    root = ET.parse(path).getroot()
    edge_count = 0
    lane_m = 0.0
    for edge in root.iter("edge"):
        if edge.get("function") == "internal":
            continue
        edge_count += 1
        for lane in edge.findall("lane"):
            lane_m += float(lane.get("length", 0.0))
    signals = tuple(sorted({t.get("id") for t in root.iter("tlLogic")}))
    return NetworkStats(edge_count=edge_count, total_lane_km=lane_m / 1000.0, signal_ids=signals)


def edge_midpoints(path: Path) -> dict[str, tuple[float, float]]:
    """Midpoint (arc-length middle of lane 0 shape) per non-internal edge."""
    root = ET.parse(path).getroot()
    midpoints: dict[str, tuple[float, float]] = {}
    for edge in root.iter("edge"):
        if edge.get("function") == "internal":
            continue
        lane = edge.find("lane")
        if lane is None or not lane.get("shape"):
            continue
        points = [tuple(map(float, xy.split(","))) for xy in lane.get("shape").split()]
        midpoints[edge.get("id")] = _polyline_midpoint(points)
    return midpoints


def _polyline_midpoint(points: list[tuple[float, ...]]) -> tuple[float, float]:
    if len(points) == 1:
        return points[0][0], points[0][1]
    seg_lengths = []
    for (x1, y1, *_), (x2, y2, *_) in zip(points, points[1:]):
        seg_lengths.append(((x2 - x1) ** 2 + (y2 - y1) ** 2) ** 0.5)
    half = sum(seg_lengths) / 2
    walked = 0.0
    for (x1, y1, *_), (x2, y2, *_), seg in zip(points, points[1:], seg_lengths):
        if walked + seg >= half and seg > 0:
            t = (half - walked) / seg
            return x1 + t * (x2 - x1), y1 + t * (y2 - y1)
        walked += seg
    x, y, *_ = points[-1]
    return x, y
