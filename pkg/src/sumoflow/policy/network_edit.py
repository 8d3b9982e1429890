"""Infrastructure patches: road closure, lane reduction, speed adjustment.

Closures and speed changes are direct attribute edits on the network file,
which keeps every untouched element identical. Lane removal cannot be a
plain attribute edit (junction logic, internal lanes, and signal link
indices all depend on lane counts), so it runs netconvert over the existing
network with a one-line patch file; netconvert re-derives junction geometry,
which is why the locality check compares semantic attributes rather than
raw shapes.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    ConversionFailureError,
    NonPositiveSpeedError,
    UnknownEdgeError,
    WouldRemoveAllLanesError,
)
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint

ET.register_namespace("xsi", "http://www.w3.org/2001/XMLSchema-instance")

GEOMETRY_ATTRS = {"shape", "length"}


@dataclass
class PatchResult:
    artifact: Artifact
    warnings: list[str] = field(default_factory=list)


def _load(network: Artifact) -> tuple[ET.ElementTree, ET.Element]:
    tree = ET.parse(network.path)
    return tree, tree.getroot()


def _find_edge(root: ET.Element, edge_id: str) -> ET.Element:
    for edge in root.iter("edge"):
        if edge.get("id") == edge_id and edge.get("function") != "internal":
            return edge
    raise UnknownEdgeError(f"edge {edge_id!r} not in network")


def _write_patch(workspace: Workspace, tree: ET.ElementTree, stem: str, fp: str) -> Artifact:
    out = workspace.root / "policy" / stem
    n = 2
    while out.exists():
        parts = stem.split(".", 1)
        out = workspace.root / "policy" / f"{parts[0]}.{n}.{parts[1]}"
        n += 1
    tree.write(out, encoding="unicode", xml_declaration=False)
    return workspace.register("network", out, fp)


def close_road(
    workspace: Workspace,
    network: Artifact,
    edges: list[str],
    od_endpoints: list[tuple[str, str]] | None = None,
) -> PatchResult:
    """Disallow all vehicle classes on the listed edges.

    The edges stay in the graph so ids line up across pre/post comparisons.
    If od_endpoints are known, a reachability check flags closures that
    isolate demand endpoints (warning, not failure).
    """
    tree, root = _load(network)
    for edge_id in edges:
        edge = _find_edge(root, edge_id)
        for lane in edge.findall("lane"):
            lane.set("disallow", "all")
            if "allow" in lane.attrib:
                del lane.attrib["allow"]

    warnings = []
    if od_endpoints:
        reachable = _reachability(root, closed=set(edges))
        for origin, destination in od_endpoints:
            if destination not in reachable.get(origin, set()):
                warnings.append(
                    f"closure isolates demand endpoints: no path {origin} -> {destination}"
                )

    fp = fingerprint({"op": "close_road", "network": network.content_hash, "edges": sorted(edges)})
    artifact = _write_patch(workspace, tree, "network.closed.net.xml", fp)
    return PatchResult(artifact=artifact, warnings=warnings)


def adjust_speed(workspace: Workspace, network: Artifact, edge_id: str, new_speed_m_s: float) -> PatchResult:
    """Set the speed limit of one edge; nothing else changes."""
    if new_speed_m_s <= 0:
        raise NonPositiveSpeedError(f"speed must be positive, got {new_speed_m_s}")
    tree, root = _load(network)
    edge = _find_edge(root, edge_id)
    for lane in edge.findall("lane"):
        lane.set("speed", f"{new_speed_m_s:.2f}")
    fp = fingerprint(
        {
            "op": "adjust_speed",
            "network": network.content_hash,
            "edge": edge_id,
            "speed": round(new_speed_m_s, 2),
        }
    )
    artifact = _write_patch(workspace, tree, "network.speed.net.xml", fp)
    return PatchResult(artifact=artifact)


def reduce_lanes(
    runner: SubprocessRunner,
    workspace: Workspace,
    network: Artifact,
    edge_id: str,
    lanes_removed: int,
) -> PatchResult:
    """Decrease an edge's lane count via a netconvert patch pass."""
    if lanes_removed < 1:
        raise ValueError("lanes_removed must be >= 1")
    _, root = _load(network)
    edge = _find_edge(root, edge_id)
    current = len(edge.findall("lane"))
    remaining = current - lanes_removed
    if remaining < 1:
        raise WouldRemoveAllLanesError(
            f"edge {edge_id!r} has {current} lanes; removing {lanes_removed} would leave "
            "none (use road closure instead)"
        )

    fp = fingerprint(
        {
            "op": "reduce_lanes",
            "network": network.content_hash,
            "edge": edge_id,
            "remove": lanes_removed,
        }
    )
    reusable = workspace.find_reusable("network", fp)
    if reusable is not None:
        return PatchResult(artifact=reusable)

    patch_path = workspace.root / "policy" / f"reduce.{edge_id}.edg.xml"
    patch_path.parent.mkdir(exist_ok=True)
    patch_path.write_text(
        f'<edges>\n    <edge id="{edge_id}" numLanes="{remaining}"/>\n</edges>\n',
        encoding="utf-8",
    )

    out = workspace.root / "policy" / "network.reduced.net.xml"
    n = 2
    while out.exists():
        out = workspace.root / "policy" / f"network.{n}.reduced.net.xml"
        n += 1
    result = runner.run(
        SubprocessSpec(
            program="netconvert",
            argv=["-s", str(network.path), "-e", str(patch_path), "-o", str(out)],
            workspace=workspace,
            expected_artifacts=[("network", out)],
            input_fingerprint=fp,
        )
    )
    if result.exit_code != 0:
        raise ConversionFailureError(f"lane reduction failed:\n{result.stderr}")
    artifact = result.produced_artifacts[0]

    _, patched_root = _load(artifact)
    patched = len(_find_edge(patched_root, edge_id).findall("lane"))
    if patched != remaining:
        raise ConversionFailureError(
            f"expected {remaining} lanes on {edge_id!r} after patch, found {patched}"
        )
    return PatchResult(artifact=artifact)


# -- canonical comparison -------------------------------------------------------


def _canonical_element(element: ET.Element, drop_geometry: bool) -> str:
    attrs = {
        k: v
        for k, v in element.attrib.items()
        if not (drop_geometry and k in GEOMETRY_ATTRS)
    }
    parts = [element.tag, repr(sorted(attrs.items()))]
    for child in element:
        parts.append(_canonical_element(child, drop_geometry))
    return "(" + "|".join(parts) + ")"


def canonical_edge_diff(
    path_a: Path, path_b: Path, compare_geometry: bool = True, include_internal: bool = True
) -> list[str]:
    """Edge ids whose canonical form differs between two network files."""
    def edge_map(path: Path) -> dict[str, str]:
        root = ET.parse(path).getroot()
        result = {}
        for edge in root.iter("edge"):
            if not include_internal and edge.get("function") == "internal":
                continue
            result[edge.get("id")] = _canonical_element(edge, drop_geometry=not compare_geometry)
        return result

    edges_a, edges_b = edge_map(path_a), edge_map(path_b)
    differing = sorted(
        eid
        for eid in set(edges_a) | set(edges_b)
        if edges_a.get(eid) != edges_b.get(eid)
    )
    return differing


def _reachability(root: ET.Element, closed: set[str]) -> dict[str, set[str]]:
    """Forward-reachable edge sets over the connection graph, skipping closed edges."""
    graph: dict[str, set[str]] = {}
    for conn in root.iter("connection"):
        src, dst = conn.get("from"), conn.get("to")
        if src.startswith(":") or dst.startswith(":"):
            continue
        if src in closed or dst in closed:
            continue
        graph.setdefault(src, set()).add(dst)

    reachable: dict[str, set[str]] = {}
    for start in graph:
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in graph.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        reachable[start] = seen
    return reachable
