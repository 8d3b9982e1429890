"""Spatial metric plots via the SUMO-distributed visualization scripts.

The dump plotter writes one image per measurement interval, so edge data is
collapsed to a single whole-horizon interval (sampledSeconds-weighted means)
before plotting; the output name then stays deterministic per metric.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from ..errors import PlotFailureError
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint


def plot_edge_metric(
    runner: SubprocessRunner,
    workspace: Workspace,
    network: Artifact,
    edgedata: Artifact,
    metric: str = "density",
) -> Artifact:
    """Render a per-edge heatmap image for one metric of one run."""
    if not network.path.exists() or not edgedata.path.exists():
        raise PlotFailureError("network or edge data artifact missing")

    fp = fingerprint(
        {
            "op": "plot_edge_metric",
            "network": network.content_hash,
            "edgedata": edgedata.content_hash,
            "metric": metric,
        }
    )
    reusable = workspace.find_reusable("plot", fp)
    if reusable is not None:
        return reusable

    collapsed = workspace.root / "plots" / f"{edgedata.path.stem}.collapsed.xml"
    collapsed.parent.mkdir(exist_ok=True)
    _collapse_intervals(edgedata.path, collapsed)

    out = workspace.root / "plots" / f"{metric}.png"
    n = 2
    while out.exists():
        out = workspace.root / "plots" / f"{metric}.{n}.png"
        n += 1
    result = runner.run(
        SubprocessSpec(
            program="plot_net_dump.py",
            argv=[
                "-n", str(network.path),
                "-i", f"{collapsed},{collapsed}",
                "-m", f"{metric},{metric}",
                "--blind",
                "-o", str(out),
            ],
            workspace=workspace,
        )
    )
    if result.exit_code != 0:
        raise PlotFailureError(f"plot script failed:\n{result.stderr or result.stdout}")
    if not out.exists() or out.stat().st_size == 0:
        raise PlotFailureError("plot script produced no image")
    return workspace.register("plot", out, fp)


def _collapse_intervals(source: Path, target: Path) -> None:
    root = ET.parse(source).getroot()
    intervals = root.findall("interval")
    if not intervals:
        raise PlotFailureError("edge data carries no intervals")
    begin = min(float(i.get("begin", 0)) for i in intervals)
    end = max(float(i.get("end", 0)) for i in intervals)

    # weight per-interval values by sampledSeconds so short tails don't dominate
    sums: dict[str, dict[str, float]] = {}
    weights: dict[str, float] = {}
    attrs = ("density", "occupancy", "speed")
    for interval in intervals:
        for edge in interval.findall("edge"):
            eid = edge.get("id")
            weight = float(edge.get("sampledSeconds", 1.0) or 1.0)
            bucket = sums.setdefault(eid, {a: 0.0 for a in attrs})
            for attr in attrs:
                raw = edge.get(attr)
                if raw is not None:
                    bucket[attr] += float(raw) * weight
            weights[eid] = weights.get(eid, 0.0) + weight

    merged = ET.Element("meandata")
    out_interval = ET.SubElement(
        merged, "interval", {"id": "collapsed", "begin": f"{begin:.2f}", "end": f"{end:.2f}"}
    )
    for eid in sorted(sums):
        weight = weights[eid] or 1.0
        ET.SubElement(
            out_interval,
            "edge",
            {
                "id": eid,
                **{a: f"{sums[eid][a] / weight:.4f}" for a in attrs},
            },
        )
    ET.ElementTree(merged).write(target, encoding="unicode")
