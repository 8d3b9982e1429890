"""Simulation configuration assembly.

The config references its inputs by path relative to the config file and
always requests the three analysis outputs (tripinfo, edge data, summary).
Output files share the config's version slot so paired scenarios (e.g.
pre/post intervention) never overwrite each other's results. Edge data
collection needs an additional-file definition, written alongside the config.
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path

from ..errors import DanglingReferenceError
from ..toolserver.workspace import Artifact, Workspace


def assemble_config(
    workspace: Workspace,
    network: Artifact,
    routes: Artifact,
    duration_s: float,
    seed: int,
    extra_additional: list[Artifact] | None = None,
    edgedata_period_s: float | None = None,
) -> Artifact:
    """Write a .sumocfg wiring network, routes, and output requests together."""
    for artifact in [network, routes, *(extra_additional or [])]:
        if not artifact.path.exists():
            raise DanglingReferenceError(
                f"config references missing {artifact.role}: {artifact.path}"
            )

    config_path = workspace.allocate("config")
    config_dir = config_path.parent
    output_dir = workspace.root / "output"
    output_dir.mkdir(exist_ok=True)

    slot = _version_slot(config_path.name)
    tripinfo = output_dir / f"tripinfo{slot}.xml"
    edgedata = output_dir / f"edgedata{slot}.xml"
    summary = output_dir / f"summary{slot}.xml"

    edgedata_def = output_dir / f"edgedata{slot}.add.xml"
    period_attr = f' period="{edgedata_period_s:.0f}"' if edgedata_period_s else ""
    edgedata_def.write_text(
        "<additional>\n"
        f'    <edgeData id="edge_metrics" file="{_rel(edgedata, edgedata_def.parent)}"{period_attr}/>\n'
        "</additional>\n",
        encoding="utf-8",
    )
    workspace.register("edgedata_def", edgedata_def)

    additional = [edgedata_def] + [a.path for a in (extra_additional or [])]
    additional_value = ",".join(_rel(p, config_dir) for p in additional)

    config_path.write_text(
        "<configuration>\n"
        "    <input>\n"
        f'        <net-file value="{_rel(network.path, config_dir)}"/>\n'
        f'        <route-files value="{_rel(routes.path, config_dir)}"/>\n'
        f'        <additional-files value="{additional_value}"/>\n'
        "    </input>\n"
        "    <time>\n"
        '        <begin value="0"/>\n'
        f'        <end value="{duration_s:.0f}"/>\n'
        "    </time>\n"
        "    <output>\n"
        f'        <tripinfo-output value="{_rel(tripinfo, config_dir)}"/>\n'
        f'        <summary-output value="{_rel(summary, config_dir)}"/>\n'
        "    </output>\n"
        "    <random_number>\n"
        f'        <seed value="{seed}"/>\n'
        "    </random_number>\n"
        "    <processing>\n"
        '        <time-to-teleport value="300"/>\n'
        '        <device.emissions.probability value="1"/>\n'
        "    </processing>\n"
        "    <report>\n"
        '        <no-step-log value="true"/>\n'
        "    </report>\n"
        "</configuration>\n",
        encoding="utf-8",
    )
    artifact = workspace.register("config", config_path)
    _note_outputs(workspace, config_path, tripinfo, edgedata, summary)
    return artifact


def _version_slot(config_name: str) -> str:
    match = re.match(r"scenario\.(\d+)\.sumocfg$", config_name)
    return f".{match.group(1)}" if match else ""


def _rel(path: Path, base: Path) -> str:
    return os.path.relpath(path, base)


def _note_outputs(
    workspace: Workspace, config: Path, tripinfo: Path, edgedata: Path, summary: Path
) -> None:
    notes_path = workspace.root / "config_outputs.json"
    notes = {}
    if notes_path.exists():
        notes = json.loads(notes_path.read_text(encoding="utf-8"))
    notes[str(config)] = {
        "tripinfo": str(tripinfo),
        "edgedata": str(edgedata),
        "summary": str(summary),
    }
    notes_path.write_text(json.dumps(notes, indent=2), encoding="utf-8")


def config_outputs(workspace: Workspace, config: Artifact) -> dict[str, Path]:
    """Output paths a config will write, as recorded at assembly time."""
    notes_path = workspace.root / "config_outputs.json"
    if not notes_path.exists():
        raise DanglingReferenceError("no output notes recorded for this workspace")
    notes = json.loads(notes_path.read_text(encoding="utf-8"))
    entry = notes.get(str(config.path))
    if entry is None:
        raise DanglingReferenceError(f"no output notes for config {config.path}")
    return {role: Path(p) for role, p in entry.items()}
