"""Simulation execution and output registration.

The summary output carries a wall-clock profiling column that differs
between otherwise identical runs; it is scrubbed before registration so
artifact hashes reflect simulation content only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import MissingArtifactError, SimulationFailureError, SubprocessTimeoutError
from ..scenario.config import config_outputs
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint

_WALL_CLOCK_ATTR = re.compile(r'\s+duration="-?\d+"')


@dataclass
class SimulationOutputs:
    tripinfo: Artifact
    edgedata: Artifact
    summary: Artifact

    def hashes(self) -> dict[str, str]:
        return {
            "tripinfo": self.tripinfo.content_hash,
            "edgedata": self.edgedata.content_hash,
            "summary": self.summary.content_hash,
        }


def run_simulation(
    runner: SubprocessRunner,
    workspace: Workspace,
    config: Artifact,
    timeout_s: float = 600.0,
) -> SimulationOutputs:
    """Run the simulator on an assembled config; registers the three outputs."""
    outputs = config_outputs(workspace, config)
    fp = fingerprint({"op": "run_simulation", "config": config.content_hash})
    try:
        result = runner.run(
            SubprocessSpec(
                program="sumo",
                argv=["-c", str(config.path)],
                workspace=workspace,
                timeout=timeout_s,
            )
        )
    except SubprocessTimeoutError:
        for path in outputs.values():
            Path(path).unlink(missing_ok=True)
        raise
    if result.exit_code != 0:
        raise SimulationFailureError(f"sumo exited {result.exit_code}:\n{result.stderr}")

    registered: dict[str, Artifact] = {}
    for role, path in outputs.items():
        path = Path(path)
        if not path.exists():
            raise MissingArtifactError(f"sumo exited 0 but {role} output {path} is absent")
        _scrub(path, wall_clock=role == "summary")
        registered[role] = workspace.register(role, path, fp)
    return SimulationOutputs(
        tripinfo=registered["tripinfo"],
        edgedata=registered["edgedata"],
        summary=registered["summary"],
    )


_COMMENT = re.compile(r"<!--.*?-->\r?\n?", re.DOTALL)


def _scrub(path: Path, wall_clock: bool) -> None:
    text = path.read_text(encoding="utf-8")
    cleaned = _COMMENT.sub("", text)
    if wall_clock:
        cleaned = _WALL_CLOCK_ATTR.sub("", cleaned)
    if cleaned != text:
        path.write_text(cleaned, encoding="utf-8")
