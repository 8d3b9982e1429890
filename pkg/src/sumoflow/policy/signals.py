"""Signal-control optimizers wrapping the SUMO-distributed timing tools."""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from pathlib import Path

from ..errors import NoSignalsError, PolicyToolFailureError
from ..scenario.network import network_stats
from ..toolserver.runner import SubprocessRunner, SubprocessSpec
from ..toolserver.workspace import Artifact, Workspace, fingerprint

WEBSTER_MIN_CYCLE_S = 20
WEBSTER_MAX_CYCLE_S = 120


def apply_green_wave(
    runner: SubprocessRunner, workspace: Workspace, network: Artifact, routes: Artifact
) -> Artifact:
    """Corridor offset coordination; returns a signal-program additional file."""
    return _run_signal_tool(
        runner,
        workspace,
        network,
        routes,
        program="tlsCoordinator.py",
        extra_argv=[],
        op="green_wave",
    )


def apply_webster(
    runner: SubprocessRunner, workspace: Workspace, network: Artifact, routes: Artifact
) -> Artifact:
    """Cycle-length and phase-split adaptation via the distributed tool."""
    return _run_signal_tool(
        runner,
        workspace,
        network,
        routes,
        program="tlsCycleAdaptation.py",
        extra_argv=["--min-cycle", str(WEBSTER_MIN_CYCLE_S), "--max-cycle", str(WEBSTER_MAX_CYCLE_S)],
        op="webster",
    )


def _run_signal_tool(
    runner: SubprocessRunner,
    workspace: Workspace,
    network: Artifact,
    routes: Artifact,
    program: str,
    extra_argv: list[str],
    op: str,
) -> Artifact:
    stats = network_stats(network.path)
    if stats.signal_count == 0:
        raise NoSignalsError("network has no traffic lights")

    fp = fingerprint(
        {"op": op, "network": network.content_hash, "routes": routes.content_hash}
    )
    reusable = workspace.find_reusable("signal_program", fp)
    if reusable is not None:
        return reusable

    out = workspace.allocate("signal_program")
    result = runner.run(
        SubprocessSpec(
            program=program,
            argv=["-n", str(network.path), "-r", str(routes.path), "-o", str(out), *extra_argv],
            workspace=workspace,
        )
    )
    if result.exit_code != 0 or not out.exists():
        raise PolicyToolFailureError(f"{program} failed:\n{result.stderr or result.stdout}")

    _strip_comments(out)  # the tools stamp generation timestamps into comments
    programs = _validate_signal_ids(out, set(stats.signal_ids))
    if not programs:
        raise PolicyToolFailureError(
            f"{program} produced no signal programs (empty or unusable demand?)\n"
            f"{result.stderr or result.stdout}"
        )
    return workspace.register("signal_program", out, fp)


def _strip_comments(path: Path) -> None:
    text = path.read_text(encoding="utf-8")
    text = re.sub(r"<!--.*?-->\n?", "", text, flags=re.DOTALL)
    path.write_text(text, encoding="utf-8")


def _validate_signal_ids(path: Path, known_signals: set[str]) -> set[str]:
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise PolicyToolFailureError(f"signal tool output is not parseable XML: {exc}") from exc
    referenced = {t.get("id") for t in root.iter("tlLogic")}
    unknown = referenced - known_signals
    if unknown:
        raise PolicyToolFailureError(
            f"signal program references unknown signal ids: {sorted(unknown)}"
        )
    return referenced


def program_cycle_lengths(path: Path) -> dict[str, float]:
    """Cycle length (sum of phase durations) per signal program."""
    root = ET.parse(path).getroot()
    cycles = {}
    for logic in root.iter("tlLogic"):
        cycles[logic.get("id")] = sum(float(p.get("duration", 0)) for p in logic.findall("phase"))
    return cycles
