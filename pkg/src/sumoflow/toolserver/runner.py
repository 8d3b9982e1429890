"""Sandboxed execution of SUMO binaries and distributed scripts.

Every subprocess the system launches goes through SubprocessRunner.run, which
enforces the executable allowlist, keeps path arguments inside the session
workspace (plus declared read-only roots), records the exact command line in
the session manifest, and registers declared output artifacts on success.
XML outputs are canonicalized (comments stripped) before hashing because the
tools stamp generation timestamps into comment headers, which would make
otherwise identical outputs hash differently.

The runner counts spawns so tests can assert that validation failures and
artifact reuse cause zero launches.
"""

from __future__ import annotations

import re
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    MissingArtifactError,
    NotAllowlistedError,
    SandboxViolationError,
    SubprocessTimeoutError,
)
from .sumo_env import ALLOWED_BINARIES, ALLOWED_SCRIPTS, SumoEnvironment
from .workspace import Artifact, Workspace

DEFAULT_OUTPUT_CAP = 1 << 20  # bytes of stdout/stderr kept per stream


@dataclass
class SubprocessSpec:
    """One sandboxed command: an allowlisted program plus its arguments."""

    program: str
    argv: list[str]
    workspace: Workspace
    timeout: float = 300.0
    env_overrides: dict[str, str] = field(default_factory=dict)
    # (role, path) pairs that must exist after a zero exit
    expected_artifacts: list[tuple[str, Path]] = field(default_factory=list)
    input_fingerprint: str | None = None


@dataclass
class SubprocessResult:
    exit_code: int
    stdout: str
    stderr: str
    produced_artifacts: list[Artifact]


def _truncate(data: bytes, cap: int) -> str:
    if len(data) <= cap:
        return data.decode("utf-8", errors="replace")
    kept = data[:cap].decode("utf-8", errors="replace")
    return kept + f"\n... [truncated {len(data) - cap} bytes]"


class SubprocessRunner:
    """Launches allowlisted programs inside a session workspace."""

    def __init__(
        self,
        sumo: SumoEnvironment | None = None,
        output_cap: int = DEFAULT_OUTPUT_CAP,
        read_only_roots: list[Path] | None = None,
    ):
        self.sumo = sumo or SumoEnvironment()
        self.output_cap = output_cap
        self.read_only_roots = [Path(p).resolve() for p in (read_only_roots or [])]
        if self.sumo.sumo_home is not None:
            self.read_only_roots.append(self.sumo.sumo_home.resolve())
        self.spawn_count = 0

    # -- sandbox checks ----------------------------------------------------

    def _check_path_args(self, argv: list[str], workspace: Workspace) -> None:
        for token in argv:
            for part in token.split(","):
                if "/" not in part:
                    continue
                resolved = Path(part).expanduser().resolve()
                if workspace.contains(resolved):
                    continue
                if any(resolved.is_relative_to(root) for root in self.read_only_roots):
                    continue
                raise SandboxViolationError(
                    f"argument {part!r} resolves outside the session workspace"
                )

    def _resolve_program(self, program: str) -> list[str]:
        if program in ALLOWED_BINARIES:
            return [str(self.sumo.binary(program))]
        if program in ALLOWED_SCRIPTS:
            return [sys.executable, str(self.sumo.script(program))]
        raise NotAllowlistedError(f"program {program!r} is not allowlisted")

    # -- execution -----------------------------------------------------------

    def run(self, spec: SubprocessSpec) -> SubprocessResult:
        if spec.timeout <= 0:
            raise ValueError("timeout must be positive")
        command = self._resolve_program(spec.program) + spec.argv
        self._check_path_args(spec.argv, spec.workspace)
        spec.workspace.ensure_layout()

        env = self.sumo.subprocess_env()
        env.update(spec.env_overrides)

        self.spawn_count += 1
        started = time.monotonic()
        try:
            proc = subprocess.run(
                command,
                cwd=spec.workspace.root,
                env=env,
                capture_output=True,
                timeout=spec.timeout,
            )
        except subprocess.TimeoutExpired:
            self._discard_partial(spec)
            spec.workspace.record_command(command, -1, time.monotonic() - started)
            raise SubprocessTimeoutError(
                f"{spec.program} exceeded {spec.timeout}s and was killed"
            ) from None

        duration = time.monotonic() - started
        spec.workspace.record_command(command, proc.returncode, duration)
        stdout = _truncate(proc.stdout, self.output_cap)
        stderr = _truncate(proc.stderr, self.output_cap)

        produced: list[Artifact] = []
        if proc.returncode == 0:
            for role, path in spec.expected_artifacts:
                if not Path(path).exists():
                    raise MissingArtifactError(
                        f"{spec.program} exited 0 but expected {role} file {path} is absent"
                    )
                _canonicalize_xml(Path(path))
                produced.append(
                    spec.workspace.register(role, Path(path), spec.input_fingerprint)
                )
        return SubprocessResult(proc.returncode, stdout, stderr, produced)

    def _discard_partial(self, spec: SubprocessSpec) -> None:
        for _, path in spec.expected_artifacts:
            Path(path).unlink(missing_ok=True)


_COMMENT_RE = re.compile(rb"<!--.*?-->\r?\n?", re.DOTALL)


def _canonicalize_xml(path: Path) -> None:
    if path.suffix != ".xml":
        return
    data = path.read_bytes()
    stripped = _COMMENT_RE.sub(b"", data)
    if stripped != data:
        path.write_bytes(stripped)
