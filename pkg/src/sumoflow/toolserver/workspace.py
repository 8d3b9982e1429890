"""Per-session artifact workspaces.

A workspace is a directory tree ``<root>/<session>/{net,demand,policy,output,plots}``
plus a registry mapping artifact roles to files. Artifact identity is the
sha256 of the file bytes; the registry also remembers an input fingerprint per
artifact so tools can reuse an existing output instead of regenerating it when
the inputs are unchanged.

The registry is persisted as ``registry.json`` inside the session directory so
sessions survive process restarts.
"""

from __future__ import annotations

import hashlib
import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ArtifactNotFoundError, SandboxViolationError

SUBDIRS = ("net", "demand", "policy", "output", "plots")

# role -> (subdirectory, filename stem); versioned copies insert ".<n>" before
# the first dotted suffix, e.g. network.net.xml -> network.2.net.xml
ROLE_LAYOUT: dict[str, tuple[str, str]] = {
    "extract": ("net", "extract.osm.xml"),
    "network": ("net", "network.net.xml"),
    "zones": ("net", "zones.poly.xml"),
    "districts": ("net", "districts.taz.xml"),
    "trips": ("demand", "trips.trips.xml"),
    "routes": ("demand", "routes.rou.xml"),
    "od_matrix": ("demand", "matrix.od"),
    "signal_program": ("policy", "signals.add.xml"),
    "vtypes": ("policy", "vtypes.add.xml"),
    "config": ("net", "scenario.sumocfg"),
    "tripinfo": ("output", "tripinfo.xml"),
    "edgedata": ("output", "edgedata.xml"),
    "edgedata_def": ("output", "edgedata.add.xml"),
    "summary": ("output", "summary.xml"),
    "plot": ("plots", "plot.png"),
    "metrics": ("output", "metrics.json"),
}


def hash_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def fingerprint(payload: dict) -> str:
    """Stable hash over a tool's canonical inputs, for reuse decisions."""
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass
class Artifact:
    role: str
    path: Path
    content_hash: str
    created_at: float
    input_fingerprint: str | None = None

    def to_json(self) -> dict:
        return {
            "role": self.role,
            "path": str(self.path),
            "content_hash": self.content_hash,
            "created_at": self.created_at,
            "input_fingerprint": self.input_fingerprint,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Artifact":
        return cls(
            role=data["role"],
            path=Path(data["path"]),
            content_hash=data["content_hash"],
            created_at=data["created_at"],
            input_fingerprint=data.get("input_fingerprint"),
        )


@dataclass
class Workspace:
    """One session's artifact directory and registry."""

    session_id: str
    root: Path
    artifacts: list[Artifact] = field(default_factory=list)
    _seq: int = 0

    @property
    def registry_path(self) -> Path:
        return self.root / "registry.json"

    @property
    def manifest_path(self) -> Path:
        return self.root / "commands.jsonl"

    def ensure_layout(self) -> None:
        for sub in SUBDIRS:
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    # -- path discipline -------------------------------------------------

    def contains(self, path: Path) -> bool:
        try:
            path.resolve().relative_to(self.root.resolve())
            return True
        except ValueError:
            return False

    def require_inside(self, path: Path) -> Path:
        if not self.contains(path):
            raise SandboxViolationError(f"{path} is outside workspace {self.root}")
        return path

    def allocate(self, role: str) -> Path:
        """Next free path for a role, versioning the stem when taken."""
        sub, stem = ROLE_LAYOUT[role]
        base = self.root / sub / stem
        if not base.exists():
            return base
        n = 2
        first_dot = stem.index(".") if "." in stem else len(stem)
        while True:
            candidate = self.root / sub / f"{stem[:first_dot]}.{n}{stem[first_dot:]}"
            if not candidate.exists():
                return candidate
            n += 1

    # -- registry ---------------------------------------------------------

    def register(self, role: str, path: Path, input_fingerprint: str | None = None) -> Artifact:
        path = self.require_inside(Path(path))
        if not path.exists():
            raise ArtifactNotFoundError(f"cannot register missing file {path}")
        self._seq += 1
        artifact = Artifact(
            role=role,
            path=path,
            content_hash=hash_file(path),
            created_at=time.time() + self._seq * 1e-6,
            input_fingerprint=input_fingerprint,
        )
        self.artifacts.append(artifact)
        self.save()
        return artifact

    def resolve(self, role: str) -> Artifact:
        """Newest artifact for a role; never fabricates paths."""
        matches = [a for a in self.artifacts if a.role == role]
        if not matches:
            raise ArtifactNotFoundError(f"no artifact for role {role!r} in session {self.session_id}")
        return max(matches, key=lambda a: a.created_at)

    def try_resolve(self, role: str) -> Artifact | None:
        try:
            return self.resolve(role)
        except ArtifactNotFoundError:
            return None

    def by_hash(self, content_hash: str) -> Artifact | None:
        for artifact in reversed(self.artifacts):
            if artifact.content_hash == content_hash:
                return artifact
        return None

    def find_reusable(self, role: str, input_fp: str) -> Artifact | None:
        """Newest artifact for role whose inputs and bytes are both unchanged."""
        for artifact in sorted(self.artifacts, key=lambda a: a.created_at, reverse=True):
            if artifact.role != role or artifact.input_fingerprint != input_fp:
                continue
            if artifact.path.exists() and hash_file(artifact.path) == artifact.content_hash:
                return artifact
        return None

    def record_command(self, argv: list[str], exit_code: int, duration: float) -> None:
        with open(self.manifest_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"argv": argv, "exit_code": exit_code, "duration_s": round(duration, 3)}) + "\n")

    # -- persistence -------------------------------------------------------

    def save(self) -> None:
        payload = {
            "session_id": self.session_id,
            "artifacts": [a.to_json() for a in self.artifacts],
        }
        tmp = self.registry_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        tmp.replace(self.registry_path)

    @classmethod
    def load(cls, session_id: str, root: Path) -> "Workspace":
        ws = cls(session_id=session_id, root=root)
        if ws.registry_path.exists():
            payload = json.loads(ws.registry_path.read_text(encoding="utf-8"))
            ws.artifacts = [Artifact.from_json(a) for a in payload.get("artifacts", [])]
        ws.ensure_layout()
        return ws


_SESSION_ID_RE = re.compile(r"^[A-Za-z0-9_.-]{1,64}$")


class WorkspaceManager:
    """Creates and caches per-session workspaces under one root directory."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._open: dict[str, Workspace] = {}

    def open(self, session_id: str) -> Workspace:
        if not _SESSION_ID_RE.match(session_id):
            raise ValueError(f"invalid session id {session_id!r}")
        if session_id not in self._open:
            self._open[session_id] = Workspace.load(session_id, self.root / session_id)
        return self._open[session_id]

    def sessions(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())
