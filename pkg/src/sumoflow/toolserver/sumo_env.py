"""SUMO installation discovery and the executable allowlist.

Binaries live in ``$SUMO_HOME/bin``; distributed helper scripts live under
``$SUMO_HOME/tools`` in a handful of subdirectories that have moved between
SUMO releases, so scripts are located by searching the known directories.
"""

from __future__ import annotations

import os
import shutil
from pathlib import Path

from ..errors import NotAllowlistedError

# Binaries the runner may execute, per the workflow's tool set.
ALLOWED_BINARIES = frozenset(
    {
        "netconvert",
        "netgenerate",
        "duarouter",
        "sumo",
        "polyconvert",
        "od2trips",
    }
)

# SUMO-distributed Python scripts the runner may execute.
ALLOWED_SCRIPTS = frozenset(
    {
        "osmGet.py",
        "randomTrips.py",
        "edgesInDistricts.py",
        "tlsCoordinator.py",
        "tlsCycleAdaptation.py",
        "attributeStats.py",
        "plot_net_dump.py",
        "plot_net_selection.py",
    }
)

_SCRIPT_SUBDIRS = ("", "output", "visualization", "district", "import/osm")


def find_sumo_home() -> Path | None:
    """Locate SUMO_HOME from the environment or the eclipse-sumo wheel."""
    env = os.environ.get("SUMO_HOME")
    if env and Path(env).is_dir():
        return Path(env)
    try:
        import sumo  # type: ignore[import-not-found]

        return Path(sumo.SUMO_HOME)
    except ImportError:
        return None


class SumoEnvironment:
    """Resolves allowlisted SUMO programs to absolute paths."""

    def __init__(self, sumo_home: Path | None = None):
        self.sumo_home = sumo_home or find_sumo_home()
        self._script_cache: dict[str, Path] = {}

    @property
    def available(self) -> bool:
        return self.sumo_home is not None and (self.sumo_home / "bin").is_dir()

    def binary(self, name: str) -> Path:
        """Absolute path of an allowlisted SUMO binary."""
        if name not in ALLOWED_BINARIES:
            raise NotAllowlistedError(f"binary {name!r} is not allowlisted")
        if self.sumo_home is not None:
            candidate = self.sumo_home / "bin" / name
            if candidate.exists():
                return candidate
        on_path = shutil.which(name)
        if on_path:
            return Path(on_path)
        raise NotAllowlistedError(f"binary {name!r} not found (is SUMO_HOME set?)")

    def script(self, name: str) -> Path:
        """Absolute path of an allowlisted SUMO-distributed script."""
        if name not in ALLOWED_SCRIPTS:
            raise NotAllowlistedError(f"script {name!r} is not allowlisted")
        if name in self._script_cache:
            return self._script_cache[name]
        if self.sumo_home is None:
            raise NotAllowlistedError(f"script {name!r} not found (is SUMO_HOME set?)")
        for sub in _SCRIPT_SUBDIRS:
            candidate = self.sumo_home / "tools" / sub / name
            if candidate.exists():
                self._script_cache[name] = candidate
                return candidate
        raise NotAllowlistedError(f"script {name!r} not found under {self.sumo_home}/tools")

    def subprocess_env(self) -> dict[str, str]:
        """Environment for SUMO subprocesses: SUMO_HOME plus a headless backend."""
        env = dict(os.environ)
        if self.sumo_home is not None:
            env["SUMO_HOME"] = str(self.sumo_home)
        env.setdefault("MPLBACKEND", "Agg")
        return env
