import os
from pathlib import Path

import pytest

from sumoflow.toolserver.runner import SubprocessRunner
from sumoflow.toolserver.sumo_env import SumoEnvironment, find_sumo_home
from sumoflow.toolserver.workspace import Workspace, WorkspaceManager

FIXTURES = Path(__file__).parent / "fixtures"

_home = find_sumo_home()
if _home is not None and "SUMO_HOME" not in os.environ:
    os.environ["SUMO_HOME"] = str(_home)

requires_sumo = pytest.mark.skipif(
    _home is None, reason="integration test requires a local SUMO installation"
)


@pytest.fixture()
def workspace(tmp_path) -> Workspace:
    return Workspace.load("test-session", tmp_path / "test-session")


@pytest.fixture()
def manager(tmp_path) -> WorkspaceManager:
    return WorkspaceManager(tmp_path / "sessions")


@pytest.fixture()
def sumo_env() -> SumoEnvironment:
    return SumoEnvironment()


@pytest.fixture()
def runner(sumo_env) -> SubprocessRunner:
    return SubprocessRunner(sumo=sumo_env, read_only_roots=[FIXTURES])


@pytest.fixture(scope="session")
def grid_net_path() -> Path:
    path = FIXTURES / "grid5.net.xml"
    assert path.exists(), "bundled grid fixture missing"
    return path
