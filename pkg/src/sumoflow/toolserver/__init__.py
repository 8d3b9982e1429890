from .registry import ToolRegistry
from .runner import SubprocessResult, SubprocessRunner, SubprocessSpec
from .sumo_env import SumoEnvironment, find_sumo_home
from .workspace import Artifact, Workspace, WorkspaceManager

__all__ = [
    "Artifact",
    "SubprocessResult",
    "SubprocessRunner",
    "SubprocessSpec",
    "SumoEnvironment",
    "ToolRegistry",
    "Workspace",
    "WorkspaceManager",
    "find_sumo_home",
]
