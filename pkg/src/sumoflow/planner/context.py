"""Simulation-state context rendering and prompt assembly with cache keys.

The state context is a deterministic XML fragment injected into each turn's
dynamic prompt section. Static sections (protocol text plus the rendered
tool catalog) are hashed into a cache key: the key changes iff the static
bytes change, which is what the provider-side prompt cache keys on.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from ..mcp.messages import ToolDescriptor
from .conversation import ConversationTurn, SessionState

TEMPLATES_DIR = Path(__file__).resolve().parent / "templates"
DEFAULT_RUN_CAP = 10


def render_state_context(state: SessionState, run_cap: int = DEFAULT_RUN_CAP) -> str:
    """Deterministic simulation-state markup for prompt injection."""
    lines = [f"<simulation_state session={quoteattr(state.session_id)}>"]
    if not state.artifact_refs and not state.run_ids and not state.applied_policies and state.active_plan is None:
        lines.append("    <empty/>")
    for role in sorted(state.artifact_refs):
        ref = state.artifact_refs[role]
        lines.append(
            f"    <artifact role={quoteattr(role)} path={quoteattr(ref['path'])} "
            f"hash={quoteattr(ref['hash'][:16])}/>"
        )
    for policy in state.applied_policies:
        lines.append(f"    <applied_policy>{escape(json.dumps(policy, sort_keys=True))}</applied_policy>")
    shown = state.run_ids[-run_cap:]
    elided = len(state.run_ids) - len(shown)
    if elided > 0:
        lines.append(f"    <elided_runs count=\"{elided}\">{elided} earlier runs</elided_runs>")
    for run_id in shown:
        lines.append(f"    <run id={quoteattr(run_id)}/>")
    if state.active_plan is not None:
        lines.append(
            f"    <active_plan status={quoteattr(state.active_plan.status)} "
            f"steps=\"{len(state.active_plan.steps)}\"/>"
        )
    lines.append("</simulation_state>")
    return "\n".join(lines)


@dataclass
class PromptBundle:
    static_sections: list[str]
    dynamic_sections: list[str]
    cache_key: str = field(init=False)

    def __post_init__(self) -> None:
        digest = hashlib.sha256()
        for section in self.static_sections:
            digest.update(section.encode("utf-8"))
            digest.update(b"\x00")
        self.cache_key = digest.hexdigest()

    @property
    def static_bytes(self) -> int:
        return sum(len(s.encode("utf-8")) for s in self.static_sections)


def render_tool_catalog(tools: list[ToolDescriptor]) -> str:
    entries = [t.to_wire() for t in tools]
    return json.dumps(entries, sort_keys=True, indent=1)


def load_template(name: str, templates_dir: Path | None = None) -> str:
    return ((templates_dir or TEMPLATES_DIR) / name).read_text(encoding="utf-8")


def assemble_prompt(
    state: SessionState,
    history: list[ConversationTurn],
    tools: list[ToolDescriptor],
    complexity_level: str | None = None,
    history_cap: int = 50,
    run_cap: int = DEFAULT_RUN_CAP,
    templates_dir: Path | None = None,
) -> PromptBundle:
    """Static protocol+catalog sections plus dynamic state and history."""
    static_sections = [
        load_template("protocol.txt", templates_dir),
        render_tool_catalog(tools),
    ]
    dynamic_sections = [render_state_context(state, run_cap)]
    if complexity_level == "complex":
        dynamic_sections.append(load_template("complex_reasoning.txt", templates_dir))
    elif complexity_level == "agentic":
        dynamic_sections.append(load_template("agentic_reasoning.txt", templates_dir))
    recent = history[-history_cap:]
    dynamic_sections.append(
        json.dumps([{"role": t.role, "blocks": t.blocks} for t in recent], sort_keys=True)
    )
    return PromptBundle(static_sections=static_sections, dynamic_sections=dynamic_sections)
