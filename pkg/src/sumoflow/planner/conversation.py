"""Conversation turns and event-sourced session state.

Every state change flows through SessionState.apply_turn: the live engine
appends a turn and reduces it, so replaying the turn list from scratch
reconstructs the identical state. Turns carry typed blocks; tool results
reference the invocation that produced them.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .plan import PlanProposal

ROLES = ("user", "agent", "tool")
BLOCK_KINDS = (
    "text",
    "reasoning",
    "tool_invocation",
    "tool_result",
    "interpretation",
    "clarification",
    "plan",
    "plan_decision",
)


@dataclass
class ConversationTurn:
    role: str
    blocks: list[dict[str, Any]] = field(default_factory=list)
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        for block in self.blocks:
            if block.get("kind") not in BLOCK_KINDS:
                raise ValueError(f"unknown block kind {block.get('kind')!r}")

    def to_json(self) -> dict:
        return {"role": self.role, "blocks": self.blocks, "timestamp": self.timestamp}

    @classmethod
    def from_json(cls, data: dict) -> "ConversationTurn":
        return cls(role=data["role"], blocks=data["blocks"], timestamp=data.get("timestamp", 0.0))


def text_block(text: str) -> dict:
    return {"kind": "text", "text": text}


def reasoning_block(text: str) -> dict:
    return {"kind": "reasoning", "text": text}


def invocation_block(call_id: str, name: str, arguments: dict) -> dict:
    return {"kind": "tool_invocation", "call_id": call_id, "name": name, "arguments": arguments}


def result_block(call_id: str, name: str, result: dict) -> dict:
    return {"kind": "tool_result", "call_id": call_id, "name": name, "result": result}


@dataclass
class SessionState:
    """Re-derivable snapshot of one planning session."""

    session_id: str
    turns: list[ConversationTurn] = field(default_factory=list)
    artifact_refs: dict[str, dict] = field(default_factory=dict)  # role -> {path, hash}
    applied_policies: list[dict] = field(default_factory=list)
    run_ids: list[str] = field(default_factory=list)
    pending_intent: dict | None = None
    pending_questions: list[dict] = field(default_factory=list)
    active_plan: PlanProposal | None = None
    complexity: str | None = None

    # -- event sourcing -----------------------------------------------------

    def apply_turn(self, turn: ConversationTurn) -> None:
        """The single mutation path; replay folds this over the turn list."""
        self.turns.append(turn)
        for block in turn.blocks:
            kind = block["kind"]
            if kind == "interpretation":
                self.pending_intent = block["intent"]
                self.complexity = block["complexity"]["level"]
            elif kind == "clarification":
                self.pending_questions = block["questions"]
            elif kind == "plan":
                self.active_plan = PlanProposal.from_json(block["plan"])
                self.pending_questions = []
            elif kind == "plan_decision":
                if self.active_plan is not None:
                    self.active_plan.status = block["new_status"]
                if block["new_status"] == "rejected":
                    self.active_plan = None
            elif kind == "tool_result":
                result = block["result"]
                for content in result.get("content", []):
                    if content.get("type") == "artifact":
                        self.artifact_refs[content["role"]] = {
                            "path": content["path"],
                            "hash": content["hash"],
                        }
                    if content.get("type") == "structured":
                        value = content.get("value", {})
                        if isinstance(value, dict):
                            if "run_id" in value and value["run_id"] not in self.run_ids:
                                self.run_ids.append(value["run_id"])
                            if "applied_policy" in value:
                                self.applied_policies.append(value["applied_policy"])
            elif kind == "text" and turn.role == "user" and self.pending_intent is not None:
                answers = parse_slot_answers(block["text"])
                if answers is not None:
                    merged = dict(self.pending_intent.get("slots", {}))
                    merged.update(answers)
                    self.pending_intent = {**self.pending_intent, "slots": merged}

    def snapshot(self) -> dict:
        """Comparable view of the state (timestamps excluded by design)."""
        return {
            "session_id": self.session_id,
            "artifact_refs": self.artifact_refs,
            "applied_policies": self.applied_policies,
            "run_ids": self.run_ids,
            "pending_intent": self.pending_intent,
            "pending_questions": self.pending_questions,
            "active_plan": self.active_plan.to_json() if self.active_plan else None,
            "complexity": self.complexity,
        }

    @classmethod
    def replay(cls, session_id: str, turns: list[ConversationTurn]) -> "SessionState":
        state = cls(session_id=session_id)
        for turn in turns:
            state.apply_turn(turn)
        return state

    # -- integrity ------------------------------------------------------------

    def check_tool_result_references(self) -> None:
        seen_invocations = set()
        for turn in self.turns:
            for block in turn.blocks:
                if block["kind"] == "tool_invocation":
                    seen_invocations.add(block["call_id"])
                elif block["kind"] == "tool_result":
                    if block["call_id"] not in seen_invocations:
                        raise ValueError(
                            f"tool result {block['call_id']!r} references no prior invocation"
                        )

    # -- persistence -------------------------------------------------------------

    def save(self, path: Path) -> None:
        payload = {
            "session_id": self.session_id,
            "turns": [t.to_json() for t in self.turns],
        }
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        tmp.replace(path)

    @classmethod
    def load(cls, path: Path) -> "SessionState":
        payload = json.loads(path.read_text(encoding="utf-8"))
        turns = [ConversationTurn.from_json(t) for t in payload["turns"]]
        return cls.replay(payload["session_id"], turns)


def parse_slot_answers(text: str) -> dict | None:
    """Interpret a clarification reply: default acceptance or slot: value lines.

    Returns None when the text is not an answer (ordinary chat), the marker
    dict {"__accept_defaults__": True} for blanket acceptance, otherwise the
    parsed slot values.
    """
    stripped = text.strip().lower()
    if stripped in ("accept defaults", "use defaults", "defaults", "accept all defaults"):
        return {"__accept_defaults__": True}
    answers: dict[str, Any] = {}
    for line in text.splitlines():
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip()
        if not key or " " in key:
            continue
        value = value.strip()
        try:
            answers[key] = json.loads(value)
        except json.JSONDecodeError:
            answers[key] = value
    return answers or None
