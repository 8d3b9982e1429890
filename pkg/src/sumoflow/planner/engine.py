"""The interactive planning loop.

step() drives classify -> sufficiency -> (clarify | plan) -> confirm ->
execute -> summarize. The protocol also lives in the prompt, but the host
enforces it as a state machine: a side-effecting tool only ever executes
while the active plan is confirmed and lists that tool, no matter what the
model asks for. Violations become correction turns the model sees next.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from ..errors import (
    EmptyQueryError,
    NoPendingPlanError,
    ProviderError,
    SchemaViolationError,
    SumoflowError,
    UnknownToolError,
)
from ..mcp.messages import ToolResult, validate_args
from ..toolserver.registry import ToolRegistry
from .complexity import TaskComplexity, classify_complexity, rule_classify
from .context import assemble_prompt
from .conversation import (
    ConversationTurn,
    SessionState,
    invocation_block,
    reasoning_block,
    result_block,
    text_block,
)
from .plan import PlanProposal, propose_plan
from .sufficiency import Intent, MissingParameter, check_sufficiency, schema_for

log = logging.getLogger(__name__)

EVENT_KINDS = (
    "agent_text",
    "clarification",
    "plan_preview",
    "tool_started",
    "tool_finished",
    "metrics_ready",
    "error",
)

MAX_AGENT_TURNS = 40


@dataclass
class PlannerEvent:
    kind: str
    payload: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"kind": self.kind, "payload": self.payload}


def parse_decision(text: str) -> tuple[str, dict] | None:
    """(decision, edits) for approve/reject/modify messages, else None."""
    stripped = text.strip()
    lowered = stripped.lower()
    if lowered in ("approve", "yes", "y", "ok", "confirm", "approved"):
        return "approve", {}
    if lowered in ("reject", "no", "n", "cancel", "rejected"):
        return "reject", {}
    if lowered.startswith("modify"):
        _, _, rest = stripped.partition(":")
        edits: dict[str, Any] = {}
        if rest.strip():
            try:
                edits = json.loads(rest)
            except json.JSONDecodeError:
                for line in rest.split(";"):
                    if ":" in line:
                        key, _, value = line.partition(":")
                        try:
                            edits[key.strip()] = json.loads(value.strip())
                        except json.JSONDecodeError:
                            edits[key.strip()] = value.strip()
        return "modify", edits
    return None


class PlannerEngine:
    """Single-writer planning loop for one session."""

    def __init__(
        self,
        state: SessionState,
        registry: ToolRegistry,
        backend,
        clock: Callable[[], float] = time.time,
        max_agent_turns: int = MAX_AGENT_TURNS,
        on_event: Callable[[PlannerEvent], None] | None = None,
        history_cap: int = 50,
        state_context_cap: int = 10,
        templates_dir=None,
    ):
        self.state = state
        self.registry = registry
        self.backend = backend
        self.clock = clock
        self.max_agent_turns = max_agent_turns
        self.on_event = on_event
        self.history_cap = history_cap
        self.state_context_cap = state_context_cap
        self.templates_dir = templates_dir

    def _emit(self, events: list[PlannerEvent], event: PlannerEvent) -> None:
        events.append(event)
        if self.on_event is not None:
            self.on_event(event)

    # -- public entry points -----------------------------------------------------

    def step(self, user_text: str) -> list[PlannerEvent]:
        """Process one user message into agent events; never raises on tool/LLM errors."""
        if not user_text or not user_text.strip():
            raise EmptyQueryError("empty user message")
        events: list[PlannerEvent] = []

        plan = self.state.active_plan
        if plan is not None and plan.status == "awaiting_confirmation":
            decision = parse_decision(user_text)
            self._apply(ConversationTurn("user", [text_block(user_text)], self.clock()))
            if decision is None:
                self._emit(events, 
                    PlannerEvent(
                        "clarification",
                        {
                            "questions": [
                                {
                                    "slot": "plan_decision",
                                    "question": "A plan is awaiting your decision: approve, reject, or modify?",
                                    "default": "approve",
                                    "assumption": "no execution until you decide",
                                }
                            ]
                        },
                    )
                )
                return events
            self._handle_decision(decision[0], decision[1], events)
            return events

        self._apply(ConversationTurn("user", [text_block(user_text)], self.clock()))

        if self.state.pending_intent is not None and self.state.pending_questions:
            # the reducer merged the user's answers into the pending intent
            self._resume_from_answers(events)
            return events

        self._interpret_and_plan(user_text, events)
        return events

    def decide_plan(self, decision: str, edits: dict | None = None) -> list[PlannerEvent]:
        """Structured plan decision (gateway path); same transitions as chat."""
        plan = self.state.active_plan
        if plan is None or plan.status != "awaiting_confirmation":
            raise NoPendingPlanError("no plan awaiting confirmation")
        events: list[PlannerEvent] = []
        self._apply(
            ConversationTurn("user", [text_block(f"[plan decision] {decision}")], self.clock())
        )
        self._handle_decision(decision, edits or {}, events)
        return events

    # -- intake --------------------------------------------------------------------

    def _interpret_and_plan(self, user_text: str, events: list[PlannerEvent]) -> None:
        try:
            message = self._llm({"role": "user", "text": user_text})
        except ProviderError as exc:
            # interpretation falls back to rules; note the degradation
            log.warning("interpretation provider failed: %s", exc)
            message = None

        suggestion = message.classification if message else None
        complexity = classify_complexity(user_text, suggestion)
        intent_dict = self._validated_intent(message.intent if message else None, user_text)

        self._apply(
            ConversationTurn(
                "agent",
                [
                    {
                        "kind": "interpretation",
                        "intent": intent_dict,
                        "complexity": {"level": complexity.level, "rationale": complexity.rationale},
                    }
                ],
                self.clock(),
            )
        )

        intent = Intent(
            task_family=intent_dict["task_family"],
            slots=dict(intent_dict.get("slots", {})),
            query=user_text,
        )
        missing = check_sufficiency(intent)
        if missing:
            self._emit_clarification(missing, events)
            return
        self._propose(intent, complexity, events)

    def _validated_intent(self, intent: dict | None, query: str) -> dict:
        if isinstance(intent, dict) and intent.get("task_family") in (
            "simple_simulation",
            "policy_comparison",
            "ev_adoption",
            "event_management",
        ):
            slots = intent.get("slots")
            return {
                "task_family": intent["task_family"],
                "slots": dict(slots) if isinstance(slots, dict) else {},
            }
        return {"task_family": _fallback_family(query), "slots": {}}

    def _resume_from_answers(self, events: list[PlannerEvent]) -> None:
        pending = self.state.pending_intent
        slots = dict(pending.get("slots", {}))
        accept_defaults = slots.pop("__accept_defaults__", False)
        intent = Intent(task_family=pending["task_family"], slots=slots, query=pending.get("query", ""))
        schema = schema_for(intent.task_family)
        if accept_defaults:
            intent = intent.merged_with_defaults(schema)
        missing = check_sufficiency(intent, schema)
        if missing:
            self._emit_clarification(missing, events)
            return
        level = self.state.complexity or rule_classify(intent.query or "request").level
        complexity = TaskComplexity(level, "carried over from interpretation")
        # persist the resolved slots before planning
        self._apply(
            ConversationTurn(
                "agent",
                [
                    {
                        "kind": "interpretation",
                        "intent": {"task_family": intent.task_family, "slots": intent.slots},
                        "complexity": {"level": complexity.level, "rationale": complexity.rationale},
                    }
                ],
                self.clock(),
            )
        )
        self._propose(intent, complexity, events)

    def _emit_clarification(self, missing: list[MissingParameter], events: list[PlannerEvent]) -> None:
        questions = [
            {
                "slot": m.slot,
                "question": m.question,
                "default": m.default,
                "assumption": m.assumption,
            }
            for m in missing
        ]
        self._apply(
            ConversationTurn("agent", [{"kind": "clarification", "questions": questions}], self.clock())
        )
        self._emit(events, PlannerEvent("clarification", {"questions": questions}))

    # -- planning --------------------------------------------------------------------

    def _propose(self, intent: Intent, complexity: TaskComplexity, events: list[PlannerEvent]) -> None:
        try:
            plan = propose_plan(intent, complexity, self.registry)
        except SumoflowError as exc:
            self._emit(events, PlannerEvent("error", {"message": str(exc)}))
            return
        if plan.status == "draft":
            plan.transition("awaiting_confirmation")
        self._apply(
            ConversationTurn("agent", [{"kind": "plan", "plan": plan.to_json()}], self.clock())
        )
        self._emit(events, PlannerEvent("plan_preview", {"plan": plan.to_json()}))
        if plan.status == "confirmed":
            self._execute(events)

    def _handle_decision(self, decision: str, edits: dict, events: list[PlannerEvent]) -> None:
        if decision == "approve":
            self._apply(
                ConversationTurn(
                    "agent", [{"kind": "plan_decision", "new_status": "confirmed"}], self.clock()
                )
            )
            self._emit(events, PlannerEvent("plan_preview", {"plan": self.state.active_plan.to_json()}))
            self._execute(events)
        elif decision == "reject":
            self._apply(
                ConversationTurn(
                    "agent", [{"kind": "plan_decision", "new_status": "rejected"}], self.clock()
                )
            )
            self._emit(events, PlannerEvent("agent_text", {"text": "Plan rejected; nothing was executed."}))
        elif decision == "modify":
            pending = self.state.pending_intent or {}
            slots = dict(pending.get("slots", {}))
            slots.update(edits)
            intent = Intent(task_family=pending.get("task_family", "simple_simulation"), slots=slots)
            self._apply(
                ConversationTurn(
                    "agent", [{"kind": "plan_decision", "new_status": "rejected"}], self.clock()
                )
            )
            self._apply(
                ConversationTurn(
                    "agent",
                    [
                        {
                            "kind": "interpretation",
                            "intent": {"task_family": intent.task_family, "slots": intent.slots},
                            "complexity": {
                                "level": self.state.complexity or "complex",
                                "rationale": "plan modification",
                            },
                        }
                    ],
                    self.clock(),
                )
            )
            missing = check_sufficiency(intent)
            if missing:
                self._emit_clarification(missing, events)
                return
            level = self.state.complexity or "complex"
            self._propose(intent, TaskComplexity(level, "plan modification"), events)
        else:
            raise NoPendingPlanError(f"unknown decision {decision!r}")

    # -- execution ----------------------------------------------------------------------

    def _execute(self, events: list[PlannerEvent]) -> None:
        for _ in range(self.max_agent_turns):
            try:
                message = self._llm(self._last_message_view())
            except ProviderError as exc:
                self._emit(events, PlannerEvent("error", {"message": str(exc), "recoverable": True}))
                return

            blocks: list[dict] = []
            if message.reasoning:
                blocks.append(reasoning_block(message.reasoning))
            if message.text:
                blocks.append(text_block(message.text))
            calls = []
            for index, call in enumerate(message.tool_calls):
                call_id = f"call_{len(self.state.turns)}_{index}"
                calls.append((call_id, call.get("name", ""), call.get("arguments") or {}))
                blocks.append(invocation_block(call_id, call.get("name", ""), call.get("arguments") or {}))
            self._apply(ConversationTurn("agent", blocks, self.clock()))

            if not calls:
                self._emit(events, PlannerEvent("agent_text", {"text": message.text}))
                plan = self.state.active_plan
                if plan is not None and plan.status == "confirmed":
                    self._apply(
                        ConversationTurn(
                            "agent", [{"kind": "plan_decision", "new_status": "executed"}], self.clock()
                        )
                    )
                return

            result_blocks = []
            for call_id, name, args in calls:
                result = self._gated_call(name, args, events)
                result_blocks.append(result_block(call_id, name, result.to_wire()))
            self._apply(ConversationTurn("tool", result_blocks, self.clock()))

        self._emit(events, 
            PlannerEvent("error", {"message": f"agent loop exceeded {self.max_agent_turns} turns"})
        )

    def _gated_call(self, name: str, args: dict, events: list[PlannerEvent]) -> ToolResult:
        """Execution gate: schema validity and plan coverage, checked host-side."""
        try:
            descriptor = self.registry.get(name)
        except UnknownToolError as exc:
            self._emit(events, PlannerEvent("error", {"message": str(exc), "tool": name}))
            return ToolResult.failure(f"correction: {exc}")
        try:
            validate_args(descriptor, args)
        except SchemaViolationError as exc:
            self._emit(events, 
                PlannerEvent(
                    "error",
                    {"message": "tool arguments failed schema validation", "tool": name,
                     "violations": exc.violations},
                )
            )
            return ToolResult.failure(f"correction: malformed tool call: {exc}")

        plan = self.state.active_plan
        if descriptor.side_effecting and (plan is None or not plan.allows_tool(name)):
            status = plan.status if plan is not None else "absent"
            self._emit(events, 
                PlannerEvent(
                    "error",
                    {
                        "message": f"refused side-effecting tool {name!r}: no confirmed plan covers it",
                        "tool": name,
                        "plan_status": status,
                    },
                )
            )
            return ToolResult.failure(
                f"correction: {name} is side-effecting and the active plan "
                f"(status: {status}) does not authorize it; confirm a plan first"
            )

        self._emit(events, PlannerEvent("tool_started", {"tool": name, "args": args}))
        result = self.registry.call(name, args)
        self._emit(events, 
            PlannerEvent(
                "tool_finished",
                {"tool": name, "is_error": result.is_error, "content": result.content},
            )
        )
        for block in result.content:
            if block.get("type") == "structured" and isinstance(block.get("value"), dict):
                if "metrics" in block["value"] or "comparison" in block["value"]:
                    self._emit(events, PlannerEvent("metrics_ready", {"tool": name, "value": block["value"]}))
        return result

    # -- plumbing -----------------------------------------------------------------------

    def _apply(self, turn: ConversationTurn) -> None:
        self.state.apply_turn(turn)

    def _llm(self, last_message: dict):
        bundle = assemble_prompt(
            self.state,
            self.state.turns,
            self.registry.descriptors(),
            complexity_level=self.state.complexity,
            history_cap=self.history_cap,
            run_cap=self.state_context_cap,
            templates_dir=self.templates_dir,
        )
        return self.backend.complete(bundle, last_message)

    def _last_message_view(self) -> dict:
        if not self.state.turns:
            return {"role": "user", "text": ""}
        turn = self.state.turns[-1]
        return {"role": turn.role, "blocks": turn.blocks}


def _fallback_family(query: str) -> str:
    text = query.lower()
    if "electric" in text or "ev " in text or "emission" in text:
        return "ev_adoption"
    if ("lane" in text and ("clos" in text or "construction" in text)) or "road closure" in text:
        return "policy_comparison"
    if "event" in text or "egress" in text or "spectator" in text:
        return "event_management"
    return "simple_simulation"
