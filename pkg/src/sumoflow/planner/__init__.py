from .complexity import TaskComplexity, classify_complexity, rule_classify
from .context import PromptBundle, assemble_prompt, render_state_context, render_tool_catalog
from .conversation import ConversationTurn, SessionState, parse_slot_answers
from .engine import PlannerEngine, PlannerEvent, parse_decision
from .llm import AgentMessage, HttpBackend, MockScriptBackend
from .plan import PlanProposal, PlanStep, propose_plan
from .sufficiency import (
    SCHEMAS,
    Intent,
    MissingParameter,
    ScenarioSchema,
    Slot,
    check_sufficiency,
    schema_for,
)

__all__ = [
    "AgentMessage",
    "ConversationTurn",
    "HttpBackend",
    "Intent",
    "MissingParameter",
    "MockScriptBackend",
    "PlanProposal",
    "PlanStep",
    "PlannerEngine",
    "PlannerEvent",
    "PromptBundle",
    "SCHEMAS",
    "ScenarioSchema",
    "SessionState",
    "Slot",
    "TaskComplexity",
    "assemble_prompt",
    "check_sufficiency",
    "classify_complexity",
    "parse_decision",
    "parse_slot_answers",
    "propose_plan",
    "render_state_context",
    "render_tool_catalog",
    "rule_classify",
    "schema_for",
]
