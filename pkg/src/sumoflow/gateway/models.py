"""Request/response models for the HTTP gateway."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    session_id: str | None = Field(default=None, description="Optional explicit id; generated when omitted.")


class CreateSessionResponse(BaseModel):
    session_id: str


class PostMessageRequest(BaseModel):
    text: str = Field(min_length=1)


class PlanDecisionRequest(BaseModel):
    decision: Literal["approve", "reject", "modify"]
    edits: dict[str, Any] = Field(default_factory=dict)


class EventModel(BaseModel):
    seq: int
    kind: str
    payload: dict[str, Any]


class EventsResponse(BaseModel):
    events: list[EventModel]


class SessionStateResponse(BaseModel):
    session_id: str
    artifact_refs: dict[str, dict]
    applied_policies: list[dict]
    run_ids: list[str]
    pending_intent: dict | None
    pending_questions: list[dict]
    active_plan: dict | None
    complexity: str | None


class RunMetricsResponse(BaseModel):
    run_id: str
    metrics: list[dict]


class ErrorResponse(BaseModel):
    detail: str
