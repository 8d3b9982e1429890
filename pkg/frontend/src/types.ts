/** Wire types mirroring the gateway's event and plan payloads. */

export type EventKind =
  | "agent_text"
  | "clarification"
  | "plan_preview"
  | "tool_started"
  | "tool_finished"
  | "metrics_ready"
  | "error";

export interface GatewayEvent {
  seq: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface PlanStep {
  tool: string;
  args: Record<string, unknown>;
  note: string;
}

export type PlanStatus =
  | "draft"
  | "awaiting_confirmation"
  | "confirmed"
  | "rejected"
  | "executed";

export interface PlanProposal {
  inputs_summary: Record<string, unknown>;
  steps: PlanStep[];
  expected_outputs: string[];
  validation_checks: string[];
  assumptions: string[];
  status: PlanStatus;
}

export interface ClarificationQuestion {
  slot: string;
  question: string;
  default: unknown;
  assumption: string;
}

export interface ComparisonRow {
  metric: string;
  a: number;
  b: number;
  delta: number;
  percent_change: number | null;
  division_guard: boolean;
}

export type PlanDecision = "approve" | "reject" | "modify";

export interface SessionStatePanel {
  artifact_refs: Record<string, { path: string; hash: string }>;
  applied_policies: Record<string, unknown>[];
  run_ids: string[];
}
