import type { GatewayClient } from "../src/client.js";
import type { GatewayEvent, PlanDecision, PlanProposal } from "../src/types.js";

export function makePlan(status: PlanProposal["status"] = "awaiting_confirmation"): PlanProposal {
  return {
    inputs_summary: { spatial_scope: { place: "Teheran-ro, Seoul", radius_m: 2000 }, lanes_closed: 1 },
    steps: [
      { tool: "generate_network", args: {}, note: "build the road network" },
      { tool: "run_simulation", args: { label: "pre" }, note: "baseline run" },
      { tool: "reduce_lanes", args: { edge: "A1B1", lanes_removed: 1 }, note: "apply closure" },
      { tool: "run_simulation", args: { label: "post" }, note: "post run" },
    ],
    expected_outputs: ["paired runs (pre, post)"],
    validation_checks: ["both runs share demand, seed, and duration"],
    assumptions: [],
    status,
  };
}

export function event(seq: number, kind: GatewayEvent["kind"], payload: Record<string, unknown>): GatewayEvent {
  return { seq, kind, payload };
}

/** In-memory gateway double: a fixed server-side event log plus call counters. */
export class FakeClient implements GatewayClient {
  serverLog: GatewayEvent[] = [];
  decisionCalls: { decision: PlanDecision; edits: Record<string, unknown> }[] = [];
  messageCalls: string[] = [];
  failNextFetches = 0;

  async createSession(): Promise<string> {
    return "fake-session";
  }

  async postMessage(_sessionId: string, text: string): Promise<void> {
    this.messageCalls.push(text);
  }

  async postPlanDecision(
    _sessionId: string,
    decision: PlanDecision,
    edits: Record<string, unknown> = {},
  ): Promise<void> {
    this.decisionCalls.push({ decision, edits });
  }

  async fetchEvents(_sessionId: string, fromSeq: number): Promise<GatewayEvent[]> {
    if (this.failNextFetches > 0) {
      this.failNextFetches -= 1;
      throw new Error("simulated disconnect");
    }
    return this.serverLog.filter((entry) => entry.seq > fromSeq);
  }

  artifactUrl(hash: string): string {
    return `/artifacts/${hash}`;
  }
}
