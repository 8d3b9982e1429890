/** Thin HTTP client for the gateway routes; the UI's only backend surface. */

import type { GatewayEvent, PlanDecision } from "./types.js";

export interface GatewayClient {
  createSession(sessionId?: string): Promise<string>;
  postMessage(sessionId: string, text: string): Promise<void>;
  postPlanDecision(
    sessionId: string,
    decision: PlanDecision,
    edits?: Record<string, unknown>,
  ): Promise<void>;
  fetchEvents(sessionId: string, fromSeq: number): Promise<GatewayEvent[]>;
  artifactUrl(hash: string): string;
}

export class HttpGatewayClient implements GatewayClient {
  constructor(private readonly baseUrl: string = "") {}

  async createSession(sessionId?: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ session_id: sessionId ?? null }),
    });
    if (!response.ok) throw new Error(`create session failed: ${response.status}`);
    const body = (await response.json()) as { session_id: string };
    return body.session_id;
  }

  async postMessage(sessionId: string, text: string): Promise<void> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/messages`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (!response.ok) throw new Error(`post message failed: ${response.status}`);
  }

  async postPlanDecision(
    sessionId: string,
    decision: PlanDecision,
    edits: Record<string, unknown> = {},
  ): Promise<void> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/plan-decision`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ decision, edits }),
    });
    if (!response.ok) throw new Error(`plan decision failed: ${response.status}`);
  }

  async fetchEvents(sessionId: string, fromSeq: number): Promise<GatewayEvent[]> {
    const response = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/events?from=${fromSeq}`,
    );
    if (!response.ok) throw new Error(`fetch events failed: ${response.status}`);
    return parseSse(await response.text());
  }

  artifactUrl(hash: string): string {
    return `${this.baseUrl}/artifacts/${hash}`;
  }
}

/** The gateway emits finite SSE bodies; each data: line is one event. */
export function parseSse(body: string): GatewayEvent[] {
  const events: GatewayEvent[] = [];
  for (const line of body.split("\n")) {
    if (line.startsWith("data: ")) {
      events.push(JSON.parse(line.slice("data: ".length)) as GatewayEvent);
    }
  }
  return events;
}
