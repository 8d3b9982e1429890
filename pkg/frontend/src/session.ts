/** Client-side session model: a gap-free event list plus derived panels.
 *
 * All gating state derives from server events; the UI never invents its own.
 * Ingestion rejects out-of-order or gapped sequences, so a stream consumer
 * that reconnects and refetches from lastSeq converges to the server log.
 */

import type { ClarificationQuestion, GatewayEvent, PlanProposal } from "./types.js";

export class ViewSession {
  readonly sessionId: string;
  readonly events: GatewayEvent[] = [];
  pendingPlan: PlanProposal | null = null;
  pendingQuestions: ClarificationQuestion[] = [];

  constructor(sessionId: string) {
    this.sessionId = sessionId;
  }

  get lastSeq(): number {
    return this.events.length === 0 ? 0 : this.events[this.events.length - 1].seq;
  }

  /** Ingest one event; duplicates are dropped, gaps are an error. */
  ingest(event: GatewayEvent): boolean {
    if (event.seq <= this.lastSeq) return false;
    if (event.seq !== this.lastSeq + 1) {
      throw new Error(`event gap: have ${this.lastSeq}, got ${event.seq}`);
    }
    this.events.push(event);
    this.reduce(event);
    return true;
  }

  ingestAll(events: GatewayEvent[]): number {
    let accepted = 0;
    for (const event of events) {
      if (this.ingest(event)) accepted += 1;
    }
    return accepted;
  }

  private reduce(event: GatewayEvent): void {
    switch (event.kind) {
      case "clarification":
        this.pendingQuestions = (event.payload.questions ?? []) as ClarificationQuestion[];
        break;
      case "plan_preview": {
        const plan = event.payload.plan as PlanProposal;
        this.pendingQuestions = [];
        this.pendingPlan = plan.status === "awaiting_confirmation" ? plan : null;
        break;
      }
      case "agent_text":
      case "metrics_ready":
        // a final answer or results imply no plan is pending anymore
        if (this.pendingPlan !== null && event.kind === "agent_text") {
          this.pendingPlan = null;
        }
        break;
      default:
        break;
    }
  }
}

/** Pull loop over the finite SSE endpoint; resumable after disconnects. */
export class EventStream {
  private stopped = false;

  constructor(
    private readonly session: ViewSession,
    private readonly fetchEvents: (fromSeq: number) => Promise<GatewayEvent[]>,
    private readonly onUpdate: () => void,
    private readonly intervalMs: number = 500,
  ) {}

  async pollOnce(): Promise<number> {
    const batch = await this.fetchEvents(this.session.lastSeq);
    const accepted = this.session.ingestAll(batch);
    if (accepted > 0) this.onUpdate();
    return accepted;
  }

  async run(): Promise<void> {
    while (!this.stopped) {
      try {
        await this.pollOnce();
      } catch {
        // transient disconnect: resume from lastSeq on the next tick
      }
      await new Promise((resolve) => setTimeout(resolve, this.intervalMs));
    }
  }

  stop(): void {
    this.stopped = true;
  }
}
