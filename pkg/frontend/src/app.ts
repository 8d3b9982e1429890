/** Application shell: composes the panels over one gateway session.
 *
 * The composer is the only way to cause execution, and it is disabled
 * whenever a plan awaits a decision; the card's three buttons are the sole
 * affordances in that state (the server enforces the same rule).
 */

import { HttpGatewayClient, type GatewayClient } from "./client.js";
import { EventStream, ViewSession } from "./session.js";
import { renderClarification } from "./views/clarification.js";
import { renderConversation } from "./views/conversation.js";
import { renderMetricsTable, renderDensityImage } from "./views/metrics.js";
import { renderPlanCard } from "./views/plan_card.js";
import type { ComparisonRow, GatewayEvent } from "./types.js";

export interface AppElements {
  conversation: HTMLElement;
  sidebar: HTMLElement;
  composer: HTMLFormElement;
  input: HTMLInputElement;
  send: HTMLButtonElement;
}

export class App {
  readonly session: ViewSession;
  private readonly stream: EventStream;

  constructor(
    private readonly client: GatewayClient,
    sessionId: string,
    private readonly elements: AppElements,
  ) {
    this.session = new ViewSession(sessionId);
    this.stream = new EventStream(
      this.session,
      (fromSeq) => this.client.fetchEvents(sessionId, fromSeq),
      () => this.render(),
    );
    this.elements.composer.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.sendMessage();
    });
  }

  start(): void {
    void this.stream.run();
    this.render();
  }

  stop(): void {
    this.stream.stop();
  }

  async sendMessage(): Promise<void> {
    const text = this.elements.input.value.trim();
    if (!text || this.session.pendingPlan !== null) return;
    this.elements.input.value = "";
    await this.client.postMessage(this.session.sessionId, text);
    await this.stream.pollOnce();
  }

  render(): void {
    const { conversation, sidebar, input, send } = this.elements;
    conversation.replaceChildren(renderConversation(this.session.events));
    sidebar.replaceChildren();

    const planPending = this.session.pendingPlan !== null;
    input.disabled = planPending;
    send.disabled = planPending;

    if (planPending) {
      sidebar.appendChild(
        renderPlanCard(this.session.pendingPlan!, {
          onDecision: (decision, edits) => {
            void this.client
              .postPlanDecision(this.session.sessionId, decision, edits)
              .then(() => this.stream.pollOnce());
          },
        }),
      );
    } else if (this.session.pendingQuestions.length > 0) {
      sidebar.appendChild(
        renderClarification(this.session.pendingQuestions, {
          onSubmit: (message) => {
            void this.client
              .postMessage(this.session.sessionId, message)
              .then(() => this.stream.pollOnce());
          },
        }),
      );
    }

    const comparison = latestComparison(this.session.events);
    if (comparison !== null) {
      sidebar.appendChild(renderMetricsTable(comparison));
    }
    const plotHash = latestPlotHash(this.session.events);
    if (plotHash !== null) {
      sidebar.appendChild(renderDensityImage(plotHash, (hash) => this.client.artifactUrl(hash)));
    }
  }
}

export function latestComparison(events: GatewayEvent[]): ComparisonRow[] | null {
  for (let index = events.length - 1; index >= 0; index -= 1) {
    const event = events[index];
    if (event.kind !== "metrics_ready") continue;
    const value = event.payload.value as { comparison?: ComparisonRow[] } | undefined;
    if (value?.comparison) return value.comparison;
  }
  return null;
}

export function latestPlotHash(events: GatewayEvent[]): string | null {
  for (let index = events.length - 1; index >= 0; index -= 1) {
    const event = events[index];
    if (event.kind !== "tool_finished" || event.payload.is_error) continue;
    const content = (event.payload.content ?? []) as { type?: string; role?: string; hash?: string }[];
    for (const block of content) {
      if (block.type === "artifact" && block.role === "plot" && block.hash) {
        return block.hash;
      }
    }
  }
  return null;
}

export async function boot(baseUrl = ""): Promise<App> {
  const client = new HttpGatewayClient(baseUrl);
  const sessionId = await client.createSession();
  const app = new App(client, sessionId, {
    conversation: document.getElementById("conversation")!,
    sidebar: document.getElementById("sidebar")!,
    composer: document.getElementById("composer") as HTMLFormElement,
    input: document.getElementById("message-input") as HTMLInputElement,
    send: document.getElementById("send-btn") as HTMLButtonElement,
  });
  app.start();
  return app;
}
