/** Chat transcript rendering: agent text, collapsible tool activity, errors. */

import type { GatewayEvent } from "../types.js";

export function renderConversation(events: GatewayEvent[]): HTMLElement {
  const list = document.createElement("div");
  list.className = "conversation";
  if (events.length === 0) {
    const hint = document.createElement("p");
    hint.className = "empty-hint";
    hint.textContent = "Describe a traffic scenario to begin, e.g. “Run a simulation around Times Square within 2 km”.";
    list.appendChild(hint);
    return list;
  }
  for (const event of events) {
    const node = renderEvent(event);
    if (node !== null) list.appendChild(node);
  }
  return list;
}

function renderEvent(event: GatewayEvent): HTMLElement | null {
  switch (event.kind) {
    case "agent_text": {
      const bubble = document.createElement("div");
      bubble.className = "msg agent-text";
      bubble.textContent = String(event.payload.text ?? "");
      return bubble;
    }
    case "tool_started": {
      const item = document.createElement("details");
      item.className = "tool-activity";
      const summary = document.createElement("summary");
      summary.textContent = `⚙ ${event.payload.tool as string} …`;
      item.appendChild(summary);
      const args = document.createElement("pre");
      args.textContent = JSON.stringify(event.payload.args ?? {}, null, 1);
      item.appendChild(args);
      return item;
    }
    case "tool_finished": {
      const item = document.createElement("details");
      item.className = event.payload.is_error ? "tool-activity tool-error" : "tool-activity";
      const summary = document.createElement("summary");
      const status = event.payload.is_error ? "failed" : "ok";
      summary.textContent = `⚙ ${event.payload.tool as string} ${status}`;
      item.appendChild(summary);
      const body = document.createElement("pre");
      body.textContent = JSON.stringify(event.payload.content ?? [], null, 1);
      item.appendChild(body);
      return item;
    }
    case "error": {
      const card = document.createElement("div");
      card.className = "msg error-card";
      card.textContent = `⚠ ${event.payload.message as string}`;
      return card;
    }
    case "clarification":
    case "plan_preview":
    case "metrics_ready":
      // rendered by their dedicated panels
      return null;
    default:
      return null;
  }
}
