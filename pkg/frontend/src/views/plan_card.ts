/** Plan approval card: inputs, steps, checks, and a locking decision row.
 *
 * The decision buttons post exactly once: the card disables itself before
 * the request leaves, so double-clicks and re-renders cannot duplicate a
 * decision.
 */

import type { PlanDecision, PlanProposal } from "../types.js";

export interface PlanCardHandlers {
  onDecision(decision: PlanDecision, edits?: Record<string, unknown>): void;
}

export function renderPlanCard(plan: PlanProposal, handlers: PlanCardHandlers): HTMLElement {
  const card = document.createElement("section");
  card.className = "plan-card";

  const title = document.createElement("h3");
  title.textContent = `Proposed plan (${plan.steps.length} steps)`;
  card.appendChild(title);

  card.appendChild(definitionList("Inputs", summarize(plan.inputs_summary)));

  const steps = document.createElement("ol");
  steps.className = "plan-steps";
  for (const step of plan.steps) {
    const item = document.createElement("li");
    item.textContent = step.note ? `${step.tool} — ${step.note}` : step.tool;
    steps.appendChild(item);
  }
  card.appendChild(steps);

  card.appendChild(bulletList("Expected outputs", plan.expected_outputs));
  card.appendChild(bulletList("Validation checks", plan.validation_checks));
  if (plan.assumptions.length > 0) {
    card.appendChild(bulletList("Assumptions", plan.assumptions));
  }

  const actions = document.createElement("div");
  actions.className = "plan-actions";
  let decided = false;

  const decide = (decision: PlanDecision, edits?: Record<string, unknown>) => {
    if (decided) return;
    decided = true;
    for (const button of actions.querySelectorAll("button")) {
      button.disabled = true;
    }
    card.classList.add("plan-locked");
    handlers.onDecision(decision, edits);
  };

  const approve = button("Approve", "approve-btn", () => decide("approve"));
  const reject = button("Reject", "reject-btn", () => decide("reject"));
  const modify = button("Modify…", "modify-btn", () => {
    const raw = window.prompt("Edits as JSON, e.g. {\"radius_m\": 1000}", "{}");
    if (raw === null) return;
    let edits: Record<string, unknown>;
    try {
      edits = JSON.parse(raw) as Record<string, unknown>;
    } catch {
      window.alert("Edits must be valid JSON.");
      return;
    }
    decide("modify", edits);
  });
  actions.append(approve, reject, modify);
  card.appendChild(actions);
  return card;
}

function button(label: string, className: string, onClick: () => void): HTMLButtonElement {
  const element = document.createElement("button");
  element.type = "button";
  element.className = className;
  element.textContent = label;
  element.addEventListener("click", onClick);
  return element;
}

function bulletList(heading: string, entries: string[]): HTMLElement {
  const wrapper = document.createElement("div");
  const head = document.createElement("h4");
  head.textContent = heading;
  wrapper.appendChild(head);
  const list = document.createElement("ul");
  for (const entry of entries) {
    const item = document.createElement("li");
    item.textContent = entry;
    list.appendChild(item);
  }
  wrapper.appendChild(list);
  return wrapper;
}

function definitionList(heading: string, entries: [string, string][]): HTMLElement {
  const wrapper = document.createElement("div");
  const head = document.createElement("h4");
  head.textContent = heading;
  wrapper.appendChild(head);
  const list = document.createElement("dl");
  for (const [key, value] of entries) {
    const term = document.createElement("dt");
    term.textContent = key;
    const detail = document.createElement("dd");
    detail.textContent = value;
    list.append(term, detail);
  }
  wrapper.appendChild(list);
  return wrapper;
}

function summarize(inputs: Record<string, unknown>): [string, string][] {
  return Object.entries(inputs).map(([key, value]) => [
    key,
    typeof value === "string" ? value : JSON.stringify(value),
  ]);
}
