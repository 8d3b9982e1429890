/** Clarification form: one prefilled input per question, plus accept-all. */

import type { ClarificationQuestion } from "../types.js";

export interface ClarificationHandlers {
  onSubmit(message: string): void;
}

export function renderClarification(
  questions: ClarificationQuestion[],
  handlers: ClarificationHandlers,
): HTMLElement {
  const form = document.createElement("form");
  form.className = "clarification";

  const inputs = new Map<string, HTMLInputElement>();
  for (const question of questions) {
    const row = document.createElement("label");
    row.className = "clarification-row";
    const text = document.createElement("span");
    text.textContent = question.question;
    row.appendChild(text);

    const input = document.createElement("input");
    input.name = question.slot;
    input.value = formatDefault(question.default);
    input.dataset.assumption = question.assumption;
    row.appendChild(input);
    inputs.set(question.slot, input);
    form.appendChild(row);
  }

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Answer";
  form.appendChild(submit);

  const acceptAll = document.createElement("button");
  acceptAll.type = "button";
  acceptAll.className = "accept-defaults";
  acceptAll.textContent = "Accept all defaults";
  form.appendChild(acceptAll);

  const compose = (): string =>
    questions
      .map((question) => `${question.slot}: ${inputs.get(question.slot)!.value}`)
      .join("\n");

  form.addEventListener("submit", (submitEvent) => {
    submitEvent.preventDefault();
    handlers.onSubmit(compose());
  });
  acceptAll.addEventListener("click", () => {
    // send every recommended default plus its assumption, verbatim
    const lines = questions.flatMap((question) => [
      `${question.slot}: ${formatDefault(question.default)}`,
      `(assumed) ${question.assumption}`,
    ]);
    handlers.onSubmit(lines.join("\n"));
  });

  return form;
}

export function formatDefault(value: unknown): string {
  if (typeof value === "string") return value;
  return JSON.stringify(value);
}
