import { describe, expect, it } from "vitest";

import { EventStream, ViewSession } from "../src/session.js";
import { FakeClient, event, makePlan } from "./helpers.js";

function serverLog() {
  return [
    event(1, "clarification", { questions: [] }),
    event(2, "plan_preview", { plan: makePlan("confirmed") }),
    event(3, "tool_started", { tool: "generate_network", args: {} }),
    event(4, "tool_finished", { tool: "generate_network", is_error: false, content: [] }),
    event(5, "tool_started", { tool: "run_simulation", args: {} }),
    event(6, "tool_finished", { tool: "run_simulation", is_error: false, content: [] }),
    event(7, "agent_text", { text: "done" }),
  ];
}

describe("event stream resilience", () => {
  it("a disconnect plus resume reproduces the uninterrupted event list", async () => {
    // uninterrupted consumer
    const clientA = new FakeClient();
    clientA.serverLog = serverLog();
    const uninterrupted = new ViewSession("s");
    const streamA = new EventStream(uninterrupted, (from) => clientA.fetchEvents("s", from), () => {});
    await streamA.pollOnce();

    // interrupted consumer: sees a prefix, drops the connection, resumes
    const clientB = new FakeClient();
    clientB.serverLog = serverLog().slice(0, 3);
    const resumed = new ViewSession("s");
    const streamB = new EventStream(resumed, (from) => clientB.fetchEvents("s", from), () => {});
    await streamB.pollOnce();
    expect(resumed.lastSeq).toBe(3);

    clientB.serverLog = serverLog();
    clientB.failNextFetches = 1;
    await expect(streamB.pollOnce()).rejects.toThrow("simulated disconnect");
    await streamB.pollOnce();

    expect(resumed.events).toEqual(uninterrupted.events);
    expect(resumed.lastSeq).toBe(7);
  });

  it("duplicate deliveries are dropped", async () => {
    const client = new FakeClient();
    client.serverLog = serverLog();
    const session = new ViewSession("s");
    const stream = new EventStream(session, () => client.fetchEvents("s", 0), () => {});
    await stream.pollOnce();
    await stream.pollOnce(); // same full log again
    expect(session.events).toHaveLength(7);
  });

  it("a sequence gap is detected loudly", () => {
    const session = new ViewSession("s");
    session.ingest(event(1, "agent_text", { text: "a" }));
    expect(() => session.ingest(event(3, "agent_text", { text: "b" }))).toThrow(/gap/);
  });
});

describe("session reducer", () => {
  it("pending plan set by awaiting preview and cleared by final text", () => {
    const session = new ViewSession("s");
    session.ingest(event(1, "plan_preview", { plan: makePlan("awaiting_confirmation") }));
    expect(session.pendingPlan).not.toBeNull();
    session.ingest(event(2, "agent_text", { text: "rejected" }));
    expect(session.pendingPlan).toBeNull();
  });

  it("confirmed previews never leave a pending plan", () => {
    const session = new ViewSession("s");
    session.ingest(event(1, "plan_preview", { plan: makePlan("confirmed") }));
    expect(session.pendingPlan).toBeNull();
  });

  it("clarification questions tracked until a plan arrives", () => {
    const session = new ViewSession("s");
    session.ingest(event(1, "clarification", { questions: [{ slot: "x", question: "q", default: 1, assumption: "a" }] }));
    expect(session.pendingQuestions).toHaveLength(1);
    session.ingest(event(2, "plan_preview", { plan: makePlan("confirmed") }));
    expect(session.pendingQuestions).toHaveLength(0);
  });
});
