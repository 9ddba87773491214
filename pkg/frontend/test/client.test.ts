import { describe, expect, it } from "vitest";

import { StudioClient, type TransportLike } from "../src/client.js";

class FakeTransport implements TransportLike {
  sent: string[] = [];
  onmessage: ((ev: { data: string }) => void) | null = null;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;
  send(text: string): void {
    this.sent.push(text);
  }
  close(): void {
    this.onclose?.();
  }
  receive(doc: unknown): void {
    this.onmessage?.({ data: JSON.stringify(doc) });
  }
}

describe("StudioClient", () => {
  it("resolves requests on their ack with the info payload", async () => {
    const t = new FakeTransport();
    const client = new StudioClient(t);
    const { id, done } = client.request({ type: "start" });
    expect(JSON.parse(t.sent[0])).toEqual({ id, type: "start" });
    t.receive({ type: "ack", id, info: { hello: 1 } });
    await expect(done).resolves.toEqual({ hello: 1 });
  });

  it("rejects on an error reply for the same id", async () => {
    const t = new FakeTransport();
    const client = new StudioClient(t);
    const { id, done } = client.request({ type: "pause" });
    t.receive({ type: "error", id, reason: "no scenario loaded" });
    await expect(done).rejects.toThrow("no scenario loaded");
  });

  it("keeps unrelated requests pending", async () => {
    const t = new FakeTransport();
    const client = new StudioClient(t);
    const first = client.request({ type: "start" });
    const second = client.request({ type: "pause" });
    t.receive({ type: "ack", id: second.id });
    await expect(second.done).resolves.toBeUndefined();
    t.receive({ type: "ack", id: first.id });
    await expect(first.done).resolves.toBeUndefined();
  });

  it("routes snapshots and finished notices to their handlers", () => {
    const t = new FakeTransport();
    const client = new StudioClient(t);
    const ticks: number[] = [];
    let finished: string | null = null;
    client.onSnapshot = (s) => ticks.push(s.record.tick);
    client.onFinished = (reason) => (finished = reason);
    t.receive({
      type: "snapshot",
      record: { tick: 3, time: 0.15, robots: {}, world_delta: {}, events_applied: [], notes: [] },
    });
    t.receive({ type: "finished", reason: "completed" });
    expect(ticks).toEqual([3]);
    expect(finished).toBe("completed");
  });

  it("surfaces unaddressed errors and bad payloads via onProtocolError", () => {
    const t = new FakeTransport();
    const client = new StudioClient(t);
    const reasons: string[] = [];
    client.onProtocolError = (r) => reasons.push(r);
    t.receive({ type: "error", id: null, reason: "bad message" });
    t.onmessage?.({ data: "?not json?" });
    expect(reasons).toHaveLength(2);
  });

  it("rejects everything pending when the connection closes", async () => {
    const t = new FakeTransport();
    const client = new StudioClient(t);
    const { done } = client.request({ type: "start" });
    t.close();
    await expect(done).rejects.toThrow("connection closed");
  });
});
