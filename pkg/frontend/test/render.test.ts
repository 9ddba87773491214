import { describe, expect, it } from "vitest";

import { Camera } from "../src/camera.js";
import type { Snapshot, WorldDoc } from "../src/protocol.js";
import { pickObject, renderScene, type Ctx2D } from "../src/render.js";
import { applySnapshot, initialState } from "../src/state.js";

class RecordingCtx implements Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 1;
  globalAlpha = 1;
  font = "";
  calls: string[] = [];
  clearRect() {
    this.calls.push("clearRect");
  }
  beginPath() {
    this.calls.push("beginPath");
  }
  arc() {
    this.calls.push("arc");
  }
  moveTo() {
    this.calls.push("moveTo");
  }
  lineTo() {
    this.calls.push("lineTo");
  }
  closePath() {
    this.calls.push("closePath");
  }
  fill() {
    this.calls.push("fill");
  }
  stroke() {
    this.calls.push("stroke");
  }
  fillText(text: string) {
    this.calls.push(`fillText:${text}`);
  }
  count(name: string): number {
    return this.calls.filter((c) => c === name).length;
  }
}

const world: WorldDoc = {
  params: { v: 1, omega: 1.57, dt: 0.05, reach: 1, clearance: 0.5 },
  robots: [{ id: "r1", position: [0, 0], heading: 0, radius: 0.5, holding: null }],
  bars: [],
  obstacles: [{ id: "rock", center: [5, 5], radius: 2 }],
};

function snapshotWithWorld(tick = 1): Snapshot {
  return {
    type: "snapshot",
    world,
    record: {
      tick,
      time: tick * 0.05,
      robots: { r1: { pose: { position: [1, 1], heading: 0.5 }, holding: null } },
      world_delta: {},
      events_applied: [],
      notes: [],
    },
  };
}

function makeState() {
  return applySnapshot(initialState(), snapshotWithWorld());
}

function makeCamera() {
  const cam = new Camera();
  cam.resize(800, 600);
  cam.fit(world);
  return cam;
}

describe("renderScene", () => {
  it("draws the robot glyph, the obstacle, and the goal marker", () => {
    const ctx = new RecordingCtx();
    renderScene(ctx, makeState(), makeCamera(), [10, 10]);
    expect(ctx.count("arc")).toBeGreaterThanOrEqual(2); // obstacle + goal ring
    expect(ctx.count("closePath")).toBeGreaterThanOrEqual(2); // bg + robot triangle
    expect(ctx.calls).toContain("fillText:r1");
  });

  it("renders nothing but the background without a world", () => {
    const ctx = new RecordingCtx();
    renderScene(ctx, initialState(), makeCamera(), null);
    expect(ctx.count("clearRect")).toBe(1);
    expect(ctx.count("arc")).toBe(0);
  });

  it("draws ghosts for pending injections", () => {
    const state = makeState();
    state.pending.push({
      requestId: 1,
      objectId: "rock",
      ghost: { kind: "obstacle", x: 8, y: 8 },
    });
    const ctx = new RecordingCtx();
    renderScene(ctx, state, makeCamera(), null);
    const plain = new RecordingCtx();
    renderScene(plain, makeState(), makeCamera(), null);
    expect(ctx.count("arc")).toBe(plain.count("arc") + 1);
  });
});

describe("pickObject", () => {
  it("hits the obstacle at its center and misses empty space", () => {
    const state = makeState();
    const cam = makeCamera();
    const [sx, sy] = cam.worldToScreen(5, 5);
    expect(pickObject(state, cam, sx, sy, null)).toEqual({ kind: "obstacle", id: "rock" });
    const [ex, ey] = cam.worldToScreen(5, 19);
    expect(pickObject(state, cam, ex, ey, null)).toBeNull();
  });

  it("prefers the live robot pose over the static one", () => {
    const state = makeState(); // live pose (1, 1)
    const cam = makeCamera();
    const [sx, sy] = cam.worldToScreen(1, 1);
    expect(pickObject(state, cam, sx, sy, null)).toEqual({ kind: "robot", id: "r1" });
  });

  it("finds the goal marker", () => {
    const state = makeState();
    const cam = makeCamera();
    const [sx, sy] = cam.worldToScreen(10, 10);
    expect(pickObject(state, cam, sx, sy, [10, 10])).toEqual({ kind: "goal", id: "goal" });
  });
});
