import { describe, expect, it } from "vitest";

import { Camera } from "../src/camera.js";
import type { WorldDoc } from "../src/protocol.js";

const world: WorldDoc = {
  params: { v: 1, omega: 1.57, dt: 0.05, reach: 1, clearance: 0.5 },
  robots: [{ id: "r1", position: [0, 0], heading: 0, radius: 0.5, holding: null }],
  bars: [{ id: "A", p: [9, 10], q: [11, 10], half_width: 0.25 }],
  obstacles: [{ id: "rock", center: [5, 5], radius: 2 }],
};

describe("Camera", () => {
  it("round-trips world -> screen -> world", () => {
    const cam = new Camera();
    cam.resize(800, 600);
    cam.fit(world);
    for (const [x, y] of [
      [0, 0],
      [10, 10],
      [-3.25, 7.5],
    ] as Array<[number, number]>) {
      const [sx, sy] = cam.worldToScreen(x, y);
      const [bx, by] = cam.screenToWorld(sx, sy);
      expect(bx).toBeCloseTo(x, 9);
      expect(by).toBeCloseTo(y, 9);
    }
  });

  it("flips the y axis (world up = screen up)", () => {
    const cam = new Camera();
    cam.resize(800, 600);
    const [, syLow] = cam.worldToScreen(10, 0);
    const [, syHigh] = cam.worldToScreen(10, 20);
    expect(syHigh).toBeLessThan(syLow);
  });

  it("fits every object inside the viewport", () => {
    const cam = new Camera();
    cam.resize(640, 480);
    cam.fit(world);
    const corners: Array<[number, number]> = [
      [0, 0],
      [11, 10],
      [5, 7],
      [3, 5],
    ];
    for (const [x, y] of corners) {
      const [sx, sy] = cam.worldToScreen(x, y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(640);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(480);
    }
  });
});
