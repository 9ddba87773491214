// World <-> screen mapping.  World y points up; canvas y points down.

import type { WorldDoc } from "./protocol.js";

export class Camera {
  scale = 30; // pixels per world unit
  centerX = 10;
  centerY = 10;
  viewW = 800;
  viewH = 600;

  resize(w: number, h: number): void {
    this.viewW = w;
    this.viewH = h;
  }

  worldToScreen(x: number, y: number): [number, number] {
    return [
      this.viewW / 2 + (x - this.centerX) * this.scale,
      this.viewH / 2 - (y - this.centerY) * this.scale,
    ];
  }

  screenToWorld(sx: number, sy: number): [number, number] {
    return [
      this.centerX + (sx - this.viewW / 2) / this.scale,
      this.centerY - (sy - this.viewH / 2) / this.scale,
    ];
  }

  // Frame the whole world with a margin, preserving aspect.
  fit(world: WorldDoc, margin = 2): void {
    const xs: number[] = [];
    const ys: number[] = [];
    for (const r of world.robots) {
      xs.push(r.position[0]);
      ys.push(r.position[1]);
    }
    for (const b of world.bars) {
      xs.push(b.p[0], b.q[0]);
      ys.push(b.p[1], b.q[1]);
    }
    for (const o of world.obstacles) {
      xs.push(o.center[0] - o.radius, o.center[0] + o.radius);
      ys.push(o.center[1] - o.radius, o.center[1] + o.radius);
    }
    if (xs.length === 0) return;
    const minX = Math.min(...xs) - margin;
    const maxX = Math.max(...xs) + margin;
    const minY = Math.min(...ys) - margin;
    const maxY = Math.max(...ys) + margin;
    this.centerX = (minX + maxX) / 2;
    this.centerY = (minY + maxY) / 2;
    const spanX = Math.max(maxX - minX, 1e-6);
    const spanY = Math.max(maxY - minY, 1e-6);
    this.scale = Math.min(this.viewW / spanX, this.viewH / spanY);
  }
}
