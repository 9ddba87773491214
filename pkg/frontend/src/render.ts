// Immediate-mode world rendering.  Drawing goes through a narrow
// context interface so tests can record calls without a real canvas.

import type { Camera } from "./camera.js";
import type { ViewState } from "./state.js";

export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

const COLORS = {
  background: "#10141a",
  grid: "#1d2633",
  obstacle: "#5b6473",
  obstacleEdge: "#8b95a5",
  bar: "#b07050",
  robot: "#53b1fd",
  trail: "#2f6faa",
  goal: "#67d98b",
  ghost: "#e0c341",
};

function circle(ctx: Ctx2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
}

export function renderScene(
  ctx: Ctx2D,
  state: ViewState,
  camera: Camera,
  goal: [number, number] | null,
): void {
  ctx.globalAlpha = 1;
  ctx.fillStyle = COLORS.background;
  ctx.clearRect(0, 0, camera.viewW, camera.viewH);
  ctx.fillStyle = COLORS.background;
  ctx.beginPath();
  ctx.moveTo(0, 0);
  ctx.lineTo(camera.viewW, 0);
  ctx.lineTo(camera.viewW, camera.viewH);
  ctx.lineTo(0, camera.viewH);
  ctx.closePath();
  ctx.fill();
  const world = state.world;
  if (!world) return;

  // grid each 5 units
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  for (let gx = Math.floor(camera.centerX - 40); gx <= camera.centerX + 40; gx += 5) {
    const [sx0, sy0] = camera.worldToScreen(gx, camera.centerY - 40);
    const [sx1, sy1] = camera.worldToScreen(gx, camera.centerY + 40);
    ctx.beginPath();
    ctx.moveTo(sx0, sy0);
    ctx.lineTo(sx1, sy1);
    ctx.stroke();
  }
  for (let gy = Math.floor(camera.centerY - 40); gy <= camera.centerY + 40; gy += 5) {
    const [sx0, sy0] = camera.worldToScreen(camera.centerX - 40, gy);
    const [sx1, sy1] = camera.worldToScreen(camera.centerX + 40, gy);
    ctx.beginPath();
    ctx.moveTo(sx0, sy0);
    ctx.lineTo(sx1, sy1);
    ctx.stroke();
  }

  for (const obs of world.obstacles) {
    const [sx, sy] = camera.worldToScreen(obs.center[0], obs.center[1]);
    ctx.fillStyle = COLORS.obstacle;
    circle(ctx, sx, sy, obs.radius * camera.scale);
    ctx.fill();
    ctx.strokeStyle = COLORS.obstacleEdge;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }

  for (const bar of world.bars) {
    const [x0, y0] = camera.worldToScreen(bar.p[0], bar.p[1]);
    const [x1, y1] = camera.worldToScreen(bar.q[0], bar.q[1]);
    ctx.strokeStyle = COLORS.bar;
    ctx.lineWidth = Math.max(2, bar.half_width * 2 * camera.scale);
    ctx.beginPath();
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    ctx.stroke();
  }

  if (goal) {
    const [sx, sy] = camera.worldToScreen(goal[0], goal[1]);
    ctx.strokeStyle = COLORS.goal;
    ctx.lineWidth = 2;
    circle(ctx, sx, sy, 6);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(sx - 10, sy);
    ctx.lineTo(sx + 10, sy);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(sx, sy - 10);
    ctx.lineTo(sx, sy + 10);
    ctx.stroke();
  }

  for (const [rid, path] of state.trail) {
    if (path.length < 2) continue;
    ctx.strokeStyle = COLORS.trail;
    ctx.lineWidth = 1;
    ctx.beginPath();
    const [sx, sy] = camera.worldToScreen(path[0][0], path[0][1]);
    ctx.moveTo(sx, sy);
    for (let i = 1; i < path.length; i++) {
      const [px, py] = camera.worldToScreen(path[i][0], path[i][1]);
      ctx.lineTo(px, py);
    }
    ctx.stroke();
    void rid;
  }

  for (const robot of world.robots) {
    const live = state.record?.robots[robot.id];
    const [wx, wy] = live ? live.pose.position : robot.position;
    const heading = live ? live.pose.heading : robot.heading;
    const [sx, sy] = camera.worldToScreen(wx, wy);
    const r = Math.max(6, robot.radius * camera.scale);
    // pose triangle: nose along the heading
    const nose = [sx + r * Math.cos(-heading), sy + r * Math.sin(-heading)];
    const left = [
      sx + 0.7 * r * Math.cos(-heading + 2.5),
      sy + 0.7 * r * Math.sin(-heading + 2.5),
    ];
    const right = [
      sx + 0.7 * r * Math.cos(-heading - 2.5),
      sy + 0.7 * r * Math.sin(-heading - 2.5),
    ];
    ctx.fillStyle = COLORS.robot;
    ctx.beginPath();
    ctx.moveTo(nose[0], nose[1]);
    ctx.lineTo(left[0], left[1]);
    ctx.lineTo(right[0], right[1]);
    ctx.closePath();
    ctx.fill();
    ctx.fillText(robot.id, sx + r + 3, sy - 3);
  }

  // optimistic ghosts for un-acked injections
  for (const p of state.pending) {
    const [sx, sy] = camera.worldToScreen(p.ghost.x, p.ghost.y);
    ctx.globalAlpha = 0.5;
    ctx.strokeStyle = COLORS.ghost;
    ctx.lineWidth = 2;
    circle(ctx, sx, sy, 10);
    ctx.stroke();
    ctx.globalAlpha = 1;
  }
}

// Hit test in screen space: nearest draggable object within range.
export function pickObject(
  state: ViewState,
  camera: Camera,
  sx: number,
  sy: number,
  goal: [number, number] | null,
): { kind: "obstacle" | "bar" | "robot" | "goal"; id: string } | null {
  const world = state.world;
  if (!world) return null;
  const [wx, wy] = camera.screenToWorld(sx, sy);
  type Hit = { kind: "obstacle" | "bar" | "robot" | "goal"; id: string; d: number };
  const hits: Hit[] = [];

  const consider = (kind: Hit["kind"], id: string, x: number, y: number, reach: number) => {
    const d = Math.hypot(wx - x, wy - y);
    if (d <= reach) hits.push({ kind, id, d });
  };

  for (const o of world.obstacles) consider("obstacle", o.id, o.center[0], o.center[1], o.radius + 0.3);
  for (const b of world.bars) {
    const cx = (b.p[0] + b.q[0]) / 2;
    const cy = (b.p[1] + b.q[1]) / 2;
    consider("bar", b.id, cx, cy, Math.hypot(b.q[0] - b.p[0], b.q[1] - b.p[1]) / 2 + 0.4);
  }
  for (const r of world.robots) {
    const live = state.record?.robots[r.id];
    const [x, y] = live ? live.pose.position : r.position;
    consider("robot", r.id, x, y, r.radius + 0.3);
  }
  if (goal) consider("goal", "goal", goal[0], goal[1], 0.6);
  if (hits.length === 0) return null;
  hits.sort((a, b) => a.d - b.d);
  return { kind: hits[0].kind, id: hits[0].id };
}
