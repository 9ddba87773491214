// Studio entry point: connect, render at snapshot rate, forward
// operator edits as control messages.  No client-side physics: the
// server is the single source of truth.

import { Camera } from "./camera.js";
import { StudioClient, type TransportLike } from "./client.js";
import {
  moveBarEvent,
  moveObstacleEvent,
  setEntryArgEvent,
  teleportRobotEvent,
} from "./protocol.js";
import {
  activationPanel,
  addPending,
  applyAck,
  applyError,
  applyFinished,
  applySnapshot,
  initialState,
  setStatus,
  type ProgramListing,
  type ViewState,
} from "./state.js";
import { pickObject, renderScene, type Ctx2D } from "./render.js";

const canvas = document.getElementById("world") as HTMLCanvasElement;
const ctx = canvas.getContext("2d") as unknown as Ctx2D;
const panelEl = document.getElementById("activation") as HTMLElement;
const statusEl = document.getElementById("status") as HTMLElement;
const bannerEl = document.getElementById("banner") as HTMLElement;
const tickEl = document.getElementById("tick") as HTMLElement;

let state: ViewState = initialState();
let listing: ProgramListing | null = null;
let goal: [number, number] | null = null;
let goalArgIndex = 0;
const camera = new Camera();
let fitted = false;

const params = new URLSearchParams(window.location.search);
const wsUrl = params.get("server") ?? `ws://${window.location.hostname}:8765/`;
const robotId = () => (state.world && state.world.robots[0] ? state.world.robots[0].id : "r1");

const socket = new WebSocket(wsUrl);
const client = new StudioClient(socket as unknown as TransportLike);

function setBanner(text: string | null): void {
  bannerEl.textContent = text ?? "";
  bannerEl.style.display = text ? "block" : "none";
}

function extractGoal(scenario: Record<string, unknown> | null): void {
  // Convention: an entry like name(point(x, y)) exposes the goal marker.
  const entry = scenario?.entry;
  if (typeof entry !== "string") return;
  const m = entry.match(/point\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)/);
  if (m) {
    goal = [parseFloat(m[1]), parseFloat(m[2])];
    goalArgIndex = 0;
  }
}

function redraw(): void {
  renderScene(ctx, state, camera, goal);
  tickEl.textContent = state.record ? `tick ${state.record.tick}` : "no data";
  renderPanel();
}

function renderPanel(): void {
  const rows = activationPanel(state.record, robotId(), listing);
  panelEl.innerHTML = "";
  for (const row of rows) {
    const rowEl = document.createElement("div");
    rowEl.className = "level";
    const title = document.createElement("div");
    title.className = "callee";
    title.textContent = `${row.callee} #${row.instance}`;
    rowEl.appendChild(title);
    for (const rule of row.rules) {
      const ruleEl = document.createElement("div");
      ruleEl.className = "rule" + (rule.highlighted ? " selected" : "");
      const dot = document.createElement("span");
      dot.className = "dot " + (rule.truth ? "on" : "off");
      ruleEl.appendChild(dot);
      const text = document.createElement("span");
      text.textContent = rule.text;
      ruleEl.appendChild(text);
      rowEl.appendChild(ruleEl);
    }
    panelEl.appendChild(rowEl);
  }
}

client.onOpen = () => {
  state = setStatus(state, "connected");
  statusEl.textContent = "connected";
  void bootstrap();
};
client.onClose = () => {
  state = setStatus(state, "closed");
  statusEl.textContent = "disconnected";
  setBanner("connection closed");
};
client.onProtocolError = (reason) => setBanner(reason);
client.onFinished = (reason) => {
  state = applyFinished(state, reason);
  setBanner(`finished: ${reason}`);
};
client.onSnapshot = (snap) => {
  state = applySnapshot(state, snap);
  if (!fitted && state.world) {
    camera.resize(canvas.width, canvas.height);
    camera.fit(state.world);
    fitted = true;
  }
  redraw();
};

async function bootstrap(): Promise<void> {
  const scenarioUrl = params.get("scenario");
  try {
    if (scenarioUrl) {
      const base = new URL(scenarioUrl, window.location.href);
      const doc = (await (await fetch(base)).json()) as Record<string, unknown>;
      // The server cannot resolve file paths from our side of the wire:
      // inline the program (and world) before sending the document over.
      if (typeof doc.program === "string" && doc.program_source === undefined) {
        doc.program_source = await (await fetch(new URL(doc.program, base))).text();
        delete doc.program;
      }
      if (typeof doc.world === "string") {
        doc.world = await (await fetch(new URL(doc.world, base))).json();
      }
      const info = await client.request({ type: "load", scenario: doc }).done;
      listing = (info ?? null) as ProgramListing | null;
      extractGoal(doc);
    }
    await client.request({ type: "subscribe", decimation: 2, full_world_every: 1 }).done;
  } catch (err) {
    setBanner(String(err));
  }
}

// --- transport controls: UI state follows acks, not clicks -------------------

function wireButton(id: string, make: () => Promise<unknown>): void {
  const el = document.getElementById(id) as HTMLButtonElement;
  el.addEventListener("click", () => {
    make().catch((err) => setBanner(String(err)));
  });
}

wireButton("btn-start", () => client.request({ type: "start" }).done);
wireButton("btn-pause", () => client.request({ type: "pause" }).done);
wireButton("btn-step", () => client.request({ type: "step", n: 1 }).done);
wireButton("btn-rate", () => {
  const rate = parseFloat((document.getElementById("rate") as HTMLInputElement).value);
  return client.request({ type: "set_rate", rate }).done;
});

// --- drag to perturb ----------------------------------------------------------

let dragging: { kind: "obstacle" | "bar" | "robot" | "goal"; id: string } | null = null;
let dragPos: [number, number] | null = null;

canvas.addEventListener("mousedown", (ev) => {
  const rect = canvas.getBoundingClientRect();
  dragging = pickObject(state, camera, ev.clientX - rect.left, ev.clientY - rect.top, goal);
});

canvas.addEventListener("mousemove", (ev) => {
  if (!dragging) return;
  const rect = canvas.getBoundingClientRect();
  dragPos = camera.screenToWorld(ev.clientX - rect.left, ev.clientY - rect.top);
});

canvas.addEventListener("mouseup", () => {
  if (!dragging || !dragPos || !state.world) {
    dragging = null;
    return;
  }
  const [x, y] = dragPos;
  let event: Record<string, unknown> | null = null;
  if (dragging.kind === "obstacle") {
    event = moveObstacleEvent(dragging.id, [x, y]);
  } else if (dragging.kind === "bar") {
    const bar = state.world.bars.find((b) => b.id === dragging!.id);
    if (bar) {
      const dx = (bar.q[0] - bar.p[0]) / 2;
      const dy = (bar.q[1] - bar.p[1]) / 2;
      event = moveBarEvent(dragging.id, [x - dx, y - dy], [x + dx, y + dy]);
    }
  } else if (dragging.kind === "robot") {
    const live = state.record?.robots[dragging.id];
    const heading = live ? live.pose.heading : 0;
    event = teleportRobotEvent(dragging.id, [x, y], heading);
  } else {
    event = setEntryArgEvent(goalArgIndex, [x, y]);
    goal = [x, y];
  }
  if (event) {
    const { id, done } = client.request({ type: "inject", event });
    state = addPending(state, {
      requestId: id,
      objectId: dragging.id,
      ghost: { kind: dragging.kind, x, y },
    });
    redraw();
    done
      .then(() => {
        state = applyAck(state, id);
        redraw();
      })
      .catch((err) => {
        state = applyError(state, id, String(err));
        setBanner(String(err));
        redraw();
      });
  }
  dragging = null;
  dragPos = null;
});

redraw();
