// Wire protocol for the control service: JSON text messages over a
// websocket.  Every client request carries an id and is answered by
// exactly one ack or error; snapshots and finished notices stream in
// between.

export interface Pose {
  position: [number, number];
  heading: number;
}

export interface ActivationLevel {
  callee: string;
  instance: number;
  selected: number | string;
  truth: string; // "0"/"1" per rule, in order
  nodes?: string[]; // present for tree levels
}

export interface RobotRecord {
  pose: Pose;
  holding: string | null;
  action?: { name: string; args: unknown[] };
  activation?: ActivationLevel[];
}

export interface TraceRecord {
  tick: number;
  time: number;
  robots: Record<string, RobotRecord>;
  world_delta: Record<string, unknown>;
  events_applied: Array<Record<string, unknown>>;
  notes: string[];
}

export interface WorldDoc {
  params: { v: number; omega: number; dt: number; reach: number; clearance: number };
  robots: Array<{ id: string; position: [number, number]; heading: number; radius: number; holding: string | null }>;
  bars: Array<{ id: string; p: [number, number]; q: [number, number]; half_width: number }>;
  obstacles: Array<{ id: string; center: [number, number]; radius: number }>;
}

export interface Snapshot {
  type: "snapshot";
  record: TraceRecord;
  world?: WorldDoc;
}

export interface Ack {
  type: "ack";
  id: number;
  info?: Record<string, unknown>;
}

export interface ErrorReply {
  type: "error";
  id: number | null;
  reason: string;
}

export interface Finished {
  type: "finished";
  reason: string;
}

export type ServerMessage = Snapshot | Ack | ErrorReply | Finished;

export type ClientRequest =
  | { type: "load"; scenario: Record<string, unknown> }
  | { type: "subscribe"; decimation: number; full_world_every?: number }
  | { type: "start" }
  | { type: "pause" }
  | { type: "step"; n: number }
  | { type: "set_rate"; rate: number }
  | { type: "inject"; event: Record<string, unknown>; at_tick?: number };

export function encodeRequest(id: number, req: ClientRequest): string {
  return JSON.stringify({ id, ...req });
}

// Parse and shape-check one server message; null for anything unusable.
export function decodeServerMessage(text: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const msg = doc as Record<string, unknown>;
  switch (msg.type) {
    case "ack":
      return typeof msg.id === "number" ? (msg as unknown as Ack) : null;
    case "error":
      return typeof msg.reason === "string" ? (msg as unknown as ErrorReply) : null;
    case "finished":
      return typeof msg.reason === "string" ? (msg as unknown as Finished) : null;
    case "snapshot": {
      const record = msg.record as Record<string, unknown> | undefined;
      if (!record || typeof record.tick !== "number" || typeof record.robots !== "object") {
        return null;
      }
      return msg as unknown as Snapshot;
    }
    default:
      return null;
  }
}

// Builders for the world-edit events the studio can send.
export function moveObstacleEvent(id: string, center: [number, number]) {
  return { type: "move_object", id, center };
}

export function moveBarEvent(id: string, p: [number, number], q: [number, number]) {
  return { type: "move_object", id, p, q };
}

export function teleportRobotEvent(id: string, position: [number, number], heading: number) {
  return { type: "teleport_robot", id, position, heading };
}

export function setEntryArgEvent(index: number, point: [number, number], robot?: string) {
  const ev: Record<string, unknown> = { type: "set_entry_arg", index, value: { point } };
  if (robot !== undefined) ev.robot = robot;
  return ev;
}
