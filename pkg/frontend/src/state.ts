// View state and its reducers.  The server is the single source of
// truth: the rendered tick never decreases, pending injections exist
// only as optimistic ghosts and are reconciled on ack/error, and all
// world edits travel through control messages.

import type { Snapshot, TraceRecord, WorldDoc } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "closed";

export interface PendingInjection {
  requestId: number;
  objectId: string;
  ghost: { kind: "obstacle" | "bar" | "robot" | "goal"; x: number; y: number };
}

export interface ViewState {
  status: ConnectionStatus;
  world: WorldDoc | null;
  record: TraceRecord | null;
  trail: Map<string, Array<[number, number]>>;
  pending: PendingInjection[];
  lastError: string | null;
  finishedReason: string | null;
  droppedStale: number;
}

export const TRAIL_LIMIT = 600;

export function initialState(): ViewState {
  return {
    status: "connecting",
    world: null,
    record: null,
    trail: new Map(),
    pending: [],
    lastError: null,
    finishedReason: null,
    droppedStale: 0,
  };
}

export function applySnapshot(state: ViewState, snap: Snapshot): ViewState {
  const record = snap.record;
  // Never render backwards, even if a stale frame sneaks in.
  if (state.record !== null && record.tick <= state.record.tick) {
    return { ...state, droppedStale: state.droppedStale + 1 };
  }
  const trail = state.trail;
  for (const [rid, robot] of Object.entries(record.robots)) {
    const path = trail.get(rid) ?? [];
    path.push(robot.pose.position);
    if (path.length > TRAIL_LIMIT) path.shift();
    trail.set(rid, path);
  }
  return {
    ...state,
    record,
    world: snap.world ?? state.world,
    trail,
  };
}

export function applyAck(state: ViewState, id: number): ViewState {
  return { ...state, pending: state.pending.filter((p) => p.requestId !== id) };
}

export function applyError(state: ViewState, id: number | null, reason: string): ViewState {
  return {
    ...state,
    pending: id === null ? state.pending : state.pending.filter((p) => p.requestId !== id),
    lastError: reason,
  };
}

export function addPending(state: ViewState, injection: PendingInjection): ViewState {
  return { ...state, pending: [...state.pending, injection] };
}

export function applyFinished(state: ViewState, reason: string): ViewState {
  return { ...state, finishedReason: reason };
}

export function setStatus(state: ViewState, status: ConnectionStatus): ViewState {
  return { ...state, status };
}

// --- activation panel model ------------------------------------------------

export interface PanelRule {
  text: string;
  truth: boolean;
  highlighted: boolean;
}

export interface PanelRow {
  callee: string;
  instance: number;
  rules: PanelRule[];
}

export interface ProgramListing {
  programs: Record<string, { params: string[]; rules: string[] }>;
  trees: Record<
    string,
    { params: string[]; nodes: Array<{ id: string; condition: string; action: string | null }> }
  >;
}

// Rows root-to-leaf; exactly one highlighted rule per row (the selected
// one), with source text from the load ack's listing when available.
export function activationPanel(
  record: TraceRecord | null,
  robotId: string,
  listing: ProgramListing | null,
): PanelRow[] {
  if (record === null) return [];
  const robot = record.robots[robotId];
  if (!robot || !robot.activation) return [];
  return robot.activation.map((level) => {
    const rules: PanelRule[] = [];
    const program = listing?.programs?.[level.callee];
    const tree = listing?.trees?.[level.callee];
    for (let i = 0; i < level.truth.length; i++) {
      let text = `rule ${i + 1}`;
      let highlighted = level.selected === i;
      if (level.nodes !== undefined) {
        const nodeId = level.nodes[i];
        highlighted = level.selected === nodeId;
        const node = tree?.nodes?.find((n) => n.id === nodeId);
        text = node ? `${nodeId}: ${node.condition}` : nodeId;
      } else if (program && program.rules[i] !== undefined) {
        text = program.rules[i];
      }
      rules.push({ text, truth: level.truth[i] === "1", highlighted });
    }
    return { callee: level.callee, instance: level.instance, rules };
  });
}
