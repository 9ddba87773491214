// Thin request/reply layer over a websocket-like transport.  Injected
// as an interface so tests can drive it with a fake socket.

import { encodeRequest, decodeServerMessage } from "./protocol.js";
import type { ClientRequest, ServerMessage } from "./protocol.js";

export interface TransportLike {
  send(text: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

interface PendingRequest {
  resolve: (info: Record<string, unknown> | undefined) => void;
  reject: (err: Error) => void;
}

export class StudioClient {
  private nextId = 0;
  private pending = new Map<number, PendingRequest>();
  onSnapshot: ((msg: ServerMessage & { type: "snapshot" }) => void) | null = null;
  onFinished: ((reason: string) => void) | null = null;
  onProtocolError: ((reason: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  constructor(private transport: TransportLike) {
    transport.onmessage = (ev) => this.dispatch(ev.data);
    transport.onopen = () => this.onOpen?.();
    transport.onclose = () => {
      for (const p of this.pending.values()) p.reject(new Error("connection closed"));
      this.pending.clear();
      this.onClose?.();
    };
    transport.onerror = () => undefined; // onclose follows
  }

  // Resolves with the ack's info; rejects on an error reply.  The
  // returned id lets callers tie optimistic state to the reply.
  request(req: ClientRequest): { id: number; done: Promise<Record<string, unknown> | undefined> } {
    const id = ++this.nextId;
    const done = new Promise<Record<string, unknown> | undefined>((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
    });
    this.transport.send(encodeRequest(id, req));
    return { id, done };
  }

  private dispatch(text: string): void {
    const msg = decodeServerMessage(text);
    if (msg === null) {
      this.onProtocolError?.("unintelligible server message");
      return;
    }
    switch (msg.type) {
      case "ack": {
        const p = this.pending.get(msg.id);
        if (p) {
          this.pending.delete(msg.id);
          p.resolve(msg.info);
        }
        break;
      }
      case "error": {
        if (msg.id !== null) {
          const p = this.pending.get(msg.id);
          if (p) {
            this.pending.delete(msg.id);
            p.reject(new Error(msg.reason));
            break;
          }
        }
        this.onProtocolError?.(msg.reason);
        break;
      }
      case "snapshot":
        this.onSnapshot?.(msg);
        break;
      case "finished":
        this.onFinished?.(msg.reason);
        break;
    }
  }

  close(): void {
    this.transport.close();
  }
}
