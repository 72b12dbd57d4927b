// Session view model: everything the UI renders, no DOM dependencies.

import {
  AckMessage, ErrorMessage, GraphMessage, ServerMessage, SnapshotMessage, TraceRecord,
} from "./protocol.js";

export type ConnectionState = "connecting" | "open" | "closed";
export type Role = "observer" | "controller";

export interface WindowPoint {
  t: number;
  lambda: [number, number, number][];
  phi: [number, number, number][];
}

export const STALE_AFTER_MS = 2000;
export const WINDOW_SECONDS = 10;

/**
 * Accumulates server messages into renderable state.  Rendered weights are
 * exactly the received activation entries (no client-side renormalization);
 * sequence numbers must strictly increase or the frame is dropped and
 * counted as a protocol error.
 */
export class SessionViewModel {
  connection: ConnectionState = "connecting";
  role: Role = "observer";
  graph: GraphMessage | null = null;
  latest: TraceRecord | null = null;
  window: WindowPoint[] = [];
  errors: ErrorMessage[] = [];
  protocolErrors = 0;
  lastServerSeq: number | null = null;
  lastMessageAt: number | null = null;
  private ackWaiters = new Map<number, (msg: AckMessage | ErrorMessage) => void>();

  onOpen(): void {
    this.connection = "open";
  }

  onClose(): void {
    this.connection = "closed";
    this.role = "observer";
  }

  expectAck(seq: number, fn: (msg: AckMessage | ErrorMessage) => void): void {
    this.ackWaiters.set(seq, fn);
  }

  onMessage(msg: ServerMessage, nowMs: number): void {
    if (this.lastServerSeq !== null && msg.seq <= this.lastServerSeq) {
      this.protocolErrors += 1;
      return;
    }
    this.lastServerSeq = msg.seq;
    this.lastMessageAt = nowMs;
    switch (msg.type) {
      case "graph":
        this.graph = msg;
        this.role = msg.role;
        break;
      case "snapshot":
        this.ingest(msg);
        break;
      case "ack": {
        if (msg.role) this.role = msg.role;
        const waiter = this.ackWaiters.get(msg.of);
        if (waiter) {
          this.ackWaiters.delete(msg.of);
          waiter(msg);
        }
        break;
      }
      case "error": {
        this.errors.push(msg);
        // an error can answer a pending control request
        for (const [seq, waiter] of this.ackWaiters) {
          this.ackWaiters.delete(seq);
          waiter(msg);
          break;
        }
        break;
      }
    }
  }

  private ingest(msg: SnapshotMessage): void {
    const rec = msg.data;
    this.latest = rec;
    this.window.push({ t: rec.t, lambda: rec.lambda, phi: rec.phi });
    // session resets move time backwards: drop the stale future
    while (this.window.length > 1 && this.window[this.window.length - 2].t >= rec.t) {
      this.window.splice(this.window.length - 2, 1);
    }
    const horizon = rec.t - WINDOW_SECONDS;
    while (this.window.length && this.window[0].t < horizon) {
      this.window.shift();
    }
  }

  isStale(nowMs: number): boolean {
    if (this.connection !== "open") return true;
    if (this.lastMessageAt === null) return true;
    return nowMs - this.lastMessageAt > STALE_AFTER_MS;
  }

  /** Time series of one activation entry over the rolling window. */
  series(j: number, i: number): { t: number; v: number }[] {
    return this.window.map((p) => {
      let v = 0;
      for (const [jj, ii, vv] of p.lambda) {
        if (jj === j && ii === i) {
          v = vv;
          break;
        }
      }
      return { t: p.t, v };
    });
  }

  /** Sum of rendered activations at every windowed tick (chart fidelity). */
  activationSums(): number[] {
    return this.window.map((p) => p.lambda.reduce((acc, e) => acc + e[2], 0));
  }
}
