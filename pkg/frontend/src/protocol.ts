// Wire protocol types and codecs; mirrors docs/protocol.md on the server side.

export const PROTOCOL_VERSION = 1;

export type CueValue =
  | "none"
  | "left_extended"
  | "right_extended"
  | "both_extended"
  | "disengaged";

export type SparseEntry = [number, number, number]; // [to, from, value]

export interface BlendedCommand {
  mean: number[];
  cov: number[][];
  weights: [string, number][];
}

export interface TraceRecord {
  tick: number;
  t: number;
  x: number[];
  dominant: number;
  lambda: SparseEntry[];
  phi: SparseEntry[];
  eta: number;
  delta_dot: number[];
  g: number[];
  cue: CueValue | null;
  command: BlendedCommand | null;
}

export interface GraphMessage {
  type: "graph";
  version: number;
  seq: number;
  states: string[];
  edges: [string, string][];
  dt: number;
  publish_interval: number;
  role: "observer" | "controller";
}

export interface SnapshotMessage {
  type: "snapshot";
  version: number;
  seq: number;
  data: TraceRecord;
}

export interface AckMessage {
  type: "ack";
  version: number;
  seq: number;
  of: number;
  applied?: string;
  role?: "observer" | "controller";
}

export interface ErrorMessage {
  type: "error";
  version: number;
  seq: number;
  code: string;
  detail: string;
}

export type ServerMessage = GraphMessage | SnapshotMessage | AckMessage | ErrorMessage;

export class ProtocolError extends Error {}

export function parseServerMessage(raw: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    throw new ProtocolError("frame is not valid JSON");
  }
  const msg = obj as Record<string, unknown>;
  if (msg.version !== PROTOCOL_VERSION) {
    throw new ProtocolError(`unsupported protocol version ${msg.version}`);
  }
  if (typeof msg.seq !== "number") {
    throw new ProtocolError("missing sequence number");
  }
  const type = msg.type;
  if (type === "graph" || type === "snapshot" || type === "ack" || type === "error") {
    return msg as unknown as ServerMessage;
  }
  throw new ProtocolError(`unknown server message type ${String(type)}`);
}

/** Builds outgoing frames with the per-connection sequence number. */
export class MessageEncoder {
  private seq = 0;

  encode(type: string, payload: Record<string, unknown> = {}): { seq: number; frame: string } {
    this.seq += 1;
    const frame = JSON.stringify({ version: PROTOCOL_VERSION, seq: this.seq, type, ...payload });
    return { seq: this.seq, frame };
  }
}

/** Expands the sparse activation entries into a dense n x n matrix. */
export function denseMatrix(entries: SparseEntry[], n: number): number[][] {
  const out: number[][] = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (const [j, i, v] of entries) {
    if (j >= 0 && j < n && i >= 0 && i < n) out[j][i] = v;
  }
  return out;
}

/** Sum of all received activation entries (diagonal + transitions). */
export function activationSum(rec: TraceRecord): number {
  let total = 0;
  for (const [, , v] of rec.lambda) total += v;
  return total;
}
