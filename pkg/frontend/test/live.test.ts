// End-to-end against a real server: spawns `phasta serve` and drives the
// same view-model/protocol code the browser uses through a ws socket.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { SessionViewModel } from "../src/model.js";
import { MessageEncoder, parseServerMessage } from "../src/protocol.js";

const PORT = 18000 + Math.floor(Math.random() * 2000);
let server: ChildProcess;

class Harness {
  model = new SessionViewModel();
  encoder = new MessageEncoder();
  snapshots = 0;
  snapshotTimes: number[] = [];
  ws: WebSocket;
  ready: Promise<void>;

  // listeners attach synchronously at construction so the greeting frame
  // sent by the server on accept can never be lost
  constructor(port: number) {
    this.ws = new WebSocket(`ws://127.0.0.1:${port}`);
    this.ws.on("message", (raw) => {
      const msg = parseServerMessage(raw.toString());
      if (msg.type === "snapshot") {
        this.snapshots += 1;
        this.snapshotTimes.push(Date.now());
      }
      this.model.onMessage(msg, Date.now());
    });
    this.ready = new Promise((resolve, reject) => {
      this.ws.once("open", () => {
        this.model.onOpen();
        resolve();
      });
      this.ws.once("error", (err) => reject(err));
    });
  }

  close(): void {
    this.ws.close();
  }

  send(type: string, payload: Record<string, unknown> = {}): number {
    const { seq, frame } = this.encoder.encode(type, payload);
    this.ws.send(frame);
    return seq;
  }

  async waitFor<T>(probe: () => T | undefined, ms = 10000): Promise<T> {
    const deadline = Date.now() + ms;
    for (;;) {
      const got = probe();
      if (got !== undefined) return got;
      if (Date.now() > deadline) throw new Error("timeout waiting for condition");
      await new Promise((r) => setTimeout(r, 10));
    }
  }

  /** Claims the controller token, retrying while a previous (closing)
   * connection still holds it. */
  async claimUntilGranted(ms = 10000): Promise<void> {
    const deadline = Date.now() + ms;
    for (;;) {
      this.send("claim_control");
      try {
        await this.waitFor(() => (this.model.role === "controller" ? true : undefined), 500);
        return;
      } catch {
        if (Date.now() > deadline) throw new Error("controller token never granted");
      }
    }
  }
}

async function openHarness(): Promise<Harness> {
  const deadline = Date.now() + 15000;
  for (;;) {
    const h = new Harness(PORT);
    try {
      await h.ready;
      return h;
    } catch {
      h.close();
      if (Date.now() > deadline) throw new Error("server did not come up");
      await new Promise((r) => setTimeout(r, 250));
    }
  }
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "phasta.cli", "serve", "--bind", `127.0.0.1:${PORT}`],
    { stdio: ["ignore", "pipe", "pipe"] });
}, 20000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("live session", () => {
  it("streams at >= 10 Hz, honors control round-trips, and keeps the rendered "
     + "activation partition within 1 +- 0.02", async () => {
    const h = await openHarness();
    try {
      await h.waitFor(() => (h.model.graph ? true : undefined));
      expect(h.model.graph!.states).toContain("reach_left");
      expect(h.model.role).toBe("observer");

      // snapshot rate over one second of wall clock
      const before = h.snapshots;
      await new Promise((r) => setTimeout(r, 1000));
      const rate = h.snapshots - before;
      expect(rate).toBeGreaterThanOrEqual(10);

      // claim control; a greediness change must reach the stream within
      // three publish intervals
      await h.claimUntilGranted();

      const n = h.model.graph!.states.length;
      const g = new Array<number>(n).fill(1);
      g[0] = 0.5;
      const sentAtSnapshot = h.snapshots;
      h.send("set_greediness", { g });
      const seen = await h.waitFor(() =>
        (h.model.latest && h.model.latest.g[0] === 0.5 ? h.snapshots : undefined));
      expect(seen - sentAtSnapshot).toBeLessThanOrEqual(3);

      // rendered sums stay within 1 +- 0.02 at every windowed tick
      const sums = h.model.activationSums();
      expect(sums.length).toBeGreaterThan(20);
      for (const s of sums) {
        expect(Math.abs(s - 1)).toBeLessThanOrEqual(0.02);
      }

      // no frames were dropped or reordered along the way
      expect(h.model.protocolErrors).toBe(0);
      h.send("release_control");
    } finally {
      h.close();
    }
  }, 30000);

  it("keeps a second connection read-only", async () => {
    const ha = await openHarness();
    const hb = await openHarness();
    try {
      await ha.waitFor(() => (ha.model.graph ? true : undefined));
      await hb.waitFor(() => (hb.model.graph ? true : undefined));
      await ha.claimUntilGranted();
      hb.send("claim_control");
      await hb.waitFor(() =>
        (hb.model.errors.some((e) => e.code === "controller_taken") ? true : undefined));
      expect(hb.model.role).toBe("observer");
      hb.send("pause");
      await hb.waitFor(() =>
        (hb.model.errors.some((e) => e.code === "not_controller") ? true : undefined));
    } finally {
      ha.close();
      hb.close();
    }
  }, 30000);
});
