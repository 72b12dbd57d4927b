import { describe, expect, it } from "vitest";

import {
  MessageEncoder, ProtocolError, activationSum, denseMatrix, parseServerMessage,
} from "../src/protocol.js";

describe("parseServerMessage", () => {
  it("accepts well-formed snapshots", () => {
    const raw = JSON.stringify({
      version: 1, seq: 3, type: "snapshot",
      data: { tick: 0, t: 0, x: [1, 0, 0], dominant: 0, lambda: [], phi: [], eta: 1, delta_dot: [], g: [], cue: null, command: null },
    });
    const msg = parseServerMessage(raw);
    expect(msg.type).toBe("snapshot");
  });

  it("rejects wrong version, bad json, unknown types", () => {
    expect(() => parseServerMessage("{")).toThrow(ProtocolError);
    expect(() => parseServerMessage(JSON.stringify({ version: 2, seq: 1, type: "snapshot" })))
      .toThrow(/version/);
    expect(() => parseServerMessage(JSON.stringify({ version: 1, seq: 1, type: "surprise" })))
      .toThrow(/unknown/);
    expect(() => parseServerMessage(JSON.stringify({ version: 1, type: "ack" })))
      .toThrow(/sequence/);
  });
});

describe("MessageEncoder", () => {
  it("stamps strictly increasing sequence numbers", () => {
    const enc = new MessageEncoder();
    const a = enc.encode("claim_control");
    const b = enc.encode("set_greediness", { g: [1, 2] });
    expect(a.seq).toBe(1);
    expect(b.seq).toBe(2);
    const parsed = JSON.parse(b.frame);
    expect(parsed.version).toBe(1);
    expect(parsed.g).toEqual([1, 2]);
  });
});

describe("sparse helpers", () => {
  it("expands sparse entries densely and sums activations", () => {
    const rec = {
      tick: 0, t: 0, x: [0.7, 0.7, 0], dominant: 0,
      lambda: [[1, 0, 0.9], [0, 0, 0.05], [1, 1, 0.05]] as [number, number, number][],
      phi: [[1, 0, 0.5]] as [number, number, number][],
      eta: 1, delta_dot: [0, 0, 0], g: [1, 1, 1], cue: null, command: null,
    };
    const dense = denseMatrix(rec.lambda, 3);
    expect(dense[1][0]).toBe(0.9);
    expect(dense[2][2]).toBe(0);
    expect(activationSum(rec)).toBeCloseTo(1.0, 10);
  });
});
