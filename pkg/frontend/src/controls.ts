// Control events -> outgoing session messages.  Controls are only live in
// controller role; there is no optimistic UI, sliders snap to the values the
// server acknowledges through the stream.

import { CueValue, MessageEncoder } from "./protocol.js";
import { Role } from "./model.js";

export type ControlEvent =
  | { kind: "greediness"; values: number[] }
  | { kind: "speed"; entries: [string, string, number][] }
  | { kind: "bias"; entries: [string, string, number][] }
  | { kind: "cue"; value: CueValue }
  | { kind: "pause" }
  | { kind: "resume" }
  | { kind: "reset"; seed?: number };

export interface Dispatch {
  seq: number;
  frame: string;
}

/**
 * Serializes a control event, or returns null when the connection is not in
 * controller role (controls are disabled for observers).
 */
export function dispatchControl(
  event: ControlEvent,
  role: Role,
  encoder: MessageEncoder,
): Dispatch | null {
  if (role !== "controller") return null;
  switch (event.kind) {
    case "greediness":
      return encoder.encode("set_greediness", { g: event.values });
    case "speed":
      return encoder.encode("set_speed", { entries: event.entries });
    case "bias":
      return encoder.encode("set_bias", { entries: event.entries });
    case "cue":
      return encoder.encode("cue", { value: event.value });
    case "pause":
      return encoder.encode("pause");
    case "resume":
      return encoder.encode("resume");
    case "reset":
      return encoder.encode("reset", event.seed === undefined ? {} : { seed: event.seed });
  }
}

export function claimControl(encoder: MessageEncoder): Dispatch {
  return encoder.encode("claim_control");
}

export function releaseControl(encoder: MessageEncoder): Dispatch {
  return encoder.encode("release_control");
}
