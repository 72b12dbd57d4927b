// Rolling time-series render model for the activation/phase charts.

import { WindowPoint } from "./model.js";

export interface Polyline {
  label: string;
  color: string;
  points: { x: number; y: number }[];
}

const PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
  "#b279a2", "#eeca3b", "#9d755d"];

export function colorFor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

function pick(entries: [number, number, number][], j: number, i: number): number {
  for (const [jj, ii, v] of entries) {
    if (jj === j && ii === i) return v;
  }
  return 0;
}

/**
 * Maps the rolling window onto chart coordinates.  One polyline per state
 * (diagonal activations) and one per edge present in the window; values are
 * plotted exactly as received.
 */
export function activationPolylines(
  window: WindowPoint[],
  states: string[],
  edges: [string, string][],
  width: number,
  height: number,
  windowSeconds: number,
): Polyline[] {
  if (!window.length) return [];
  const tEnd = window[window.length - 1].t;
  const tStart = tEnd - windowSeconds;
  const sx = (t: number) => ((t - tStart) / windowSeconds) * width;
  const sy = (v: number) => height - v * height;
  const lines: Polyline[] = [];
  states.forEach((name, k) => {
    lines.push({
      label: name,
      color: colorFor(k),
      points: window.map((p) => ({ x: sx(p.t), y: sy(pick(p.lambda, k, k)) })),
    });
  });
  edges.forEach(([from, to]) => {
    const j = states.indexOf(to);
    const i = states.indexOf(from);
    const values = window.map((p) => pick(p.lambda, j, i));
    if (values.some((v) => v > 0.01)) {
      lines.push({
        label: `${from}→${to}`,
        color: colorFor(j),
        points: window.map((p, k) => ({ x: sx(p.t), y: sy(values[k]) })),
      });
    }
  });
  return lines;
}

export function phasePolylines(
  window: WindowPoint[],
  states: string[],
  edges: [string, string][],
  width: number,
  height: number,
  windowSeconds: number,
): Polyline[] {
  if (!window.length) return [];
  const tEnd = window[window.length - 1].t;
  const tStart = tEnd - windowSeconds;
  const sx = (t: number) => ((t - tStart) / windowSeconds) * width;
  const sy = (v: number) => height - v * height;
  const lines: Polyline[] = [];
  edges.forEach(([from, to]) => {
    const j = states.indexOf(to);
    const i = states.indexOf(from);
    const pts: { x: number; y: number }[] = [];
    window.forEach((p) => {
      if (pick(p.lambda, j, i) > 0.01) {
        pts.push({ x: sx(p.t), y: sy(pick(p.phi, j, i)) });
      }
    });
    if (pts.length) {
      lines.push({ label: `${from}→${to}`, color: colorFor(j), points: pts });
    }
  });
  return lines;
}
