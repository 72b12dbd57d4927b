// Render model of the state graph: positions and visual attributes derived
// from one snapshot.  Pure data in, draw list out; the canvas layer just
// executes it.

import { GraphMessage, TraceRecord, denseMatrix } from "./protocol.js";

export interface NodeView {
  name: string;
  x: number;
  y: number;
  opacity: number;   // equals the state's diagonal activation, clamped to [0,1]
  dominant: boolean;
}

export interface EdgeView {
  from: string;
  to: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  weight: number;    // exactly the received off-diagonal activation
  width: number;     // line width derived from weight
  marker: { x: number; y: number } | null;  // phase progress point when active
}

export interface GraphView {
  nodes: NodeView[];
  edges: EdgeView[];
  warnings: string[];
}

export const EDGE_ACTIVE_THRESHOLD = 0.01;
export const MAX_EDGE_WIDTH = 6;

/** States around a circle; deterministic layout, no physics. */
export function layoutPositions(states: string[], width: number, height: number):
    Map<string, { x: number; y: number }> {
  const cx = width / 2;
  const cy = height / 2;
  const r = 0.38 * Math.min(width, height);
  const out = new Map<string, { x: number; y: number }>();
  states.forEach((name, k) => {
    const angle = (2 * Math.PI * k) / states.length - Math.PI / 2;
    out.set(name, { x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) });
  });
  return out;
}

export function buildGraphView(
  graph: GraphMessage,
  snapshot: TraceRecord | null,
  width = 640,
  height = 420,
): GraphView {
  const pos = layoutPositions(graph.states, width, height);
  const n = graph.states.length;
  const warnings: string[] = [];
  const lambda = snapshot ? denseMatrix(snapshot.lambda, n) : null;
  const phi = snapshot ? denseMatrix(snapshot.phi, n) : null;
  if (snapshot) {
    for (const [j, i] of snapshot.lambda) {
      if (j >= n || i >= n) warnings.push(`activation entry references unknown state ${j},${i}`);
    }
    if (snapshot.dominant >= n) warnings.push(`dominant index ${snapshot.dominant} out of range`);
  }

  const nodes: NodeView[] = graph.states.map((name, k) => {
    const p = pos.get(name)!;
    const value = lambda ? lambda[k][k] : 0;
    return {
      name,
      x: p.x,
      y: p.y,
      opacity: Math.min(1, Math.max(0, value)),
      dominant: snapshot ? snapshot.dominant === k : false,
    };
  });

  const edges: EdgeView[] = graph.edges.map(([from, to]) => {
    const a = pos.get(from);
    const b = pos.get(to);
    if (!a || !b) {
      warnings.push(`edge ${from}->${to} references unknown state`);
      return {
        from, to, x1: 0, y1: 0, x2: 0, y2: 0, weight: 0, width: 0, marker: null,
      };
    }
    const j = graph.states.indexOf(to);
    const i = graph.states.indexOf(from);
    const weight = lambda ? lambda[j][i] : 0;
    const progress = phi ? phi[j][i] : 0;
    const active = weight > EDGE_ACTIVE_THRESHOLD;
    return {
      from,
      to,
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      weight,
      width: 0.5 + MAX_EDGE_WIDTH * Math.min(1, Math.max(0, weight)),
      marker: active
        ? { x: a.x + (b.x - a.x) * progress, y: a.y + (b.y - a.y) * progress }
        : null,
    };
  });

  return { nodes, edges, warnings };
}
