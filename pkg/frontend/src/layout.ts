/** Deterministic force-directed layout.
 *
 * No randomness beyond a seeded PRNG, a fixed iteration count, and inputs
 * ordered by node id — the same graph always lands on the same pixels, so
 * staged screenshots stay comparable.
 */

import type { GraphEdge, GraphNode } from './types.js';

export interface PlacedNode extends GraphNode {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  seed: number;
  iterations: number;
  springLength: number;
  repulsion: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  width: 900,
  height: 560,
  seed: 42,
  iterations: 250,
  springLength: 150,
  repulsion: 24000,
};

/** mulberry32: tiny, fast, reproducible. */
export function seededRandom(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutGraph(
  nodes: GraphNode[],
  edges: GraphEdge[],
  options: Partial<LayoutOptions> = {},
): PlacedNode[] {
  const opts = { ...DEFAULT_LAYOUT, ...options };
  const random = seededRandom(opts.seed);
  const ordered = [...nodes].sort((a, b) => a.id.localeCompare(b.id));
  const placed: PlacedNode[] = ordered.map((node, index) => {
    const angle = (2 * Math.PI * index) / Math.max(ordered.length, 1);
    const radius = Math.min(opts.width, opts.height) / 3;
    return {
      ...node,
      x: opts.width / 2 + radius * Math.cos(angle) + (random() - 0.5) * 20,
      y: opts.height / 2 + radius * Math.sin(angle) + (random() - 0.5) * 20,
    };
  });
  const byId = new Map(placed.map((n) => [n.id, n]));
  const springs: Array<[PlacedNode, PlacedNode]> = [];
  for (const edge of edges) {
    const a = byId.get(edge.source);
    const b = byId.get(edge.target);
    if (a && b) springs.push([a, b]);
  }
  // classes hug their parent concept
  for (const node of placed) {
    if (node.parent) {
      const parent = byId.get(node.parent);
      if (parent) springs.push([node, parent]);
    }
  }

  for (let step = 0; step < opts.iterations; step++) {
    const cooling = 1 - step / opts.iterations;
    for (const a of placed) {
      let fx = 0;
      let fy = 0;
      for (const b of placed) {
        if (a === b) continue;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const distSq = Math.max(dx * dx + dy * dy, 1);
        const push = opts.repulsion / distSq;
        const dist = Math.sqrt(distSq);
        fx += (dx / dist) * push;
        fy += (dy / dist) * push;
      }
      for (const [s, t] of springs) {
        if (s !== a && t !== a) continue;
        const other = s === a ? t : s;
        const dx = other.x - a.x;
        const dy = other.y - a.y;
        const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
        const pull = (dist - opts.springLength) * 0.02;
        fx += (dx / dist) * pull;
        fy += (dy / dist) * pull;
      }
      // gentle centering
      fx += (opts.width / 2 - a.x) * 0.001;
      fy += (opts.height / 2 - a.y) * 0.001;
      const limit = 18 * cooling + 2;
      const norm = Math.sqrt(fx * fx + fy * fy);
      if (norm > limit) {
        fx = (fx / norm) * limit;
        fy = (fy / norm) * limit;
      }
      a.x = Math.min(Math.max(a.x + fx, 30), opts.width - 30);
      a.y = Math.min(Math.max(a.y + fy, 30), opts.height - 30);
    }
  }
  return placed;
}
