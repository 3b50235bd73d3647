import { describe, expect, it } from 'vitest';

import { layoutGraph, seededRandom } from '../src/layout.js';
import type { GraphEdge, GraphNode } from '../src/types.js';

const NODES: GraphNode[] = [
  { id: 'Humans', label: 'Humans', kind: 'concept' },
  { id: 'Breakable', label: 'Breakable', kind: 'concept' },
  { id: 'See well', label: 'See well', kind: 'concept' },
  { id: 'Humans::Glasses', label: 'Glasses', kind: 'class', parent: 'Humans' },
];

const EDGES: GraphEdge[] = [
  { source: 'Humans', target: 'See well', label: 'TO SEE', kind: 'frame' },
  { source: 'Humans', target: 'Breakable', label: 'TO LET FALL', kind: 'frame' },
];

describe('seededRandom', () => {
  it('reproduces the same sequence for the same seed', () => {
    const a = seededRandom(42);
    const b = seededRandom(42);
    const first = [a(), a(), a(), a()];
    const second = [b(), b(), b(), b()];
    expect(first).toEqual(second);
  });

  it('differs for different seeds', () => {
    expect(seededRandom(1)()).not.toBe(seededRandom(2)());
  });
});

describe('layoutGraph', () => {
  it('is deterministic, so staged screenshots stay comparable', () => {
    const first = layoutGraph(NODES, EDGES);
    const second = layoutGraph(NODES, EDGES);
    expect(first).toEqual(second);
  });

  it('ignores input node order', () => {
    const reversed = layoutGraph([...NODES].reverse(), EDGES);
    const straight = layoutGraph(NODES, EDGES);
    const byId = new Map(straight.map((n) => [n.id, n]));
    for (const node of reversed) {
      expect(node.x).toBeCloseTo(byId.get(node.id)!.x, 10);
      expect(node.y).toBeCloseTo(byId.get(node.id)!.y, 10);
    }
  });

  it('keeps every node inside the viewport', () => {
    const placed = layoutGraph(NODES, EDGES, { width: 400, height: 300 });
    for (const node of placed) {
      expect(node.x).toBeGreaterThanOrEqual(30);
      expect(node.x).toBeLessThanOrEqual(370);
      expect(node.y).toBeGreaterThanOrEqual(30);
      expect(node.y).toBeLessThanOrEqual(270);
    }
  });

  it('pulls a class toward its parent concept', () => {
    const placed = layoutGraph(NODES, EDGES);
    const byId = new Map(placed.map((n) => [n.id, n]));
    const humans = byId.get('Humans')!;
    const glasses = byId.get('Humans::Glasses')!;
    const breakable = byId.get('Breakable')!;
    const dist = Math.hypot(glasses.x - humans.x, glasses.y - humans.y);
    const far = Math.hypot(breakable.x - glasses.x, breakable.y - glasses.y);
    expect(dist).toBeLessThan(far * 1.5);
  });
});
