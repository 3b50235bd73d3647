/** SVG concept-graph view with highlight support.
 *
 * The view is a pure function of the latest graph payload plus a highlight
 * set; re-rendering after every statement keeps it equal to the server's
 * state at the reported revision.
 */

import { layoutGraph, PlacedNode } from './layout.js';
import type { GraphEdge, GraphPayload } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface GraphHighlights {
  nodes: Set<string>;
  edges: Set<string>;
}

export function emptyHighlights(): GraphHighlights {
  return { nodes: new Set(), edges: new Set() };
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

function edgeId(edge: GraphEdge): string {
  return edge.kind === 'frame' ? edge.label : `${edge.source}->${edge.target}`;
}

export class GraphView {
  private placed: PlacedNode[] = [];

  constructor(private readonly svg: SVGSVGElement) {}

  render(graph: GraphPayload, highlights: GraphHighlights = emptyHighlights()): void {
    const width = Number(this.svg.getAttribute('width') ?? 900);
    const height = Number(this.svg.getAttribute('height') ?? 560);
    this.placed = layoutGraph(graph.nodes, graph.edges, { width, height });
    const byId = new Map(this.placed.map((n) => [n.id, n]));
    this.svg.replaceChildren();

    const defs = svgEl('defs', {});
    const marker = svgEl('marker', {
      id: 'arrow', viewBox: '0 0 10 10', refX: '24', refY: '5',
      markerWidth: '7', markerHeight: '7', orient: 'auto-start-reverse',
    });
    marker.appendChild(svgEl('path', { d: 'M 0 0 L 10 5 L 0 10 z', fill: '#546' }));
    defs.appendChild(marker);
    this.svg.appendChild(defs);

    for (const node of this.placed) {
      if (!node.parent) continue;
      const parent = byId.get(node.parent);
      if (!parent) continue;
      this.svg.appendChild(svgEl('line', {
        x1: String(parent.x), y1: String(parent.y),
        x2: String(node.x), y2: String(node.y),
        class: 'membership',
      }));
    }
    for (const edge of graph.edges) {
      const a = byId.get(edge.source);
      const b = byId.get(edge.target);
      if (!a || !b) continue;
      const lit = highlights.edges.has(edgeId(edge));
      const line = svgEl('line', {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        class: `edge ${edge.kind}${lit ? ' lit' : ''}`,
        'data-edge': edgeId(edge),
      });
      if (edge.kind === 'frame') line.setAttribute('marker-end', 'url(#arrow)');
      this.svg.appendChild(line);
      if (edge.label) {
        const label = svgEl('text', {
          x: String((a.x + b.x) / 2), y: String((a.y + b.y) / 2 - 6),
          class: `edge-label${lit ? ' lit' : ''}`,
        });
        label.textContent = edge.label;
        this.svg.appendChild(label);
      }
    }
    for (const node of this.placed) {
      const lit = highlights.nodes.has(node.id);
      const group = svgEl('g', {
        class: `node ${node.kind}${lit ? ' lit' : ''}`,
        'data-node': node.id,
      });
      const shape = node.kind === 'concept'
        ? svgEl('ellipse', { cx: String(node.x), cy: String(node.y), rx: '52', ry: '24' })
        : svgEl('rect', {
            x: String(node.x - 42), y: String(node.y - 16),
            width: '84', height: '32', rx: '4',
          });
      group.appendChild(shape);
      const text = svgEl('text', { x: String(node.x), y: String(node.y + 4) });
      text.textContent = node.label;
      group.appendChild(text);
      this.svg.appendChild(group);
    }
  }

  /** Light the frame edges one by one (derivation playback). */
  async playHighlights(frames: string[], delayMs = 450): Promise<void> {
    for (const frame of frames) {
      const edge = this.svg.querySelector(`[data-edge="${CSS.escape(frame)}"]`);
      const label = [...this.svg.querySelectorAll('.edge-label')]
        .find((el) => el.textContent === frame);
      edge?.classList.add('lit');
      label?.classList.add('lit');
      await new Promise((resolve) => setTimeout(resolve, delayMs));
    }
  }
}
