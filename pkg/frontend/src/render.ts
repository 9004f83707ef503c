/**
 * Pure SVG rendering of a view graph: one glyph per visible vertex, solid
 * arrows for temporal edges, dashed for reverse, wavy for epistemic, arcs
 * for loop-backs, elbow connectors with the branch formula, fold badges
 * with hidden-node counts.  Interactive hit targets carry data attributes.
 */

import { GLYPH_H, GLYPH_W, Point, extent } from "./layout.js";
import {
  ViewEdge, ViewGraph, branchKey, isVisible, nodeLabel, position, visibleEdges,
  visibleNodes,
} from "./viewgraph.js";

const KIND_CLASS = {
  temporal: "edge-temporal",
  reverse: "edge-reverse",
  epistemic: "edge-epistemic",
  plain: "edge-plain",
};

function escape(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function wavePath(from: Point, to: Point): string {
  // quadratic wave segments along the straight line
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const length = Math.hypot(dx, dy) || 1;
  const segments = Math.max(2, Math.round(length / 18));
  const nx = -dy / length;
  const ny = dx / length;
  const amplitude = 5;
  let d = `M ${from.x.toFixed(1)} ${from.y.toFixed(1)}`;
  for (let i = 0; i < segments; i++) {
    const t0 = i / segments;
    const t1 = (i + 1) / segments;
    const mx = from.x + dx * (t0 + t1) / 2 + nx * amplitude * (i % 2 === 0 ? 1 : -1);
    const my = from.y + dy * (t0 + t1) / 2 + ny * amplitude * (i % 2 === 0 ? 1 : -1);
    d += ` Q ${mx.toFixed(1)} ${my.toFixed(1)}`
      + ` ${(from.x + dx * t1).toFixed(1)} ${(from.y + dy * t1).toFixed(1)}`;
  }
  return d;
}

function anchoredEndpoints(a: Point, b: Point): [Point, Point] {
  const centerA = { x: a.x + GLYPH_W / 2, y: a.y + GLYPH_H / 2 };
  const centerB = { x: b.x + GLYPH_W / 2, y: b.y + GLYPH_H / 2 };
  const clip = (center: Point, toward: Point): Point => {
    const dx = toward.x - center.x;
    const dy = toward.y - center.y;
    const sx = dx === 0 ? Infinity : (GLYPH_W / 2) / Math.abs(dx);
    const sy = dy === 0 ? Infinity : (GLYPH_H / 2) / Math.abs(dy);
    const s = Math.min(sx, sy, 0.5);
    return { x: center.x + dx * s, y: center.y + dy * s };
  };
  return [clip(centerA, centerB), clip(centerB, centerA)];
}

function renderEdge(graph: ViewGraph, edge: ViewEdge): string {
  const from = position(graph, edge.from);
  const to = position(graph, edge.to);
  const cls = KIND_CLASS[edge.kind];
  const label = escape(edge.action);
  if (edge.loopBack) {
    const startX = from.x + GLYPH_W / 2 + (edge.from === edge.to ? 26 : 0);
    const startY = from.y + GLYPH_H;
    const endX = to.x + GLYPH_W / 2 - (edge.from === edge.to ? 26 : 0);
    const endY = to.y + GLYPH_H;
    const dip = Math.max(startY, endY) + 34;
    const d = `M ${startX} ${startY} C ${startX} ${dip}, ${endX} ${dip},`
      + ` ${endX} ${endY}`;
    return `<g class="edge ${cls} edge-loop" data-edge="${edge.from}->${edge.to}">`
      + `<path d="${d}" fill="none" marker-end="url(#arrow)" />`
      + `<text x="${(startX + endX) / 2}" y="${dip - 4}">${label}</text></g>`;
  }
  const [a, b] = anchoredEndpoints(from, to);
  const midX = (a.x + b.x) / 2;
  const midY = (a.y + b.y) / 2 - 5;
  const shape = edge.kind === "epistemic"
    ? `<path d="${wavePath(a, b)}" fill="none" marker-end="url(#arrow)" />`
    : `<line x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"`
      + ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}"`
      + ` marker-end="url(#arrow)" />`;
  return `<g class="edge ${cls}" data-edge="${edge.from}->${edge.to}">`
    + `${shape}<text x="${midX}" y="${midY}">${label}</text></g>`;
}

function renderConnectors(graph: ViewGraph): string {
  const parts: string[] = [];
  for (const branch of graph.branches) {
    if (branch.pathIds.length === 0 || graph.folded.has(branch.key)) continue;
    if (!isVisible(graph, branch.owner)) continue;
    const owner = position(graph, branch.owner);
    const first = position(graph, branch.pathIds[0]);
    const startX = owner.x + 14;
    const startY = owner.y + GLYPH_H;
    const midY = first.y + GLYPH_H / 2;
    const d = `M ${startX} ${startY} L ${startX} ${midY} L ${first.x} ${midY}`;
    parts.push(
      `<g class="connector" data-branch="${escape(branch.key)}">`
      + `<path d="${d}" fill="none" />`
      + `<text x="${startX + 6}" y="${midY - 6}">${escape(branch.formula)}</text>`
      + `</g>`);
  }
  return parts.join("");
}

function renderNode(graph: ViewGraph, id: string): string {
  const node = graph.nodeById.get(id)!;
  const p = position(graph, id);
  const selected = graph.selection?.kind === "node" && graph.selection.id === id;
  const lines = nodeLabel(graph, id);
  const text = lines.map((line, i) =>
    `<text x="${p.x + 8}" y="${p.y + 20 + i * 14}"`
    + ` class="${i === 0 ? "node-state" : "node-var"}">${escape(line)}</text>`)
    .join("");
  const annotationMark = node.witness.atomics.length + node.witness.universals.length;
  const badges: string[] = [];
  node.witness.branches.forEach((branch, bi) => {
    const key = branchKey(id, bi);
    const view = graph.branchByKey.get(key)!;
    if (branch.path !== null && graph.folded.has(key)) {
      const bx = p.x + GLYPH_W - 16 - badges.length * 34;
      const by = p.y + GLYPH_H - 2;
      badges.push(
        `<g class="fold-badge" data-fold="${escape(key)}">`
        + `<circle cx="${bx}" cy="${by}" r="12" />`
        + `<text x="${bx}" y="${by + 4}">${view.hiddenCount}</text></g>`);
    }
  });
  return `<g class="node${selected ? " selected" : ""}`
    + `${node.witness.branches.some((b) => b.path === null) ? " truncated" : ""}"`
    + ` data-node-id="${escape(id)}">`
    + `<rect x="${p.x}" y="${p.y}" width="${GLYPH_W}" height="${GLYPH_H}"`
    + ` rx="6" />`
    + text
    + (annotationMark > 0
      ? `<text x="${p.x + GLYPH_W - 8}" y="${p.y + 16}" class="node-mark"`
        + ` text-anchor="end">${annotationMark}</text>`
      : "")
    + badges.join("")
    + `</g>`;
}

export function renderSvg(graph: ViewGraph): string {
  const size = extent(graph, new Map(
    visibleNodes(graph).map((n) => [n.id, position(graph, n.id)])));
  const defs = `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5"`
    + ` markerWidth="7" markerHeight="7" orient="auto-start-reverse">`
    + `<path d="M 0 0 L 10 5 L 0 10 z" /></marker></defs>`;
  const connectors = renderConnectors(graph);
  const edges = visibleEdges(graph).map((e) => renderEdge(graph, e)).join("");
  const nodes = visibleNodes(graph).map((n) => renderNode(graph, n.id)).join("");
  return `<svg xmlns="http://www.w3.org/2000/svg"`
    + ` viewBox="0 0 ${Math.max(size.w, 200)} ${Math.max(size.h, 120)}"`
    + ` width="${Math.max(size.w, 200)}" height="${Math.max(size.h, 120)}">`
    + `${defs}${connectors}${edges}${nodes}</svg>`;
}
