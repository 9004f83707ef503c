/**
 * Deterministic witness layout: the main path of every branch runs along a
 * horizontal axis, child branches are stacked in indented rows below their
 * owner, loop edges return to an earlier vertex on the same axis.
 */

import type { ViewGraph } from "./viewgraph.js";

export interface Point {
  x: number;
  y: number;
}

export const GLYPH_W = 172;
export const GLYPH_H = 56;
export const GAP_X = 48;
export const GAP_Y = 30;
export const INDENT = 30;
export const MARGIN = 24;

interface Block {
  w: number;
  h: number;
}

function visibleRows(graph: ViewGraph, id: string): string[][] {
  return graph.branches
    .filter((b) => b.owner === id && b.pathIds.length > 0
      && !graph.folded.has(b.key))
    .map((b) => b.pathIds);
}

export function layoutPositions(graph: ViewGraph): Map<string, Point> {
  const positions = new Map<string, Point>();
  const blocks = new Map<string, Block>();

  const measure = (id: string): Block => {
    const cached = blocks.get(id);
    if (cached) return cached;
    let w = GLYPH_W;
    let h = GLYPH_H;
    for (const row of visibleRows(graph, id)) {
      let rowWidth = 0;
      let rowHeight = 0;
      row.forEach((child, i) => {
        const block = measure(child);
        rowWidth += block.w + (i > 0 ? GAP_X : 0);
        rowHeight = Math.max(rowHeight, block.h);
      });
      w = Math.max(w, INDENT + rowWidth);
      h += GAP_Y + rowHeight;
    }
    const block = { w, h };
    blocks.set(id, block);
    return block;
  };

  const place = (id: string, x: number, y: number): void => {
    positions.set(id, { x, y });
    let cy = y + GLYPH_H;
    for (const row of visibleRows(graph, id)) {
      cy += GAP_Y;
      let cx = x + INDENT;
      let rowHeight = 0;
      for (const child of row) {
        const block = measure(child);
        place(child, cx, cy);
        cx += block.w + GAP_X;
        rowHeight = Math.max(rowHeight, block.h);
      }
      cy += rowHeight;
    }
  };

  measure("n0");
  place("n0", MARGIN, MARGIN);
  return positions;
}

export function extent(graph: ViewGraph,
                       positions: Map<string, Point>): Block {
  let w = 0;
  let h = 0;
  for (const [, p] of positions) {
    w = Math.max(w, p.x + GLYPH_W + MARGIN);
    h = Math.max(h, p.y + GLYPH_H + MARGIN);
  }
  return { w, h };
}
