import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { GLYPH_H, GLYPH_W } from "../src/layout.js";
import { parseModelDocument } from "../src/modelFormat.js";
import { renderSvg } from "../src/render.js";
import { parseWitness } from "../src/tlaceFormat.js";
import {
  loadTlace, position, toggleFold, visibleNodes,
} from "../src/viewgraph.js";

function fixture(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8");
}

const cryptoWitness = parseWitness(fixture("cryptographers.tlace.json"));
const cryptoModel = parseModelDocument(fixture("cryptographers.model.json"));
const bigWitness = parseWitness(fixture("nested-knowledge.tlace.json"));

function overlaps(graph: ReturnType<typeof loadTlace>): number {
  const rects = visibleNodes(graph).map((n) => {
    const p = position(graph, n.id);
    return { id: n.id, x: p.x, y: p.y, w: GLYPH_W, h: GLYPH_H };
  });
  let count = 0;
  for (let i = 0; i < rects.length; i++) {
    for (let j = i + 1; j < rects.length; j++) {
      const a = rects[i];
      const b = rects[j];
      if (a.x < b.x + b.w && b.x < a.x + a.w
          && a.y < b.y + b.h && b.y < a.y + a.h) {
        count++;
      }
    }
  }
  return count;
}

describe("auto layout", () => {
  it("lays each branch path along one horizontal axis", () => {
    const graph = loadTlace(cryptoWitness, cryptoModel);
    for (const branch of graph.branches) {
      const ys = branch.pathIds.map((id) => position(graph, id).y);
      expect(new Set(ys).size).toBeLessThanOrEqual(1);
      const xs = branch.pathIds.map((id) => position(graph, id).x);
      for (let i = 1; i < xs.length; i++) expect(xs[i]).toBeGreaterThan(xs[i - 1]);
    }
  });

  it("routes loop edges back to an earlier node on the same axis", () => {
    const graph = loadTlace(cryptoWitness, cryptoModel);
    for (const edge of graph.edges.filter((e) => e.loopBack)) {
      const from = position(graph, edge.from);
      const to = position(graph, edge.to);
      expect(to.y).toBe(from.y);
      expect(to.x).toBeLessThanOrEqual(from.x);
    }
  });

  it("no two node glyphs overlap on the 37-branch witness", () => {
    const graph = loadTlace(bigWitness, cryptoModel);
    expect(graph.branches.filter((b) => b.pathIds.length > 0).length).toBe(37);
    expect(overlaps(graph)).toBe(0);
  });

  it("no overlaps after folding either", () => {
    let graph = loadTlace(bigWitness, cryptoModel);
    graph = toggleFold(graph, "n0.0.0", 0);
    expect(overlaps(graph)).toBe(0);
  });

  it("is deterministic", () => {
    const one = loadTlace(bigWitness, cryptoModel);
    const two = loadTlace(bigWitness, cryptoModel);
    for (const node of one.nodes) {
      expect(position(two, node.id)).toEqual(position(one, node.id));
    }
    expect(renderSvg(one)).toBe(renderSvg(two));
  });
});

describe("rendering", () => {
  it("draws one glyph per visible vertex and styles edge kinds", () => {
    const graph = loadTlace(cryptoWitness, cryptoModel);
    const svg = renderSvg(graph);
    const glyphs = svg.match(/data-node-id=/g) ?? [];
    expect(glyphs.length).toBe(visibleNodes(graph).length);
    expect(svg).toContain("edge-temporal");
    expect(svg).toContain("edge-reverse");
    expect(svg).toContain("edge-epistemic");
    const loopEdges = svg.match(/edge-loop/g) ?? [];
    expect(loopEdges.length).toBe(graph.edges.filter((e) => e.loopBack).length);
  });

  it("a single node witness renders exactly one vertex", () => {
    const single = parseWitness(JSON.stringify({
      format: 1,
      root: { state: "s0", truncated: false, atomics: [], universals: [],
              branches: [] },
    }));
    const svg = renderSvg(loadTlace(single));
    expect((svg.match(/data-node-id=/g) ?? []).length).toBe(1);
    expect(svg).not.toContain("class=\"edge");
  });

  it("folded branches render a badge with the hidden count", () => {
    let graph = loadTlace(cryptoWitness, cryptoModel);
    const branch = graph.branchByKey.get("n0/0")!;
    graph = toggleFold(graph, "n0", 0);
    const svg = renderSvg(graph);
    expect(svg).toContain("fold-badge");
    expect(svg).toContain(`>${branch.hiddenCount}</text>`);
  });
});
