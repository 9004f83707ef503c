/**
 * Acceptance: visualizer faithfulness.  Loading then re-serializing each
 * bundled export is canonical-identical; fold/unfold/drag leave the
 * structure hash unchanged; loop edges render for every loop marker in the
 * cryptographers export.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseModelDocument } from "../src/modelFormat.js";
import { renderSvg } from "../src/render.js";
import {
  WitnessNode, parseWitness, serializeJson, serializeXml,
} from "../src/tlaceFormat.js";
import {
  autoLayout, drag, loadTlace, structureHash, toggleFold, togglePin,
} from "../src/viewgraph.js";

function fixture(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8");
}

const EXPORTS = [
  "cryptographers.tlace.xml",
  "cryptographers.tlace.json",
  "primality.tlace.json",
  "nested-knowledge.tlace.json",
  "truncated.tlace.json",
];

describe("visualizer faithfulness", () => {
  it("every bundled export re-serializes canonical-identical", () => {
    for (const name of EXPORTS) {
      const text = fixture(name);
      const witness = parseWitness(text);
      const again = name.endsWith(".xml")
        ? serializeXml(witness) : serializeJson(witness);
      expect(again, name).toBe(text);
    }
  });

  it("interactions leave the structure hash unchanged", () => {
    for (const name of EXPORTS) {
      const witness = parseWitness(fixture(name));
      let graph = loadTlace(witness);
      const reference = structureHash(graph);
      graph = toggleFold(graph, "n0", 0);
      graph = drag(graph, "n0", { x: 40, y: 12 });
      graph = togglePin(graph, "phase");
      graph = toggleFold(graph, "n0", 0);
      graph = autoLayout(graph);
      expect(structureHash(graph), name).toBe(reference);
    }
  });

  it("loop edges render for every loop marker in the cryptographers export", () => {
    const witness = parseWitness(fixture("cryptographers.tlace.xml"));
    const model = parseModelDocument(fixture("cryptographers.model.json"));
    const graph = loadTlace(witness, model);
    const markers = countLoopMarkers(witness);
    expect(markers).toBeGreaterThan(0);
    expect(graph.edges.filter((e) => e.loopBack).length).toBe(markers);
    const svg = renderSvg(graph);
    expect((svg.match(/edge-loop/g) ?? []).length).toBe(markers);
  });
});

function countLoopMarkers(node: WitnessNode): number {
  let total = 0;
  for (const branch of node.branches) {
    if (!branch.path) continue;
    if (branch.path.loop !== null) total += 1;
    for (const child of branch.path.nodes) total += countLoopMarkers(child);
  }
  return total;
}
