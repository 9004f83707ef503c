/**
 * Browser wiring: file loading, the SVG canvas with select/fold/drag,
 * the inspector side panel with variable pinning, and SVG export.
 * All state lives in an immutable ViewGraph; every interaction swaps it.
 */

import { parseModelDocument } from "./modelFormat.js";
import { renderSvg } from "./render.js";
import { SchemaViolation, parseWitness, serializeJson } from "./tlaceFormat.js";
import {
  DetailPanel, Selection, ViewGraph, autoLayout, drag, inspect, loadTlace,
  select, toggleFold, togglePin,
} from "./viewgraph.js";

let graph: ViewGraph | null = null;

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function banner(message: string | null): void {
  const element = byId<HTMLDivElement>("banner");
  element.textContent = message ?? "";
  element.style.display = message ? "block" : "none";
}

function redraw(): void {
  const canvas = byId<HTMLDivElement>("canvas");
  if (!graph) {
    canvas.innerHTML = "";
    return;
  }
  canvas.innerHTML = renderSvg(graph);
  renderPanel(inspect(graph, graph.selection));
  wireCanvas(canvas);
}

function renderPanel(panel: DetailPanel): void {
  const element = byId<HTMLDivElement>("panel");
  const parts: string[] = [`<h2>${escapeHtml(panel.title)}</h2>`];
  parts.push(`<div class="columns">`);
  for (const column of panel.columns) {
    parts.push(`<div class="column"><h3>${escapeHtml(column.title)}</h3>`);
    for (const group of column.groups) {
      parts.push(`<details open><summary>${escapeHtml(group.title)}</summary><ul>`);
      for (const item of group.items) {
        const pin = item.pinnable
          ? ` <button class="pin" data-pin="${escapeHtml(item.pinnable)}">`
            + `${graph?.pinned.includes(item.pinnable) ? "unpin" : "pin"}</button>`
          : "";
        parts.push(`<li><span class="label">${escapeHtml(item.label)}</span>`
          + ` <span class="value">${escapeHtml(item.value)}</span>${pin}</li>`);
      }
      parts.push(`</ul></details>`);
    }
    parts.push(`</div>`);
  }
  parts.push(`</div>`);
  element.innerHTML = parts.join("");
  element.querySelectorAll<HTMLButtonElement>("button.pin").forEach((button) => {
    button.addEventListener("click", () => {
      if (!graph) return;
      graph = togglePin(graph, button.dataset.pin!);
      redraw();
    });
  });
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

interface DragState {
  id: string;
  lastX: number;
  lastY: number;
  moved: boolean;
}

let dragging: DragState | null = null;

function wireCanvas(canvas: HTMLDivElement): void {
  const svg = canvas.querySelector("svg");
  if (!svg) return;
  svg.querySelectorAll<SVGGElement>("g.fold-badge").forEach((badge) => {
    badge.addEventListener("click", (event) => {
      event.stopPropagation();
      applyFold(badge.dataset.fold!);
    });
  });
  svg.querySelectorAll<SVGGElement>("g.connector").forEach((connector) => {
    connector.addEventListener("click", () => {
      if (!graph) return;
      graph = select(graph, { kind: "path", branchKey: connector.dataset.branch! });
      redraw();
    });
    connector.addEventListener("dblclick", () => {
      applyFold(connector.dataset.branch!);
    });
  });
  svg.querySelectorAll<SVGGElement>("g.node").forEach((node) => {
    const id = node.dataset.nodeId!;
    node.addEventListener("pointerdown", (event) => {
      dragging = { id, lastX: event.clientX, lastY: event.clientY, moved: false };
      node.setPointerCapture(event.pointerId);
    });
    node.addEventListener("pointermove", (event) => {
      if (!dragging || dragging.id !== id || !graph) return;
      const dx = event.clientX - dragging.lastX;
      const dy = event.clientY - dragging.lastY;
      if (dx === 0 && dy === 0) return;
      dragging.lastX = event.clientX;
      dragging.lastY = event.clientY;
      dragging.moved = true;
      graph = drag(graph, id, { x: dx, y: dy }, !event.shiftKey ? true : false);
      redrawKeepingDrag();
    });
    node.addEventListener("pointerup", () => {
      if (dragging && dragging.id === id && !dragging.moved && graph) {
        graph = select(graph, { kind: "node", id });
        redraw();
      }
      dragging = null;
    });
  });
}

function redrawKeepingDrag(): void {
  // re-render without resetting pointer capture targets' listeners
  const canvas = byId<HTMLDivElement>("canvas");
  if (!graph) return;
  canvas.innerHTML = renderSvg(graph);
  wireCanvas(canvas);
}

function applyFold(key: string): void {
  if (!graph) return;
  const slash = key.lastIndexOf("/");
  graph = toggleFold(graph, key.slice(0, slash), Number(key.slice(slash + 1)));
  redraw();
}

function loadWitnessText(text: string): void {
  try {
    const witness = parseWitness(text);
    const model = graph?.model ?? null;
    graph = loadTlace(witness, model);
    banner(null);
    redraw();
  } catch (error) {
    graph = null;
    redraw();
    if (error instanceof SchemaViolation) {
      banner(`schema violation at ${error.path}: ${error.message}`);
    } else {
      banner(`cannot load witness: ${(error as Error).message}`);
    }
  }
}

function loadModelText(text: string): void {
  try {
    const model = parseModelDocument(text);
    if (graph) graph = loadTlace(graph.root, model);
    banner(null);
    redraw();
  } catch (error) {
    banner(`cannot load model: ${(error as Error).message}`);
  }
}

function wireFileInput(id: string, handler: (text: string) => void): void {
  byId<HTMLInputElement>(id).addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file) handler(await file.text());
  });
}

export function start(): void {
  wireFileInput("witness-file", loadWitnessText);
  wireFileInput("model-file", loadModelText);
  byId<HTMLButtonElement>("relayout").addEventListener("click", () => {
    if (!graph) return;
    graph = autoLayout(graph);
    redraw();
  });
  byId<HTMLButtonElement>("export-svg").addEventListener("click", () => {
    if (!graph) return;
    const blob = new Blob([renderSvg(graph)], { type: "image/svg+xml" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "witness.svg";
    link.click();
    URL.revokeObjectURL(link.href);
  });
  byId<HTMLButtonElement>("export-json").addEventListener("click", () => {
    if (!graph) return;
    const blob = new Blob([serializeJson(graph.root)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "witness.json";
    link.click();
    URL.revokeObjectURL(link.href);
  });
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  start();
}
