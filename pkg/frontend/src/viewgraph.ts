/**
 * The view-side projection of a witness: vertices for every witness node,
 * action edges (tagged temporal/reverse/epistemic from the action atoms),
 * fold state per branch, drag offsets and pinned label variables.
 *
 * Every interaction returns a new graph; the underlying witness is never
 * modified, and serializing it back reproduces the loaded document.
 */

import { ModelInfo, VariableValue } from "./modelFormat.js";
import {
  WitnessBranch, WitnessNode, countNodes, serializeJson,
} from "./tlaceFormat.js";
import { layoutPositions, Point } from "./layout.js";

export type EdgeKind = "temporal" | "reverse" | "epistemic" | "plain";

export interface ViewNode {
  id: string;
  state: string;
  witness: WitnessNode;
  /** branch nesting level of this vertex (root = 0) */
  depth: number;
}

export interface ViewEdge {
  from: string;
  to: string;
  action: string;
  kind: EdgeKind;
  loopBack: boolean;
  branchKey: string;
}

export interface ViewBranch {
  key: string;
  owner: string;
  index: number;
  formula: string;
  /** vertex ids of the branch path, in order; empty for unexpanded branches */
  pathIds: string[];
  hiddenCount: number;
}

export type Selection =
  | { kind: "node"; id: string }
  | { kind: "path"; branchKey: string }
  | null;

export interface ViewGraph {
  root: WitnessNode;
  model: ModelInfo | null;
  nodes: ViewNode[];
  nodeById: Map<string, ViewNode>;
  edges: ViewEdge[];
  branches: ViewBranch[];
  branchByKey: Map<string, ViewBranch>;
  folded: ReadonlySet<string>;
  pinned: readonly string[];
  selection: Selection;
  /** canonical layout for the current fold state */
  canonical: Map<string, Point>;
  /** manual drag offsets on top of the canonical layout */
  offsets: Map<string, Point>;
}

export function edgeKindFor(action: string, model: ModelInfo | null): EdgeKind {
  const atoms = model?.actionAtoms[action] ?? [action];
  if (atoms.includes("RUN")) return "temporal";
  if (atoms.includes("BACK")) return "reverse";
  if (atoms.some((a) => a.startsWith("Agt_"))) return "epistemic";
  return "plain";
}

export function branchKey(ownerId: string, index: number): string {
  return `${ownerId}/${index}`;
}

/** Build the complete, canonically laid out view of a witness document. */
export function loadTlace(root: WitnessNode, model: ModelInfo | null = null): ViewGraph {
  const nodes: ViewNode[] = [];
  const edges: ViewEdge[] = [];
  const branches: ViewBranch[] = [];

  const walk = (witness: WitnessNode, id: string, depth: number): void => {
    nodes.push({ id, state: witness.state, witness, depth });
    witness.branches.forEach((branch: WitnessBranch, bi: number) => {
      const key = branchKey(id, bi);
      if (branch.path === null) {
        branches.push({ key, owner: id, index: bi, formula: branch.formula,
                        pathIds: [], hiddenCount: 0 });
        return;
      }
      const pathIds = branch.path.nodes.map((_, ni) => `${id}.${bi}.${ni}`);
      const hiddenCount = branch.path.nodes.reduce(
        (total, child) => total + countNodes(child), 0);
      branches.push({ key, owner: id, index: bi, formula: branch.formula,
                      pathIds, hiddenCount });
      branch.path.nodes.forEach((child, ni) => walk(child, pathIds[ni], depth + 1));
      for (let i = 0; i + 1 < pathIds.length; i++) {
        edges.push({ from: pathIds[i], to: pathIds[i + 1],
                     action: branch.path.actions[i],
                     kind: edgeKindFor(branch.path.actions[i], model),
                     loopBack: false, branchKey: key });
      }
      if (branch.path.loop !== null) {
        const action = branch.path.actions[branch.path.actions.length - 1];
        edges.push({ from: pathIds[pathIds.length - 1],
                     to: pathIds[branch.path.loop],
                     action, kind: edgeKindFor(action, model),
                     loopBack: true, branchKey: key });
      }
    });
  };
  walk(root, "n0", 0);

  const graph: ViewGraph = {
    root,
    model,
    nodes,
    nodeById: new Map(nodes.map((n) => [n.id, n])),
    edges,
    branches,
    branchByKey: new Map(branches.map((b) => [b.key, b])),
    folded: new Set(),
    pinned: [],
    selection: null,
    canonical: new Map(),
    offsets: new Map(),
  };
  graph.canonical = layoutPositions(graph);
  return graph;
}

/** Canonical serialization of the underlying witness; interactions must
 * never change it. */
export function structureHash(graph: ViewGraph): string {
  return serializeJson(graph.root);
}

export function isVisible(graph: ViewGraph, id: string): boolean {
  // A vertex is visible when no branch on its address is folded.
  let cursor = id;
  for (;;) {
    const dot = cursor.lastIndexOf(".");
    if (dot < 0) return true;
    const withoutIndex = cursor.slice(0, dot);
    const branchDot = withoutIndex.lastIndexOf(".");
    const owner = withoutIndex.slice(0, branchDot);
    const branchIndex = withoutIndex.slice(branchDot + 1);
    if (graph.folded.has(branchKey(owner, Number(branchIndex)))) return false;
    cursor = owner;
  }
}

export function visibleNodes(graph: ViewGraph): ViewNode[] {
  return graph.nodes.filter((n) => isVisible(graph, n.id));
}

export function visibleEdges(graph: ViewGraph): ViewEdge[] {
  return graph.edges.filter(
    (e) => isVisible(graph, e.from) && isVisible(graph, e.to));
}

export function position(graph: ViewGraph, id: string): Point {
  const base = graph.canonical.get(id) ?? { x: 0, y: 0 };
  const offset = graph.offsets.get(id) ?? { x: 0, y: 0 };
  return { x: base.x + offset.x, y: base.y + offset.y };
}

/** Fold or unfold one branch; the canonical layout of everything still
 * visible is recomputed, manual offsets survive. */
export function toggleFold(graph: ViewGraph, nodeId: string,
                           branchIndex: number): ViewGraph {
  const key = branchKey(nodeId, branchIndex);
  if (!graph.branchByKey.has(key)) return graph;
  const folded = new Set(graph.folded);
  if (folded.has(key)) folded.delete(key);
  else folded.add(key);
  const next: ViewGraph = { ...graph, folded };
  next.canonical = layoutPositions(next);
  return next;
}

/** Move a vertex and (by default) its whole subtree by a delta. */
export function drag(graph: ViewGraph, id: string, delta: Point,
                     subtree = true): ViewGraph {
  const offsets = new Map(graph.offsets);
  const targets = subtree
    ? graph.nodes.filter((n) => n.id === id || n.id.startsWith(id + "."))
    : [graph.nodeById.get(id)].filter((n): n is ViewNode => n !== undefined);
  for (const node of targets) {
    const current = offsets.get(node.id) ?? { x: 0, y: 0 };
    offsets.set(node.id, { x: current.x + delta.x, y: current.y + delta.y });
  }
  return { ...graph, offsets };
}

/** Recompute the canonical layout and discard manual positioning. */
export function autoLayout(graph: ViewGraph): ViewGraph {
  const next: ViewGraph = { ...graph, offsets: new Map() };
  next.canonical = layoutPositions(next);
  return next;
}

export function select(graph: ViewGraph, selection: Selection): ViewGraph {
  return { ...graph, selection };
}

/** Pin or unpin a variable for display inside node labels. */
export function togglePin(graph: ViewGraph, variable: string): ViewGraph {
  const pinned = graph.pinned.includes(variable)
    ? graph.pinned.filter((v) => v !== variable)
    : [...graph.pinned, variable];
  return { ...graph, pinned };
}

export function variablesOf(graph: ViewGraph,
                            id: string): Record<string, VariableValue> | null {
  const node = graph.nodeById.get(id);
  if (!node || !graph.model) return null;
  return graph.model.stateVariables[node.state] ?? null;
}

export function nodeLabel(graph: ViewGraph, id: string): string[] {
  const node = graph.nodeById.get(id);
  if (!node) return [];
  const lines = [node.state];
  const variables = variablesOf(graph, id);
  if (variables) {
    for (const name of graph.pinned) {
      if (name in variables) lines.push(`${name} = ${variables[name]}`);
    }
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Inspector panel
// ---------------------------------------------------------------------------

export interface DetailGroup {
  title: string;
  collapsible: boolean;
  items: { label: string; value: string; pinnable?: string }[];
}

export interface DetailColumn {
  title: string;
  nodeId: string;
  groups: DetailGroup[];
}

export interface DetailPanel {
  title: string;
  columns: DetailColumn[];
}

function nodeGroups(graph: ViewGraph, id: string): DetailGroup[] {
  const node = graph.nodeById.get(id);
  if (!node) return [];
  const groups: DetailGroup[] = [];
  const variables = variablesOf(graph, id);
  if (variables) {
    groups.push({
      title: "variables",
      collapsible: true,
      items: Object.entries(variables).map(([name, value]) => ({
        label: name, value: String(value), pinnable: name,
      })),
    });
  }
  groups.push({
    title: "atomic annotations",
    collapsible: true,
    items: node.witness.atomics.map((f) => ({ label: f, value: "holds" })),
  });
  groups.push({
    title: "existential branches",
    collapsible: true,
    items: node.witness.branches.map((b, bi) => ({
      label: b.formula,
      value: b.path === null ? "not expanded"
        : graph.folded.has(branchKey(id, bi)) ? "folded" : "expanded",
    })),
  });
  groups.push({
    title: "universal annotations",
    collapsible: true,
    items: node.witness.universals.map((f) => ({ label: f, value: "annotation" })),
  });
  return groups;
}

/** Hierarchical, collapsible listing of variables and annotations for the
 * selected vertex or along the selected path. */
export function inspect(graph: ViewGraph, selection: Selection): DetailPanel {
  if (selection === null) return { title: "nothing selected", columns: [] };
  if (selection.kind === "node") {
    return {
      title: `state ${graph.nodeById.get(selection.id)?.state ?? "?"}`,
      columns: [{
        title: graph.nodeById.get(selection.id)?.state ?? selection.id,
        nodeId: selection.id,
        groups: nodeGroups(graph, selection.id),
      }],
    };
  }
  const branch = graph.branchByKey.get(selection.branchKey);
  if (!branch) return { title: "nothing selected", columns: [] };
  return {
    title: `branch ${branch.formula}`,
    columns: branch.pathIds.map((id) => ({
      title: graph.nodeById.get(id)?.state ?? id,
      nodeId: id,
      groups: nodeGroups(graph, id),
    })),
  };
}
