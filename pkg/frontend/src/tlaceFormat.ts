/**
 * Witness documents: parsing and canonical serialization of the TLACE
 * XML/JSON transfer formats.  Serialization reproduces the checker's
 * canonical output byte for byte, which is what the projection-faithfulness
 * guarantee is measured against.
 */

export interface WitnessPath {
  nodes: WitnessNode[];
  actions: string[];
  loop: number | null;
}

export interface WitnessBranch {
  formula: string;
  path: WitnessPath | null;
}

export interface WitnessNode {
  state: string;
  atomics: string[];
  universals: string[];
  branches: WitnessBranch[];
}

export class SchemaViolation extends Error {
  readonly path: string;

  constructor(message: string, path = "tlace") {
    super(`${path}: ${message}`);
    this.path = path;
  }
}

export function nodeIsTruncated(node: WitnessNode): boolean {
  return node.branches.some((b) => b.path === null);
}

export function countNodes(node: WitnessNode): number {
  let total = 1;
  for (const branch of node.branches) {
    if (branch.path) {
      for (const child of branch.path.nodes) total += countNodes(child);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

export function parseJsonDocument(text: string): WitnessNode {
  let document: unknown;
  try {
    document = JSON.parse(text);
  } catch (error) {
    throw new SchemaViolation(`not valid JSON: ${(error as Error).message}`);
  }
  if (!isRecord(document) || !sameKeys(document, ["format", "root"])) {
    throw new SchemaViolation("document must hold exactly 'format' and 'root'");
  }
  if (document.format !== 1) {
    throw new SchemaViolation("missing or unsupported format version");
  }
  return nodeFromJson(document.root, "root");
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function sameKeys(value: Record<string, unknown>, keys: string[]): boolean {
  const present = Object.keys(value).sort();
  return JSON.stringify(present) === JSON.stringify([...keys].sort());
}

function nodeFromJson(value: unknown, path: string): WitnessNode {
  if (!isRecord(value)) throw new SchemaViolation("node must be an object", path);
  const keys = ["state", "truncated", "atomics", "universals", "branches"];
  if (!sameKeys(value, keys)) {
    throw new SchemaViolation(`node keys must be exactly [${keys.join(", ")}]`, path);
  }
  if (typeof value.state !== "string") {
    throw new SchemaViolation("state must be a string", path);
  }
  if (typeof value.truncated !== "boolean") {
    throw new SchemaViolation("truncated must be a boolean", path);
  }
  const atomics = stringArray(value.atomics, `${path}/atomics`);
  const universals = stringArray(value.universals, `${path}/universals`);
  if (!Array.isArray(value.branches)) {
    throw new SchemaViolation("branches must be an array", path);
  }
  const branches = value.branches.map((branch, i) =>
    branchFromJson(branch, `${path}/branches[${i}]`));
  const node = { state: value.state, atomics, universals, branches };
  if (nodeIsTruncated(node) !== value.truncated) {
    throw new SchemaViolation("truncated flag contradicts the branch contents", path);
  }
  return node;
}

function stringArray(value: unknown, path: string): string[] {
  if (!Array.isArray(value) || value.some((x) => typeof x !== "string")) {
    throw new SchemaViolation("expected an array of strings", path);
  }
  return [...(value as string[])];
}

function branchFromJson(value: unknown, path: string): WitnessBranch {
  if (!isRecord(value) || !sameKeys(value, ["formula", "path"])) {
    throw new SchemaViolation("branch keys must be exactly [formula, path]", path);
  }
  if (typeof value.formula !== "string") {
    throw new SchemaViolation("formula must be a string", path);
  }
  if (value.path === null) return { formula: value.formula, path: null };
  const p = value.path;
  if (!isRecord(p) || !sameKeys(p, ["nodes", "actions", "loop"])) {
    throw new SchemaViolation("path keys must be exactly [nodes, actions, loop]",
      `${path}/path`);
  }
  if (!Array.isArray(p.nodes) || p.nodes.length === 0) {
    throw new SchemaViolation("a path holds at least one node", `${path}/path`);
  }
  const nodes = p.nodes.map((n, i) => nodeFromJson(n, `${path}/path/nodes[${i}]`));
  const actions = stringArray(p.actions, `${path}/path/actions`);
  const loop = p.loop;
  if (loop !== null && (typeof loop !== "number" || !Number.isInteger(loop))) {
    throw new SchemaViolation("loop must be null or an integer", `${path}/path`);
  }
  const expected = loop === null ? nodes.length - 1 : nodes.length;
  if (actions.length !== expected) {
    throw new SchemaViolation("wrong number of actions for this path shape",
      `${path}/path`);
  }
  return { formula: value.formula, path: { nodes, actions, loop } };
}

export function serializeJson(root: WitnessNode): string {
  return JSON.stringify({ format: 1, root: nodeToJson(root) }, null, 2) + "\n";
}

function nodeToJson(node: WitnessNode): unknown {
  return {
    state: node.state,
    truncated: nodeIsTruncated(node),
    atomics: [...node.atomics].sort(),
    universals: [...node.universals].sort(),
    branches: node.branches.map((branch) => ({
      formula: branch.formula,
      path: branch.path === null ? null : {
        nodes: branch.path.nodes.map(nodeToJson),
        actions: [...branch.path.actions],
        loop: branch.path.loop,
      },
    })),
  };
}

// ---------------------------------------------------------------------------
// XML
// ---------------------------------------------------------------------------

interface XmlElement {
  tag: string;
  attributes: Record<string, string>;
  children: XmlElement[];
  text: string;
}

function unescapeXml(text: string, path: string): string {
  return text.replace(/&(#x?[0-9a-fA-F]+|[a-z]+);/g, (whole, body: string) => {
    if (body === "lt") return "<";
    if (body === "gt") return ">";
    if (body === "amp") return "&";
    if (body === "quot") return '"';
    if (body === "apos") return "'";
    if (body.startsWith("#x")) return String.fromCodePoint(parseInt(body.slice(2), 16));
    if (body.startsWith("#")) return String.fromCodePoint(parseInt(body.slice(1), 10));
    throw new SchemaViolation(`unknown entity ${whole}`, path);
  });
}

/** Minimal XML reader for the witness schema (elements, attributes, text). */
class XmlReader {
  private pos = 0;

  constructor(private readonly text: string) {}

  parse(): XmlElement {
    this.skipProlog();
    const root = this.element("tlace");
    this.skipWhitespace();
    if (this.pos !== this.text.length) {
      throw new SchemaViolation("trailing content after the root element");
    }
    return root;
  }

  private skipProlog(): void {
    this.skipWhitespace();
    if (this.text.startsWith("<?xml", this.pos)) {
      const end = this.text.indexOf("?>", this.pos);
      if (end < 0) throw new SchemaViolation("unterminated XML declaration");
      this.pos = end + 2;
      this.skipWhitespace();
    }
  }

  private skipWhitespace(): void {
    while (this.pos < this.text.length && /\s/.test(this.text[this.pos])) this.pos++;
  }

  private element(path: string): XmlElement {
    if (this.text[this.pos] !== "<") {
      throw new SchemaViolation("expected an element", path);
    }
    this.pos++;
    const tagMatch = /[A-Za-z][A-Za-z0-9_-]*/y;
    tagMatch.lastIndex = this.pos;
    const m = tagMatch.exec(this.text);
    if (!m) throw new SchemaViolation("malformed tag name", path);
    const tag = m[0];
    this.pos = tagMatch.lastIndex;
    const attributes: Record<string, string> = {};
    for (;;) {
      this.skipWhitespace();
      const c = this.text[this.pos];
      if (c === "/" && this.text[this.pos + 1] === ">") {
        this.pos += 2;
        return { tag, attributes, children: [], text: "" };
      }
      if (c === ">") {
        this.pos++;
        break;
      }
      const attrMatch = /([A-Za-z][A-Za-z0-9_-]*)="([^"]*)"/y;
      attrMatch.lastIndex = this.pos;
      const am = attrMatch.exec(this.text);
      if (!am) throw new SchemaViolation(`malformed attribute in <${tag}>`, path);
      attributes[am[1]] = unescapeXml(am[2], path);
      this.pos = attrMatch.lastIndex;
    }
    const children: XmlElement[] = [];
    let text = "";
    for (;;) {
      const next = this.text.indexOf("<", this.pos);
      if (next < 0) throw new SchemaViolation(`unterminated <${tag}>`, path);
      text += this.text.slice(this.pos, next);
      this.pos = next;
      if (this.text.startsWith("</", this.pos)) {
        const close = this.text.indexOf(">", this.pos);
        const name = this.text.slice(this.pos + 2, close).trim();
        if (name !== tag) {
          throw new SchemaViolation(`mismatched closing tag </${name}>`, path);
        }
        this.pos = close + 1;
        return { tag, attributes, children, text: unescapeXml(text.trim(), path) };
      }
      children.push(this.element(`${path}/${tag}`));
    }
  }
}

export function parseXmlDocument(text: string): WitnessNode {
  const root = new XmlReader(text).parse();
  if (root.tag !== "tlace") {
    throw new SchemaViolation(`root element must be <tlace>, found <${root.tag}>`);
  }
  if (root.attributes.version !== "1") {
    throw new SchemaViolation("missing or unsupported version attribute");
  }
  if (root.children.length !== 1 || root.children[0].tag !== "node") {
    throw new SchemaViolation("expected exactly one <node> child");
  }
  return nodeFromXml(root.children[0], "tlace/node");
}

function nodeFromXml(element: XmlElement, path: string): WitnessNode {
  const state = element.attributes.state;
  if (state === undefined) throw new SchemaViolation("missing state attribute", path);
  const truncated = element.attributes.truncated;
  if (truncated !== "true" && truncated !== "false") {
    throw new SchemaViolation("missing or invalid truncated attribute", path);
  }
  const children = element.children;
  if (children.length < 2 || children[0].tag !== "atomics"
      || children[1].tag !== "universals") {
    throw new SchemaViolation("expected <atomics> then <universals> children", path);
  }
  const atomics = children[0].children.map((child, i) => {
    if (child.tag !== "literal") {
      throw new SchemaViolation(`unexpected <${child.tag}>`, `${path}/atomics`);
    }
    return child.text;
  });
  const universals = children[1].children.map((child) => {
    if (child.tag !== "formula") {
      throw new SchemaViolation(`unexpected <${child.tag}>`, `${path}/universals`);
    }
    return child.text;
  });
  const branches = children.slice(2).map((child, i) => {
    if (child.tag !== "branch") {
      throw new SchemaViolation(`unexpected <${child.tag}>`, path);
    }
    return branchFromXml(child, `${path}/branch[${i}]`);
  });
  const node = { state, atomics, universals, branches };
  if (nodeIsTruncated(node) !== (truncated === "true")) {
    throw new SchemaViolation("truncated attribute contradicts the branch contents",
      path);
  }
  return node;
}

function branchFromXml(element: XmlElement, path: string): WitnessBranch {
  const formula = element.attributes.formula;
  if (formula === undefined) {
    throw new SchemaViolation("missing formula attribute", path);
  }
  if (element.children.length === 0) return { formula, path: null };
  if (element.children.length !== 1 || element.children[0].tag !== "path") {
    throw new SchemaViolation("expected a single <path> child", path);
  }
  const nodes: WitnessNode[] = [];
  const actions: string[] = [];
  let loop: number | null = null;
  let expectNode = true;
  element.children[0].children.forEach((item, i) => {
    const here = `${path}/path/*[${i}]`;
    if (loop !== null) {
      throw new SchemaViolation("loop marker must be the last element", here);
    }
    if (item.tag === "node") {
      if (!expectNode) {
        throw new SchemaViolation("two adjacent nodes without an action", here);
      }
      nodes.push(nodeFromXml(item, here));
      expectNode = false;
    } else if (item.tag === "action") {
      if (expectNode) {
        throw new SchemaViolation("action without a preceding node", here);
      }
      const id = item.attributes.id;
      if (id === undefined) throw new SchemaViolation("missing id attribute", here);
      actions.push(id);
      expectNode = true;
    } else if (item.tag === "loop") {
      const ref = item.attributes.ref;
      if (ref === undefined || !/^[0-9]+$/.test(ref)) {
        throw new SchemaViolation("loop marker needs an integer ref attribute", here);
      }
      if (!expectNode) {
        throw new SchemaViolation("loop marker must follow an action", here);
      }
      loop = parseInt(ref, 10);
      expectNode = false;
    } else {
      throw new SchemaViolation(`unexpected <${item.tag}>`, here);
    }
  });
  if (nodes.length === 0) {
    throw new SchemaViolation("a path holds at least one node", `${path}/path`);
  }
  if (expectNode && loop === null) {
    throw new SchemaViolation("path ends with a dangling action", `${path}/path`);
  }
  const expected = loop === null ? nodes.length - 1 : nodes.length;
  if (actions.length !== expected) {
    throw new SchemaViolation("wrong number of actions for this path shape",
      `${path}/path`);
  }
  return { formula, path: { nodes, actions, loop } };
}

// Serialization mirrors xml.etree.ElementTree with two-space indentation:
// empty elements as `<tag />`, text elements inline, children indented.

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function escapeAttribute(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;").replace(/\r/g, "&#13;").replace(/\n/g, "&#10;")
    .replace(/\t/g, "&#09;");
}

class XmlWriter {
  private readonly lines: string[] = [];

  render(node: WitnessNode): string {
    this.lines.push('<?xml version="1.0" encoding="UTF-8"?>');
    this.lines.push('<tlace version="1">');
    this.node(node, 1);
    this.lines.push("</tlace>");
    return this.lines.join("\n") + "\n";
  }

  private open(level: number, tag: string, attributes: [string, string][],
               mode: "empty" | "open"): void {
    const attrText = attributes
      .map(([key, value]) => ` ${key}="${escapeAttribute(value)}"`).join("");
    const suffix = mode === "empty" ? " />" : ">";
    this.lines.push(`${"  ".repeat(level)}<${tag}${attrText}${suffix}`);
  }

  private leaf(level: number, tag: string, text: string): void {
    this.lines.push(
      `${"  ".repeat(level)}<${tag}>${escapeText(text)}</${tag}>`);
  }

  private close(level: number, tag: string): void {
    this.lines.push(`${"  ".repeat(level)}</${tag}>`);
  }

  private node(node: WitnessNode, level: number): void {
    const attributes: [string, string][] = [
      ["state", node.state],
      ["truncated", nodeIsTruncated(node) ? "true" : "false"],
    ];
    this.open(level, "node", attributes, "open");
    const atomics = [...node.atomics].sort();
    if (atomics.length === 0) {
      this.open(level + 1, "atomics", [], "empty");
    } else {
      this.open(level + 1, "atomics", [], "open");
      for (const literal of atomics) this.leaf(level + 2, "literal", literal);
      this.close(level + 1, "atomics");
    }
    const universals = [...node.universals].sort();
    if (universals.length === 0) {
      this.open(level + 1, "universals", [], "empty");
    } else {
      this.open(level + 1, "universals", [], "open");
      for (const formula of universals) this.leaf(level + 2, "formula", formula);
      this.close(level + 1, "universals");
    }
    for (const branch of node.branches) {
      if (branch.path === null) {
        this.open(level + 1, "branch", [["formula", branch.formula]], "empty");
        continue;
      }
      this.open(level + 1, "branch", [["formula", branch.formula]], "open");
      this.open(level + 2, "path", [], "open");
      branch.path.nodes.forEach((child, i) => {
        this.node(child, level + 3);
        if (i < branch.path!.actions.length) {
          this.open(level + 3, "action", [["id", branch.path!.actions[i]]], "empty");
        }
      });
      if (branch.path.loop !== null) {
        this.open(level + 3, "loop", [["ref", String(branch.path.loop)]], "empty");
      }
      this.close(level + 2, "path");
      this.close(level + 1, "branch");
    }
    this.close(level, "node");
  }
}

export function serializeXml(root: WitnessNode): string {
  return new XmlWriter().render(root);
}

export function parseWitness(text: string): WitnessNode {
  return text.trimStart().startsWith("<")
    ? parseXmlDocument(text)
    : parseJsonDocument(text);
}
