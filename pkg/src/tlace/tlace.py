"""Tree-like annotated witnesses: data structures, the consistency/matches/
explains validators, size statistics, and the XML/JSON transfer formats.

The validators are deliberately independent of the generation algorithm in
``checker``; a witness produced there (or loaded from a file) is certified by
re-deriving the defining conditions against the model and the formula.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from itertools import product

from .errors import PreconditionError, SchemaError
from .formula import (
    And, Exists, ForAll, Globally, Next, Or, StateFormula, TrueFormula,
    Until, is_literal, parse_formula, pretty_print,
)

TLACE_FORMAT_VERSION = "1"


@dataclass(frozen=True)
class TlacePath:
    """An alternating node/action sequence.  ``loop_index`` marks a looping
    path whose final action leads back to ``nodes[loop_index]``; looping
    paths carry one action per node, plain paths one action less."""

    nodes: tuple["TlaceNode", ...]
    actions: tuple[str, ...]
    loop_index: int | None = None

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("a witness path holds at least one node")
        expected = len(self.nodes) if self.loop_index is not None else len(self.nodes) - 1
        if len(self.actions) != expected:
            raise ValueError("wrong number of actions for this path shape")


@dataclass(frozen=True)
class Branch:
    """One existential annotation; ``path`` is None when expansion was
    suppressed by the generation parameters."""

    formula: StateFormula
    path: TlacePath | None = None


@dataclass(frozen=True)
class TlaceNode:
    """A witness node: a state with atomic annotations, existential branches
    and universal annotations."""

    state: str
    atomics: frozenset[StateFormula] = frozenset()
    branches: tuple[Branch, ...] = ()
    universals: frozenset[StateFormula] = frozenset()

    @property
    def truncated(self) -> bool:
        """True when a parameter suppressed the expansion of some branch."""
        return any(b.path is None for b in self.branches)


def node(state, atomics=(), branches=(), universals=()):
    """Convenience constructor mirroring the witness grammar."""
    return TlaceNode(state, frozenset(atomics), tuple(branches), frozenset(universals))


# ---------------------------------------------------------------------------
# Consistency: first-state agreement and loop marker validity
# ---------------------------------------------------------------------------

def is_consistent(n: TlaceNode) -> bool:
    """Every branch path starts at the node's own state, loop markers point
    at a node of their path, recursively."""
    for branch in n.branches:
        if branch.path is None:
            continue
        path = branch.path
        if path.nodes[0].state != n.state:
            return False
        if path.loop_index is not None and not 0 <= path.loop_index < len(path.nodes):
            return False
        if not all(is_consistent(child) for child in path.nodes):
            return False
    return True


def find_inconsistency(n: TlaceNode, where="node"):
    """Human-readable location of the first consistency violation, or None."""
    for i, branch in enumerate(n.branches):
        if branch.path is None:
            continue
        path = branch.path
        here = f"{where}.branch[{i}]"
        if path.nodes[0].state != n.state:
            return (f"{here}: path starts at {path.nodes[0].state!r} "
                    f"instead of {n.state!r}")
        if path.loop_index is not None and not 0 <= path.loop_index < len(path.nodes):
            return f"{here}: loop marker {path.loop_index} points outside the path"
        for j, child in enumerate(path.nodes):
            found = find_inconsistency(child, f"{here}.node[{j}]")
            if found:
                return found
    return None


# ---------------------------------------------------------------------------
# Matches: the witness is part of the model
# ---------------------------------------------------------------------------

def matches(n: TlaceNode, mts) -> bool:
    """Every node state is a model state and every consecutive
    (state, action, state) along every path is a model transition."""
    return find_mismatch(n, mts) is None


def find_mismatch(n: TlaceNode, mts, where="node"):
    if not mts.has_state(n.state):
        return f"{where}: state {n.state!r} is not in the model"
    for i, branch in enumerate(n.branches):
        if branch.path is None:
            continue
        path = branch.path
        here = f"{where}.branch[{i}]"
        states = [child.state for child in path.nodes]
        hops = list(zip(states, path.actions, states[1:]))
        if path.loop_index is not None:
            hops.append((states[-1], path.actions[-1], states[path.loop_index]))
        for j, (s, a, t) in enumerate(hops):
            if not mts.has_transition(s, a, t):
                return (f"{here}.path: transition {j} "
                        f"({s!r} --{a}--> {t!r}) is not in the model")
        for j, child in enumerate(path.nodes):
            found = find_mismatch(child, mts, f"{here}.node[{j}]")
            if found:
                return found
    return None


# ---------------------------------------------------------------------------
# Explains: the witness has the shape of a witness for the formula
# ---------------------------------------------------------------------------

def _frame(n: TlaceNode) -> frozenset:
    """A node's annotations as one tagged element set: atomics, expanded
    branches, unexpanded (truncated) existentials, universals."""
    elements = [("ap", lit) for lit in n.atomics]
    elements += [("eb", b.formula, b.path) if b.path is not None else ("ux", b.formula)
                 for b in n.branches]
    elements += [("ab", f) for f in n.universals]
    return frozenset(elements)


def explains(n: TlaceNode, mts, phi: StateFormula) -> bool:
    """The recursive witness-shape relation for NNF state formulas.

    Conjunctions search for a decomposition of the node's annotations into
    (possibly overlapping) parts explaining each conjunct; a truncated
    existential annotation explains its formula by flag.
    """
    return _Explains(mts).node(n, phi)


class _Explains:
    def __init__(self, mts):
        self.mts = mts
        self._memo = {}

    def node(self, n, phi):
        return self.frame(n.state, _frame(n), phi)

    def frame(self, state, frame, phi):
        key = (state, frame, phi)
        cached = self._memo.get(key)
        if cached is None:
            self._memo[key] = cached = self._frame(state, frame, phi)
        return cached

    def _frame(self, state, frame, phi):
        if isinstance(phi, TrueFormula):
            return frame == frozenset()
        if is_literal(phi):
            return frame == frozenset({("ap", phi)}) and self.mts.eval_atom(state, phi)
        if isinstance(phi, Or):
            return (self.frame(state, frame, phi.left)
                    or self.frame(state, frame, phi.right))
        if isinstance(phi, And):
            return self._split(state, frame, phi.left, phi.right)
        if isinstance(phi, ForAll):
            return frame == frozenset({("ab", phi)})
        if isinstance(phi, Exists):
            if frame == frozenset({("ux", phi)}):
                return True
            if len(frame) != 1:
                return False
            element = next(iter(frame))
            if element[0] != "eb" or element[1] != phi:
                return False
            return self._path(element[2], phi)
        raise PreconditionError(f"explains requires an NNF formula, got {phi}")

    def _split(self, state, frame, left, right):
        elements = sorted(frame, key=repr)
        for assignment in product((1, 2, 3), repeat=len(elements)):
            part_left = frozenset(e for e, side in zip(elements, assignment) if side != 2)
            part_right = frozenset(e for e, side in zip(elements, assignment) if side != 1)
            if self.frame(state, part_left, left) and self.frame(state, part_right, right):
                return True
        return False

    def _path(self, path, phi):
        alpha, pi = phi.alpha, phi.path
        if not all(self.mts.eval_action(a, alpha) for a in path.actions):
            return False
        if isinstance(pi, Next):
            return (path.loop_index is None
                    and len(path.nodes) == 2
                    and _frame(path.nodes[0]) == frozenset()
                    and self.node(path.nodes[1], pi.operand))
        if isinstance(pi, Until):
            if path.loop_index is not None:
                return False
            *prefix, last = path.nodes
            return (all(self.node(child, pi.left) for child in prefix)
                    and self.node(last, pi.right))
        if isinstance(pi, Globally):
            return (path.loop_index is not None
                    and all(self.node(child, pi.operand) for child in path.nodes))
        raise PreconditionError(f"explains requires an NNF formula, got {phi}")


def is_adequate(n: TlaceNode, mts, phi: StateFormula, state=None) -> bool:
    """Consistent, part of the model, and shaped like a witness of phi; when
    a state is given, additionally rooted there."""
    if state is not None and n.state != state:
        return False
    return is_consistent(n) and matches(n, mts) and explains(n, mts, phi)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TlaceStats:
    node_count: int
    branch_count: int
    max_temporal_depth: int


def stats(n: TlaceNode) -> TlaceStats:
    """Size of the witness tree; loop markers are index references and are
    not double-counted."""
    nodes, branches, depth_ = _stats(n)
    return TlaceStats(nodes, branches, depth_)


def _stats(n):
    nodes, branches, depth_ = 1, 0, 0
    for branch in n.branches:
        if branch.path is None:
            continue
        branches += 1
        branch_depth = 0
        for child in branch.path.nodes:
            c_nodes, c_branches, c_depth = _stats(child)
            nodes += c_nodes
            branches += c_branches
            branch_depth = max(branch_depth, c_depth)
        depth_ = max(depth_, 1 + branch_depth)
    return nodes, branches, depth_


# ---------------------------------------------------------------------------
# Serialization: XML
# ---------------------------------------------------------------------------

def _sorted_formulas(formulas):
    return sorted(formulas, key=pretty_print)


def to_xml(n: TlaceNode) -> str:
    """Canonical XML document for a witness (docs/tlace-format.md)."""
    root = ET.Element("tlace", {"version": TLACE_FORMAT_VERSION})
    root.append(_node_to_xml(n))
    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            + ET.tostring(root, encoding="unicode") + "\n")


def _node_to_xml(n):
    element = ET.Element("node", {
        "state": n.state,
        "truncated": "true" if n.truncated else "false",
    })
    atomics = ET.SubElement(element, "atomics")
    for lit in _sorted_formulas(n.atomics):
        ET.SubElement(atomics, "literal").text = pretty_print(lit)
    universals = ET.SubElement(element, "universals")
    for f in _sorted_formulas(n.universals):
        ET.SubElement(universals, "formula").text = pretty_print(f)
    for branch in n.branches:
        branch_el = ET.SubElement(element, "branch",
                                  {"formula": pretty_print(branch.formula)})
        if branch.path is not None:
            path_el = ET.SubElement(branch_el, "path")
            for i, child in enumerate(branch.path.nodes):
                path_el.append(_node_to_xml(child))
                if i < len(branch.path.actions):
                    ET.SubElement(path_el, "action", {"id": branch.path.actions[i]})
            if branch.path.loop_index is not None:
                ET.SubElement(path_el, "loop", {"ref": str(branch.path.loop_index)})
    return element


def from_xml(text: str) -> TlaceNode:
    """Parse a witness document; raises SchemaError with an element path."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise SchemaError(f"not well-formed XML: {exc}") from None
    if root.tag != "tlace":
        raise SchemaError(f"root element must be <tlace>, found <{root.tag}>")
    if root.get("version") != TLACE_FORMAT_VERSION:
        raise SchemaError("missing or unsupported version attribute")
    children = list(root)
    if len(children) != 1 or children[0].tag != "node":
        raise SchemaError("expected exactly one <node> child")
    return _node_from_xml(children[0], "tlace/node")


def _parse_state_formula(text, path, expect):
    try:
        f = parse_formula(text, "arctl")
    except Exception as exc:
        raise SchemaError(f"unparseable formula {text!r}: {exc}", path) from None
    if expect == "literal" and not is_literal(f):
        raise SchemaError(f"{text!r} is not an atom or negated atom", path)
    if expect == "universal" and not isinstance(f, ForAll):
        raise SchemaError(f"{text!r} is not a universal formula", path)
    if expect == "existential" and not isinstance(f, Exists):
        raise SchemaError(f"{text!r} is not an existential formula", path)
    return f


def _node_from_xml(element, path):
    state = element.get("state")
    if state is None:
        raise SchemaError("missing state attribute", path)
    truncated_attr = element.get("truncated")
    if truncated_attr not in ("true", "false"):
        raise SchemaError("missing or invalid truncated attribute", path)
    children = list(element)
    if len(children) < 2 or children[0].tag != "atomics" or children[1].tag != "universals":
        raise SchemaError("expected <atomics> then <universals> children", path)
    atomics = []
    for i, lit_el in enumerate(children[0]):
        if lit_el.tag != "literal":
            raise SchemaError(f"unexpected <{lit_el.tag}>", f"{path}/atomics")
        atomics.append(_parse_state_formula(lit_el.text or "",
                                            f"{path}/atomics/literal[{i}]", "literal"))
    universals = []
    for i, f_el in enumerate(children[1]):
        if f_el.tag != "formula":
            raise SchemaError(f"unexpected <{f_el.tag}>", f"{path}/universals")
        universals.append(_parse_state_formula(f_el.text or "",
                                               f"{path}/universals/formula[{i}]",
                                               "universal"))
    branches = []
    for i, branch_el in enumerate(children[2:]):
        if branch_el.tag != "branch":
            raise SchemaError(f"unexpected <{branch_el.tag}>", path)
        branches.append(_branch_from_xml(branch_el, f"{path}/branch[{i}]"))
    result = TlaceNode(state, frozenset(atomics), tuple(branches), frozenset(universals))
    if result.truncated != (truncated_attr == "true"):
        raise SchemaError("truncated attribute contradicts the branch contents", path)
    return result


def _branch_from_xml(element, path):
    formula_text = element.get("formula")
    if formula_text is None:
        raise SchemaError("missing formula attribute", path)
    formula = _parse_state_formula(formula_text, path, "existential")
    children = list(element)
    if not children:
        return Branch(formula, None)
    if len(children) != 1 or children[0].tag != "path":
        raise SchemaError("expected a single <path> child", path)
    nodes, actions, loop_index = [], [], None
    expect_node = True
    for i, item in enumerate(children[0]):
        here = f"{path}/path/*[{i}]"
        if loop_index is not None:
            raise SchemaError("loop marker must be the last element", here)
        if item.tag == "node":
            if not expect_node:
                raise SchemaError("two adjacent nodes without an action", here)
            nodes.append(_node_from_xml(item, here))
            expect_node = False
        elif item.tag == "action":
            if expect_node:
                raise SchemaError("action without a preceding node", here)
            action = item.get("id")
            if action is None:
                raise SchemaError("missing id attribute", here)
            actions.append(action)
            expect_node = True
        elif item.tag == "loop":
            ref = item.get("ref")
            if ref is None or not ref.isdigit():
                raise SchemaError("loop marker needs an integer ref attribute", here)
            if not expect_node:
                raise SchemaError("loop marker must follow an action", here)
            loop_index = int(ref)
            expect_node = False
        else:
            raise SchemaError(f"unexpected <{item.tag}>", here)
    if expect_node and loop_index is None:
        raise SchemaError("path ends with a dangling action", f"{path}/path")
    try:
        return Branch(formula, TlacePath(tuple(nodes), tuple(actions), loop_index))
    except ValueError as exc:
        raise SchemaError(str(exc), f"{path}/path") from None


# ---------------------------------------------------------------------------
# Serialization: JSON
# ---------------------------------------------------------------------------

def to_json(n: TlaceNode) -> str:
    """Canonical JSON document mirroring the XML schema."""
    document = {"format": int(TLACE_FORMAT_VERSION), "root": _node_to_obj(n)}
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _node_to_obj(n):
    return {
        "state": n.state,
        "truncated": n.truncated,
        "atomics": [pretty_print(f) for f in _sorted_formulas(n.atomics)],
        "universals": [pretty_print(f) for f in _sorted_formulas(n.universals)],
        "branches": [
            {
                "formula": pretty_print(b.formula),
                "path": None if b.path is None else {
                    "nodes": [_node_to_obj(child) for child in b.path.nodes],
                    "actions": list(b.path.actions),
                    "loop": b.path.loop_index,
                },
            }
            for b in n.branches
        ],
    }


def from_json(text: str) -> TlaceNode:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(document, dict) or set(document) != {"format", "root"}:
        raise SchemaError("document must hold exactly 'format' and 'root'")
    if document["format"] != int(TLACE_FORMAT_VERSION):
        raise SchemaError("missing or unsupported format version")
    return _node_from_obj(document["root"], "root")


def _node_from_obj(obj, path):
    if not isinstance(obj, dict):
        raise SchemaError("node must be an object", path)
    expected = {"state", "truncated", "atomics", "universals", "branches"}
    if set(obj) != expected:
        raise SchemaError(f"node keys must be exactly {sorted(expected)}", path)
    if not isinstance(obj["state"], str):
        raise SchemaError("state must be a string", path)
    if not isinstance(obj["truncated"], bool):
        raise SchemaError("truncated must be a boolean", path)
    for key in ("atomics", "universals", "branches"):
        if not isinstance(obj[key], list):
            raise SchemaError(f"{key} must be an array", path)
    atomics = [_parse_state_formula(_expect_str(t, f"{path}/atomics[{i}]"),
                                    f"{path}/atomics[{i}]", "literal")
               for i, t in enumerate(obj["atomics"])]
    universals = [_parse_state_formula(_expect_str(t, f"{path}/universals[{i}]"),
                                       f"{path}/universals[{i}]", "universal")
                  for i, t in enumerate(obj["universals"])]
    branches = [_branch_from_obj(b, f"{path}/branches[{i}]")
                for i, b in enumerate(obj["branches"])]
    result = TlaceNode(obj["state"], frozenset(atomics), tuple(branches),
                       frozenset(universals))
    if result.truncated != obj["truncated"]:
        raise SchemaError("truncated flag contradicts the branch contents", path)
    return result


def _expect_str(value, path):
    if not isinstance(value, str):
        raise SchemaError("expected a string", path)
    return value


def _branch_from_obj(obj, path):
    if not isinstance(obj, dict) or set(obj) != {"formula", "path"}:
        raise SchemaError("branch keys must be exactly ['formula', 'path']", path)
    formula = _parse_state_formula(_expect_str(obj["formula"], path), path, "existential")
    if obj["path"] is None:
        return Branch(formula, None)
    p = obj["path"]
    if not isinstance(p, dict) or set(p) != {"nodes", "actions", "loop"}:
        raise SchemaError("path keys must be exactly ['nodes', 'actions', 'loop']",
                          f"{path}/path")
    if not isinstance(p["nodes"], list) or not isinstance(p["actions"], list):
        raise SchemaError("nodes and actions must be arrays", f"{path}/path")
    nodes = tuple(_node_from_obj(child, f"{path}/path/nodes[{i}]")
                  for i, child in enumerate(p["nodes"]))
    actions = tuple(_expect_str(a, f"{path}/path/actions[{i}]")
                    for i, a in enumerate(p["actions"]))
    loop = p["loop"]
    if loop is not None and not isinstance(loop, int):
        raise SchemaError("loop must be null or an integer", f"{path}/path")
    try:
        return Branch(formula, TlacePath(nodes, actions, loop))
    except ValueError as exc:
        raise SchemaError(str(exc), f"{path}/path") from None
