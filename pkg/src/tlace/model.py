"""Mixed transition systems: explicit-state representation, the JSON model
file format, reachability and α-restricted successor/predecessor queries.

States and actions are totally ordered by declaration order and every
set-valued query iterates in that order, so that witnesses are reproducible.
The file format is documented in docs/model-format.md (``format: 1``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ModelFormatError, UnknownAtomError
from .formula import (
    ActionAnd, ActionAtom, ActionFalse, ActionFormula, ActionNot, ActionOr,
    ActionTrue, Atom, Not, StateFormula,
)

FORMAT_VERSION = 1

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


@dataclass(frozen=True)
class Path:
    """An alternating state/action sequence through a model.

    ``lasso_index``, when set, marks an earlier position holding the same
    state as the final one; the path then denotes the infinite unrolling.
    """

    states: tuple[str, ...]
    actions: tuple[str, ...]
    lasso_index: int | None = None

    def __post_init__(self):
        if len(self.actions) != len(self.states) - 1:
            raise ValueError("a path over n states carries n-1 actions")
        if self.lasso_index is not None:
            k = self.lasso_index
            if not 0 <= k < len(self.states) - 1:
                raise ValueError("lasso index must point strictly before the final state")
            if self.states[k] != self.states[-1]:
                raise ValueError("lasso index must point to a position with an equal state")


# ---------------------------------------------------------------------------
# Atom predicates: boolean expressions over variable assignments
# ---------------------------------------------------------------------------

_PRED_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)|(?P<int>-?[0-9]+)"
    r"|(?P<op>!=|=|!|&(?!&)|\|(?!\|)|\(|\)))")


class _Predicate:
    """A parsed atom predicate; evaluates against a variable assignment."""

    def __init__(self, source):
        self.source = source
        self._tokens = self._tokenize(source)
        self._pos = 0
        self.variables: set[str] = set()
        self._tree = self._parse_or()
        if self._pos != len(self._tokens):
            raise ModelFormatError(f"trailing input in predicate {source!r}")

    @staticmethod
    def _tokenize(source):
        tokens, i = [], 0
        while i < len(source):
            if source[i].isspace():
                i += 1
                continue
            m = _PRED_TOKEN_RE.match(source, i)
            if not m:
                raise ModelFormatError(f"bad character {source[i]!r} in predicate {source!r}")
            if m.group("ident") is not None:
                tokens.append(("ident", m.group("ident")))
            elif m.group("int") is not None:
                tokens.append(("int", int(m.group("int"))))
            else:
                tokens.append(("op", m.group("op")))
            i = m.end()
        return tokens

    def _peek(self):
        return self._tokens[self._pos] if self._pos < len(self._tokens) else ("eof", None)

    def _parse_or(self):
        left = self._parse_and()
        while self._peek() == ("op", "|"):
            self._pos += 1
            left = ("or", left, self._parse_and())
        return left

    def _parse_and(self):
        left = self._parse_unary()
        while self._peek() == ("op", "&"):
            self._pos += 1
            left = ("and", left, self._parse_unary())
        return left

    def _parse_unary(self):
        kind, value = self._peek()
        if (kind, value) == ("op", "!"):
            self._pos += 1
            return ("not", self._parse_unary())
        if (kind, value) == ("op", "("):
            self._pos += 1
            inner = self._parse_or()
            if self._peek() != ("op", ")"):
                raise ModelFormatError(f"missing ')' in predicate {self.source!r}")
            self._pos += 1
            return inner
        if kind == "ident" and value in ("true", "false"):
            self._pos += 1
            return ("const", value == "true")
        if kind == "ident":
            self._pos += 1
            self.variables.add(value)
            op = self._peek()
            if op in (("op", "="), ("op", "!=")):
                self._pos += 1
                return (("eq" if op[1] == "=" else "ne"), value, self._parse_value())
            return ("var", value)
        raise ModelFormatError(f"expected a variable in predicate {self.source!r}")

    def _parse_value(self):
        kind, value = self._peek()
        if kind == "int":
            self._pos += 1
            return value
        if kind == "ident":
            self._pos += 1
            if value == "true":
                return True
            if value == "false":
                return False
            return value
        raise ModelFormatError(f"expected a value in predicate {self.source!r}")

    def evaluate(self, assignment, where):
        return self._eval(self._tree, assignment, where)

    def _eval(self, node, assignment, where):
        tag = node[0]
        if tag == "const":
            return node[1]
        if tag == "var":
            value = assignment[node[1]]
            if not isinstance(value, bool):
                raise ModelFormatError(
                    f"predicate {self.source!r} uses non-boolean variable "
                    f"{node[1]!r} without a comparison ({where})")
            return value
        if tag == "eq":
            return assignment[node[1]] == node[2]
        if tag == "ne":
            return assignment[node[1]] != node[2]
        if tag == "not":
            return not self._eval(node[1], assignment, where)
        if tag == "and":
            return self._eval(node[1], assignment, where) and self._eval(node[2], assignment, where)
        return self._eval(node[1], assignment, where) or self._eval(node[2], assignment, where)


def _derive_atoms(var_names, assignments, atom_defs, kind):
    """Atom sets per entity: auto atoms for boolean variables plus explicit
    predicate atoms whose variables all belong to this section."""
    bool_vars = [v for v in var_names
                 if all(isinstance(a.get(v), bool) for a in assignments.values())]
    atoms = {name: set() for name in assignments}
    for entity, assignment in assignments.items():
        for v in bool_vars:
            if assignment[v]:
                atoms[entity].add(v)
    universe = set(bool_vars)
    for atom_name, predicate in atom_defs:
        if not predicate.variables <= set(var_names):
            continue
        if atom_name in universe:
            raise ModelFormatError(
                f"atom {atom_name!r} collides with a boolean {kind} variable")
        universe.add(atom_name)
        for entity, assignment in assignments.items():
            if predicate.evaluate(assignment, f"{kind} {entity!r}"):
                atoms[entity].add(atom_name)
    return {e: frozenset(s) for e, s in atoms.items()}, frozenset(universe)


# ---------------------------------------------------------------------------
# The mixed transition system
# ---------------------------------------------------------------------------

class MixedTransitionSystem:
    """States and actions labeled with variable assignments, transition
    triples (state, action, state), and atom labelings derived from the
    variables.  Immutable after construction; all queries are read-only."""

    def __init__(self, state_vars, action_vars, states, initial, actions,
                 transitions, atoms=None):
        self.state_vars = tuple(state_vars)
        self.action_vars = tuple(action_vars)
        self.states = tuple(states)
        self.actions = tuple(actions)
        self.state_assignments = {s: dict(states[s]) for s in states}
        self.action_assignments = {a: dict(actions[a]) for a in actions}
        self.initial = tuple(initial)
        self.transitions = tuple((s, a, t) for s, a, t in transitions)
        self.atom_defs = tuple((name, source) for name, source in (atoms or {}).items())
        self._validate()

        if set(self.state_vars) & set(self.action_vars):
            raise ModelFormatError("state and action variable names must be disjoint")
        predicates = [(name, _Predicate(source)) for name, source in self.atom_defs]
        for name, predicate in predicates:
            if not _NAME_RE.match(name):
                raise ModelFormatError(f"atom name {name!r} is not a valid identifier")
            if not predicate.variables:
                raise ModelFormatError(f"atom {name!r} must reference at least one variable")
            if not (predicate.variables <= set(self.state_vars)
                    or predicate.variables <= set(self.action_vars)):
                raise ModelFormatError(
                    f"atom {name!r} must reference only state variables or only "
                    f"action variables")
        self.state_atoms, self.state_universe = _derive_atoms(
            self.state_vars, self.state_assignments, predicates, "state")
        self.action_atoms, self.action_universe = _derive_atoms(
            self.action_vars, self.action_assignments, predicates, "action")

        self._state_index = {s: i for i, s in enumerate(self.states)}
        self._action_index = {a: i for i, a in enumerate(self.actions)}
        self._succ = {s: [] for s in self.states}
        self._pred = {s: [] for s in self.states}
        for s, a, t in sorted(
                set(self.transitions),
                key=lambda tr: (self._state_index[tr[0]], self._action_index[tr[1]],
                                self._state_index[tr[2]])):
            self._succ[s].append((a, t))
            self._pred[t].append((a, s))
        for s in self.states:
            self._succ[s].sort(key=lambda at: (self._action_index[at[0]],
                                               self._state_index[at[1]]))
            self._pred[s].sort(key=lambda at: (self._action_index[at[0]],
                                               self._state_index[at[1]]))
        self._transition_set = frozenset(self.transitions)

    def _validate(self):
        if not self.states:
            raise ModelFormatError("empty state set")
        if not self.initial:
            raise ModelFormatError("empty initial state set")
        if len(set(self.states)) != len(self.states):
            raise ModelFormatError("duplicate state identifier")
        if len(set(self.actions)) != len(self.actions):
            raise ModelFormatError("duplicate action identifier")
        state_set, action_set = set(self.states), set(self.actions)
        for s in self.initial:
            if s not in state_set:
                raise ModelFormatError(f"initial section references undeclared state {s!r}")
        for i, (s, a, t) in enumerate(self.transitions):
            if s not in state_set:
                raise ModelFormatError(f"transition {i} references undeclared state {s!r}")
            if t not in state_set:
                raise ModelFormatError(f"transition {i} references undeclared state {t!r}")
            if a not in action_set:
                raise ModelFormatError(f"transition {i} references undeclared action {a!r}")
        for s, assignment in self.state_assignments.items():
            if set(assignment) != set(self.state_vars):
                raise ModelFormatError(
                    f"state {s!r} must assign exactly the declared state variables")
        for a, assignment in self.action_assignments.items():
            if set(assignment) != set(self.action_vars):
                raise ModelFormatError(
                    f"action {a!r} must assign exactly the declared action variables")

    # -- queries ------------------------------------------------------------

    def state_index(self, s):
        return self._state_index[s]

    def has_state(self, s):
        return s in self._state_index

    def has_transition(self, s, a, t):
        return (s, a, t) in self._transition_set

    def eval_action(self, action: str, alpha: ActionFormula) -> bool:
        """Evaluate the action expression alpha over V_A(action)."""
        atoms = self.action_atoms[action]
        return self._eval_alpha(alpha, atoms)

    def _eval_alpha(self, alpha, atoms):
        if isinstance(alpha, ActionTrue):
            return True
        if isinstance(alpha, ActionFalse):
            return False
        if isinstance(alpha, ActionAtom):
            if alpha.name not in self.action_universe:
                raise UnknownAtomError(f"unknown action atom {alpha.name!r}")
            return alpha.name in atoms
        if isinstance(alpha, ActionNot):
            return not self._eval_alpha(alpha.operand, atoms)
        if isinstance(alpha, ActionAnd):
            return self._eval_alpha(alpha.left, atoms) and self._eval_alpha(alpha.right, atoms)
        if isinstance(alpha, ActionOr):
            return self._eval_alpha(alpha.left, atoms) or self._eval_alpha(alpha.right, atoms)
        raise TypeError(f"not an action formula: {alpha!r}")

    def eval_atom(self, state: str, literal: StateFormula) -> bool:
        """Evaluate an atom or negated atom at a state."""
        if isinstance(literal, Not) and isinstance(literal.operand, Atom):
            return not self.eval_atom(state, literal.operand)
        if not isinstance(literal, Atom):
            raise TypeError(f"not a literal: {literal!r}")
        if literal.name not in self.state_universe:
            raise UnknownAtomError(f"unknown state atom {literal.name!r}")
        return literal.name in self.state_atoms[state]

    def alpha_actions(self, alpha: ActionFormula) -> frozenset[str]:
        """The actions whose labeling satisfies alpha."""
        return frozenset(a for a in self.actions
                         if self._eval_alpha(alpha, self.action_atoms[a]))

    def alpha_successors(self, state: str, alpha: ActionFormula):
        """(action, target) pairs reachable from state through alpha actions,
        in canonical (action order, state order)."""
        allowed = self.alpha_actions(alpha)
        return [(a, t) for a, t in self._succ[state] if a in allowed]

    def alpha_predecessors(self, state: str, alpha: ActionFormula):
        """Mirror image of alpha_successors."""
        allowed = self.alpha_actions(alpha)
        return [(a, s) for a, s in self._pred[state] if a in allowed]

    def successors(self, state):
        return list(self._succ[state])

    def predecessors(self, state):
        return list(self._pred[state])

    def reachable(self) -> frozenset[str]:
        """Least set containing the initial states and closed under
        all-action successors."""
        seen = set(self.initial)
        frontier = list(self.initial)
        while frontier:
            s = frontier.pop()
            for _, t in self._succ[s]:
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        return frozenset(seen)

    # -- document form ------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "state_vars": list(self.state_vars),
            "action_vars": list(self.action_vars),
            "states": {s: dict(self.state_assignments[s]) for s in self.states},
            "initial": list(self.initial),
            "actions": {a: dict(self.action_assignments[a]) for a in self.actions},
            "transitions": [[s, a, t] for s, a, t in self.transitions],
            "atoms": {name: source for name, source in self.atom_defs},
        }

    def __eq__(self, other):
        if not isinstance(other, MixedTransitionSystem):
            return NotImplemented
        return self.to_document() == other.to_document()

    def __repr__(self):
        return (f"MixedTransitionSystem({len(self.states)} states, "
                f"{len(self.actions)} actions, {len(self.transitions)} transitions)")


# ---------------------------------------------------------------------------
# Loading and saving
# ---------------------------------------------------------------------------

_SECTIONS = ("state_vars", "action_vars", "states", "initial", "actions",
             "transitions", "atoms")


def _parse_document(text, kind):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ModelFormatError(f"{kind} document must be a JSON object")
    if document.get("format") != FORMAT_VERSION:
        raise ModelFormatError(
            f"missing or unsupported format version (expected {FORMAT_VERSION})")
    return document


def _require(document, section, type_, kind):
    if section not in document:
        raise ModelFormatError(f"{kind} document is missing the {section!r} section")
    value = document[section]
    if not isinstance(value, type_):
        raise ModelFormatError(f"section {section!r} has the wrong shape")
    return value


def load_model(text: str) -> MixedTransitionSystem:
    """Parse a model document (see docs/model-format.md) into an MTS."""
    document = _parse_document(text, "model")
    unknown = set(document) - set(_SECTIONS) - {"format"}
    if unknown:
        raise ModelFormatError(f"unknown sections: {sorted(unknown)}")
    state_vars = _require(document, "state_vars", list, "model")
    action_vars = _require(document, "action_vars", list, "model")
    states = _require(document, "states", dict, "model")
    initial = _require(document, "initial", list, "model")
    actions = _require(document, "actions", dict, "model")
    raw_transitions = _require(document, "transitions", list, "model")
    atoms = document.get("atoms", {})
    if not isinstance(atoms, dict):
        raise ModelFormatError("section 'atoms' has the wrong shape")
    transitions = []
    for i, entry in enumerate(raw_transitions):
        if not (isinstance(entry, list) and len(entry) == 3
                and all(isinstance(x, str) for x in entry)):
            raise ModelFormatError(f"transition {i} must be a [src, action, dst] triple")
        transitions.append(tuple(entry))
    return MixedTransitionSystem(state_vars, action_vars, states, initial,
                                 actions, transitions, atoms)


def save_model(mts: MixedTransitionSystem) -> str:
    """Serialize an MTS to its canonical document text."""
    return json.dumps(mts.to_document(), indent=2, ensure_ascii=False) + "\n"
