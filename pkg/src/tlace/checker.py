"""Satisfaction-set computation for NNF ARCTL over an MTS, witness-path
search, and the recursive tree-like witness generator.

E<a>G uses the infinite-path (lasso) reading: a state whose only α-maximal
paths are finite does not satisfy E<a>G φ, and the generated witness always
closes a loop.  A<a>π is evaluated by duality with the corresponding E form
over negated operands.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import PreconditionError
from .formula import (
    And, Atom, Eventually, Exists, FalseFormula, ForAll, Globally, Next, Not,
    Or, StateFormula, TRUE, TrueFormula, Until, WeakUntil, is_literal,
    negate_nnf, to_nnf,
)
from .model import MixedTransitionSystem, Path
from .tlace import Branch, TlaceNode, TlacePath

BRANCH_OPS = frozenset({"EaX", "EaU", "EaG"})


@dataclass(frozen=True)
class GenerationParams:
    """Witness expansion controls: which existential operators get branches,
    and how deep branch nesting may go (None = unbounded)."""

    branch_ops: frozenset[str] = BRANCH_OPS
    max_depth: int | None = None

    def __post_init__(self):
        unknown = self.branch_ops - BRANCH_OPS
        if unknown:
            raise ValueError(f"unknown branch operators: {sorted(unknown)}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be nonnegative")


DEFAULT_PARAMS = GenerationParams()


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: holds on all initial states, or a counter-example
    rooted at the first violating initial state."""

    holds: bool
    state: str | None = None
    counterexample: TlaceNode | None = None


# ---------------------------------------------------------------------------
# Satisfaction sets
# ---------------------------------------------------------------------------

class _Solver:
    """Backward-fixpoint satisfaction sets with per-formula memoization."""

    def __init__(self, mts: MixedTransitionSystem):
        self.mts = mts
        self.all_states = frozenset(mts.states)
        self._memo: dict[StateFormula, frozenset[str]] = {}

    def sat(self, f: StateFormula) -> frozenset[str]:
        cached = self._memo.get(f)
        if cached is None:
            self._memo[f] = cached = self._sat(f)
        return cached

    def _sat(self, f):
        mts = self.mts
        if isinstance(f, TrueFormula):
            return self.all_states
        if isinstance(f, FalseFormula):
            return frozenset()
        if isinstance(f, Atom):
            return frozenset(s for s in mts.states if mts.eval_atom(s, f))
        if isinstance(f, Not):
            if not isinstance(f.operand, Atom):
                raise PreconditionError(f"satisfaction requires NNF, got {f}")
            return self.all_states - self.sat(f.operand)
        if isinstance(f, And):
            return self.sat(f.left) & self.sat(f.right)
        if isinstance(f, Or):
            return self.sat(f.left) | self.sat(f.right)
        if isinstance(f, Exists):
            if f.alpha is None:
                raise PreconditionError("CTLK formula reached the checker unreduced")
            pi = f.path
            if isinstance(pi, Next):
                return self._pre_exists(self.sat(pi.operand), f.alpha)
            if isinstance(pi, Until):
                return self._until(self.sat(pi.left), self.sat(pi.right), f.alpha)
            if isinstance(pi, Globally):
                return self._globally(self.sat(pi.operand), f.alpha)
            raise PreconditionError(f"satisfaction requires NNF, got {f}")
        if isinstance(f, ForAll):
            if f.alpha is None:
                raise PreconditionError("CTLK formula reached the checker unreduced")
            return self.all_states - self.sat(_dual_exists(f))
        raise PreconditionError(f"satisfaction requires NNF, got {f}")

    def _pre_exists(self, targets, alpha):
        allowed = self.mts.alpha_actions(alpha)
        result = set()
        for t in targets:
            for a, s in self.mts.predecessors(t):
                if a in allowed:
                    result.add(s)
        return frozenset(result)

    def _until(self, sat_left, sat_right, alpha):
        allowed = self.mts.alpha_actions(alpha)
        result = set(sat_right)
        queue = deque(sat_right)
        while queue:
            t = queue.popleft()
            for a, s in self.mts.predecessors(t):
                if a in allowed and s not in result and s in sat_left:
                    result.add(s)
                    queue.append(s)
        return frozenset(result)

    def _globally(self, sat_operand, alpha):
        allowed = self.mts.alpha_actions(alpha)
        current = set(sat_operand)
        while True:
            keep = {s for s in current
                    if any(a in allowed and t in current
                           for a, t in self.mts.successors(s))}
            if keep == current:
                return frozenset(current)
            current = keep


def _dual_exists(f: ForAll) -> Exists:
    """The E-form whose complement defines A<alpha>π."""
    pi = f.path
    if isinstance(pi, Next):
        return Exists(f.alpha, Next(negate_nnf(pi.operand)))
    if isinstance(pi, Globally):
        return Exists(f.alpha, Until(TRUE, negate_nnf(pi.operand)))
    if isinstance(pi, Eventually):
        return Exists(f.alpha, Globally(negate_nnf(pi.operand)))
    nl, nr = negate_nnf(pi.left), negate_nnf(pi.right)
    if isinstance(pi, Until):
        # ¬A[φ U ψ] = E[¬ψ U ¬φ∧¬ψ] ∨ E G ¬ψ
        return Exists(f.alpha, WeakUntil(nr, And(nl, nr)))
    return Exists(f.alpha, Until(nr, And(nl, nr)))


class _WeakSolver(_Solver):
    """Extends the solver with W so A-duality can reuse one entry point."""

    def _sat(self, f):
        if isinstance(f, Exists) and isinstance(f.path, WeakUntil):
            until = Exists(f.alpha, Until(f.path.left, f.path.right))
            globally = Exists(f.alpha, Globally(f.path.left))
            return self.sat(until) | self.sat(globally)
        return super()._sat(f)


def sat(mts: MixedTransitionSystem, f: StateFormula) -> frozenset[str]:
    """States of the model satisfying the NNF formula f."""
    return _WeakSolver(mts).sat(f)


# ---------------------------------------------------------------------------
# Witness path search
# ---------------------------------------------------------------------------

def _alpha_successors_in(mts, state, allowed, targets=None):
    return [(a, t) for a, t in mts.successors(state)
            if a in allowed and (targets is None or t in targets)]


def _eax_path(mts, state, sat_operand, alpha):
    allowed = mts.alpha_actions(alpha)
    candidates = _alpha_successors_in(mts, state, allowed, sat_operand)
    if not candidates:
        raise PreconditionError(
            f"state {state!r} has no α-successor satisfying the operand")
    action, target = candidates[0]
    return Path((state, target), (action,))


def _eau_path(mts, state, sat_left, sat_right, alpha):
    """Shortest α-path through sat_left states to a sat_right state (BFS,
    canonical expansion order)."""
    if state in sat_right:
        return Path((state,), ())
    if state not in sat_left:
        raise PreconditionError(f"state {state!r} does not satisfy the until formula")
    allowed = mts.alpha_actions(alpha)
    parents = {state: None}
    queue = deque([state])
    while queue:
        s = queue.popleft()
        for a, t in _alpha_successors_in(mts, s, allowed):
            if t in parents:
                continue
            parents[t] = (s, a)
            if t in sat_right:
                states, actions = [t], []
                while parents[states[0]] is not None:
                    prev, action = parents[states[0]]
                    states.insert(0, prev)
                    actions.insert(0, action)
                return Path(tuple(states), tuple(actions))
            if t in sat_left:
                queue.append(t)
    raise PreconditionError(f"state {state!r} does not satisfy the until formula")


def _bfs(mts, source, allowed, region):
    """Shortest α-paths from source staying inside region; returns
    (dist, parent) with parent[t] = (previous state, action)."""
    dist, parent = {source: 0}, {source: None}
    queue = deque([source])
    while queue:
        s = queue.popleft()
        for a, t in _alpha_successors_in(mts, s, allowed, region):
            if t not in dist:
                dist[t] = dist[s] + 1
                parent[t] = (s, a)
                queue.append(t)
    return dist, parent


def _walk_back(parent, target):
    states, actions = [target], []
    while parent[states[0]] is not None:
        prev, action = parent[states[0]]
        states.insert(0, prev)
        actions.insert(0, action)
    return states, actions


def _eag_path(mts, state, sat_operand, alpha):
    """Minimal lasso (stem plus first-return cycle) from state, with every
    visited state inside sat_operand and every action satisfying alpha."""
    if state not in sat_operand:
        raise PreconditionError(f"state {state!r} does not satisfy the operand")
    allowed = mts.alpha_actions(alpha)
    region = sat_operand
    stem_dist, stem_parent = _bfs(mts, state, allowed, region)

    best = None  # ((total length, knot index), knot, cycle bfs, closing edge)
    for v in mts.states:
        if v not in stem_dist:
            continue
        dist_v, parent_v = _bfs(mts, v, allowed, region)
        closing = None  # (cycle length, action, source)
        for a, u in mts.predecessors(v):
            if a in allowed and u in region and u in dist_v:
                length = dist_v[u] + 1
                if closing is None or length < closing[0]:
                    closing = (length, a, u)
        if closing is None:
            continue
        key = (stem_dist[v] + closing[0], mts.state_index(v))
        if best is None or key < best[0]:
            best = (key, v, parent_v, closing)
    if best is None:
        raise PreconditionError(
            f"state {state!r} has no α-cycle within the operand's satisfaction set")

    _, v, parent_v, (_, closing_action, closing_source) = best
    states, actions = _walk_back(stem_parent, v)
    knot = len(states) - 1
    cycle_states, cycle_actions = _walk_back(parent_v, closing_source)
    states += cycle_states[1:] + [v]
    actions += cycle_actions + [closing_action]
    return Path(tuple(states), tuple(actions), lasso_index=knot)


def eax_explain(mts: MixedTransitionSystem, state, operand, alpha) -> Path:
    """A one-step path ⟨s, a, s'⟩ with s' satisfying the operand and a
    satisfying alpha; canonically least candidate."""
    solver = _WeakSolver(mts)
    target = Exists(alpha, Next(operand))
    if state not in solver.sat(target):
        raise PreconditionError(f"{target} does not hold at {state!r}")
    return _eax_path(mts, state, solver.sat(operand), alpha)


def eau_explain(mts: MixedTransitionSystem, state, left, right, alpha) -> Path:
    """A shortest path from state through left-states to a right-state."""
    solver = _WeakSolver(mts)
    target = Exists(alpha, Until(left, right))
    if state not in solver.sat(target):
        raise PreconditionError(f"{target} does not hold at {state!r}")
    return _eau_path(mts, state, solver.sat(left), solver.sat(right), alpha)


def eag_explain(mts: MixedTransitionSystem, state, operand, alpha) -> Path:
    """A minimal lasso from state whose states all satisfy the operand."""
    solver = _WeakSolver(mts)
    target = Exists(alpha, Globally(operand))
    if state not in solver.sat(target):
        raise PreconditionError(f"{target} does not hold at {state!r}")
    return _eag_path(mts, state, solver.sat(operand), alpha)


# ---------------------------------------------------------------------------
# The witness generator
# ---------------------------------------------------------------------------

class _Explainer:
    """Recursive witness construction with per-(state, formula, level)
    memoization shared across one check call."""

    def __init__(self, mts, params):
        self.mts = mts
        self.params = params
        self.solver = _WeakSolver(mts)
        self._memo = {}

    def explain(self, state, phi, level=0):
        if state not in self.solver.sat(phi):
            raise PreconditionError(f"{phi} does not hold at {state!r}")
        key = (state, phi, level if self.params.max_depth is not None else None)
        cached = self._memo.get(key)
        if cached is None:
            self._memo[key] = cached = self._explain(state, phi, level)
        return cached

    def _explain(self, state, phi, level):
        if isinstance(phi, TrueFormula):
            return TlaceNode(state)
        if is_literal(phi):
            return TlaceNode(state, atomics=frozenset({phi}))
        if isinstance(phi, Or):
            if state in self.solver.sat(phi.left):
                return self.explain(state, phi.left, level)
            return self.explain(state, phi.right, level)
        if isinstance(phi, And):
            left = self.explain(state, phi.left, level)
            right = self.explain(state, phi.right, level)
            branches = list(left.branches)
            branches += [b for b in right.branches if b not in branches]
            return TlaceNode(state, left.atomics | right.atomics, tuple(branches),
                             left.universals | right.universals)
        if isinstance(phi, ForAll):
            return TlaceNode(state, universals=frozenset({phi}))
        if isinstance(phi, Exists):
            return self._explain_exists(state, phi, level)
        raise PreconditionError(f"explain requires an NNF formula, got {phi}")

    def _explain_exists(self, state, phi, level):
        pi = phi.path
        op = {Next: "EaX", Until: "EaU", Globally: "EaG"}.get(type(pi))
        if op is None:
            raise PreconditionError(f"explain requires an NNF formula, got {phi}")
        depth_limit = self.params.max_depth
        if op not in self.params.branch_ops or \
                (depth_limit is not None and level >= depth_limit):
            return TlaceNode(state, branches=(Branch(phi, None),))

        if op == "EaX":
            path = _eax_path(self.mts, state, self.solver.sat(pi.operand), phi.alpha)
            nodes = (TlaceNode(state),
                     self.explain(path.states[1], pi.operand, level + 1))
            tpath = TlacePath(nodes, path.actions)
        elif op == "EaU":
            path = _eau_path(self.mts, state, self.solver.sat(pi.left),
                             self.solver.sat(pi.right), phi.alpha)
            nodes = tuple(self.explain(s, pi.left, level + 1)
                          for s in path.states[:-1])
            nodes += (self.explain(path.states[-1], pi.right, level + 1),)
            tpath = TlacePath(nodes, path.actions)
        else:
            path = _eag_path(self.mts, state, self.solver.sat(pi.operand), phi.alpha)
            nodes = tuple(self.explain(s, pi.operand, level + 1)
                          for s in path.states[:-1])
            tpath = TlacePath(nodes, path.actions, loop_index=path.lasso_index)
        return TlaceNode(state, branches=(Branch(phi, tpath),))


def explain(mts: MixedTransitionSystem, state, phi: StateFormula,
            params: GenerationParams = DEFAULT_PARAMS) -> TlaceNode:
    """A consistent, adequate tree-like annotated witness for the NNF formula
    phi at a state satisfying it (subject to params truncation)."""
    return _Explainer(mts, params).explain(state, phi)


def check(mts: MixedTransitionSystem, f: StateFormula,
          params: GenerationParams = DEFAULT_PARAMS) -> Verdict:
    """Whether all initial states satisfy f; on violation, a witness of the
    negation at the first violating initial state in declaration order."""
    nnf = to_nnf(f)
    holds = sat(mts, nnf)
    for s0 in mts.initial:
        if s0 not in holds:
            witness = explain(mts, s0, negate_nnf(f), params)
            return Verdict(False, s0, witness)
    return Verdict(True)
