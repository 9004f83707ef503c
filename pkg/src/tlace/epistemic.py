"""Multi-agent systems and the CTLK-to-ARCTL reductions: the model reduction
adds RUN/BACK/Agt_<agent> actions and the Init atom, the formula reduction
rewrites knowledge through A<Agt_i>X guarded by reachability through BACK.

Also hosts the bundled example models: the dining cryptographers protocol and
the Alice/Bob primality guessing game.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ModelFormatError, UnsupportedOperatorError
from .formula import (
    ActionAtom, And, Atom, Eventually, Exists, FalseFormula, ForAll, Globally,
    Iff, Implies, Knows, Next, Not, Or, StateFormula, TRUE, TrueFormula,
    Until,
)
from .model import FORMAT_VERSION, MixedTransitionSystem, _parse_document, _require

RUN = "RUN"
BACK = "BACK"
INIT_ATOM = "Init"


def agent_action(agent: str) -> str:
    """Action atom labeling the epistemic transitions of an agent."""
    return f"Agt_{agent}"


REACHABLE = Exists(ActionAtom(BACK), Eventually(Atom(INIT_ATOM)))


# ---------------------------------------------------------------------------
# Multi-agent systems
# ---------------------------------------------------------------------------

class MultiAgentSystem:
    """Kripke structure with a temporal relation and per-agent observable
    variables; the epistemic relations are derived over reachable states."""

    def __init__(self, state_vars, states, initial, transitions, agents,
                 atoms=None):
        self.state_vars = tuple(state_vars)
        self.states = tuple(states)
        self.state_assignments = {s: dict(states[s]) for s in states}
        self.initial = tuple(initial)
        self.transitions = tuple((s, t) for s, t in transitions)
        self.agents = {name: tuple(local) for name, local in agents.items()}
        self.atom_defs = tuple((name, source) for name, source in (atoms or {}).items())
        self._validate()
        self._state_index = {s: i for i, s in enumerate(self.states)}
        self._succ = {s: [] for s in self.states}
        for s, t in sorted(set(self.transitions),
                           key=lambda st: (self._state_index[st[0]],
                                           self._state_index[st[1]])):
            self._succ[s].append(t)

    def _validate(self):
        if not self.states:
            raise ModelFormatError("empty state set")
        if not self.initial:
            raise ModelFormatError("empty initial state set")
        if len(set(self.states)) != len(self.states):
            raise ModelFormatError("duplicate state identifier")
        state_set = set(self.states)
        for s in self.initial:
            if s not in state_set:
                raise ModelFormatError(f"initial section references undeclared state {s!r}")
        for i, (s, t) in enumerate(self.transitions):
            if s not in state_set or t not in state_set:
                raise ModelFormatError(f"transition {i} references an undeclared state")
        for s, assignment in self.state_assignments.items():
            if set(assignment) != set(self.state_vars):
                raise ModelFormatError(
                    f"state {s!r} must assign exactly the declared state variables")
        if not self.agents:
            raise ModelFormatError("a multi-agent system declares at least one agent")
        for name, local in self.agents.items():
            undeclared = set(local) - set(self.state_vars)
            if undeclared:
                raise ModelFormatError(
                    f"agent {name!r} observes undeclared variables {sorted(undeclared)}")

    def successors(self, state):
        return list(self._succ[state])

    def reachable(self) -> frozenset[str]:
        seen = set(self.initial)
        frontier = list(self.initial)
        while frontier:
            s = frontier.pop()
            for t in self._succ[s]:
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        return frozenset(seen)

    def local_state(self, agent, state):
        assignment = self.state_assignments[state]
        return tuple(assignment[v] for v in self.agents[agent])

    def equivalent(self, agent, s, t, reachable=None) -> bool:
        """s ∼_agent t: both reachable and equal on the agent's observables."""
        reachable = self.reachable() if reachable is None else reachable
        return (s in reachable and t in reachable
                and self.local_state(agent, s) == self.local_state(agent, t))

    def to_document(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "state_vars": list(self.state_vars),
            "states": {s: dict(self.state_assignments[s]) for s in self.states},
            "initial": list(self.initial),
            "transitions": [[s, t] for s, t in self.transitions],
            "atoms": {name: source for name, source in self.atom_defs},
            "agents": {name: list(local) for name, local in self.agents.items()},
        }

    def __eq__(self, other):
        if not isinstance(other, MultiAgentSystem):
            return NotImplemented
        return self.to_document() == other.to_document()

    def __repr__(self):
        return (f"MultiAgentSystem({len(self.states)} states, "
                f"{len(self.agents)} agents, {len(self.transitions)} transitions)")


_MAS_SECTIONS = {"format", "state_vars", "states", "initial", "transitions",
                 "atoms", "agents"}


def load_mas(text: str) -> MultiAgentSystem:
    """Parse a multi-agent-system document (model format with an ``agents``
    section and action-free transitions)."""
    document = _parse_document(text, "multi-agent system")
    if "agents" not in document:
        raise ModelFormatError("multi-agent system document is missing the 'agents' section")
    unknown = set(document) - _MAS_SECTIONS
    if unknown:
        raise ModelFormatError(f"unknown sections: {sorted(unknown)}")
    state_vars = _require(document, "state_vars", list, "multi-agent system")
    states = _require(document, "states", dict, "multi-agent system")
    initial = _require(document, "initial", list, "multi-agent system")
    raw_transitions = _require(document, "transitions", list, "multi-agent system")
    agents = _require(document, "agents", dict, "multi-agent system")
    atoms = document.get("atoms", {})
    if not isinstance(atoms, dict):
        raise ModelFormatError("section 'atoms' has the wrong shape")
    transitions = []
    for i, entry in enumerate(raw_transitions):
        if not (isinstance(entry, list) and len(entry) == 2
                and all(isinstance(x, str) for x in entry)):
            raise ModelFormatError(f"transition {i} must be a [src, dst] pair")
        transitions.append(tuple(entry))
    return MultiAgentSystem(state_vars, states, initial, transitions, agents, atoms)


def save_mas(mas: MultiAgentSystem) -> str:
    return json.dumps(mas.to_document(), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Model reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionResult:
    """The reduced MTS plus bookkeeping: the introduced action atoms, the
    initial-state atom, and each action's origin."""

    mts: MixedTransitionSystem
    action_atoms: tuple[str, ...]
    init_atom: str
    origins: dict[str, str]


def reduce_mas(mas: MultiAgentSystem) -> ReductionResult:
    """Build the MTS whose RUN/BACK actions mirror the temporal relation and
    whose Agt_<agent> actions realize the epistemic equivalences over
    reachable states; Init labels exactly the initial states."""
    action_names = [RUN, BACK] + [agent_action(a) for a in mas.agents]
    collisions = set(action_names + [INIT_ATOM]) & set(mas.state_vars)
    if collisions:
        raise ModelFormatError(
            f"state variables collide with reserved reduction names: {sorted(collisions)}")

    initial_set = set(mas.initial)
    states = {
        s: {**mas.state_assignments[s], INIT_ATOM: s in initial_set}
        for s in mas.states
    }
    actions = {
        name: {flag: flag == name for flag in action_names}
        for name in action_names
    }
    transitions = []
    for s, t in mas.transitions:
        transitions.append((s, RUN, t))
    for s, t in mas.transitions:
        transitions.append((t, BACK, s))
    reachable = mas.reachable()
    classes: dict[str, dict[tuple, list[str]]] = {}
    for agent in mas.agents:
        groups: dict[tuple, list[str]] = {}
        for s in mas.states:
            if s in reachable:
                groups.setdefault(mas.local_state(agent, s), []).append(s)
        classes[agent] = groups
        label = agent_action(agent)
        for group in groups.values():
            for s in group:
                for t in group:
                    transitions.append((s, label, t))

    mts = MixedTransitionSystem(
        state_vars=list(mas.state_vars) + [INIT_ATOM],
        action_vars=action_names,
        states=states,
        initial=mas.initial,
        actions=actions,
        transitions=transitions,
        atoms={name: source for name, source in mas.atom_defs},
    )
    origins = {RUN: "temporal", BACK: "reverse"}
    origins.update({agent_action(a): f"epistemic:{a}" for a in mas.agents})
    return ReductionResult(mts, tuple(action_names), INIT_ATOM, origins)


# ---------------------------------------------------------------------------
# Formula reduction
# ---------------------------------------------------------------------------

def reduce_ctlk(f: StateFormula) -> StateFormula:
    """Rewrite a CTLK formula into ARCTL: temporal operators through RUN,
    knowledge through A<Agt_i>X guarded by E<BACK>F Init; universal temporal
    operators are first expressed by the standard CTL dualities."""
    if isinstance(f, (TrueFormula, FalseFormula, Atom)):
        return f
    if isinstance(f, Not):
        return Not(reduce_ctlk(f.operand))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(reduce_ctlk(f.left), reduce_ctlk(f.right))
    if isinstance(f, Knows):
        guarded = Implies(REACHABLE, reduce_ctlk(f.operand))
        return ForAll(ActionAtom(agent_action(f.agent)), Next(guarded))
    if isinstance(f, Exists):
        _require_unrestricted(f)
        run = ActionAtom(RUN)
        pi = f.path
        if isinstance(pi, Next):
            return Exists(run, Next(reduce_ctlk(pi.operand)))
        if isinstance(pi, Globally):
            return Exists(run, Globally(reduce_ctlk(pi.operand)))
        if isinstance(pi, Eventually):
            return Exists(run, Until(TRUE, reduce_ctlk(pi.operand)))
        if isinstance(pi, Until):
            return Exists(run, Until(reduce_ctlk(pi.left), reduce_ctlk(pi.right)))
        # E[φ W ψ] = E[φ U ψ] ∨ EG φ
        return Or(reduce_ctlk(Exists(None, Until(pi.left, pi.right))),
                  reduce_ctlk(Exists(None, Globally(pi.left))))
    if isinstance(f, ForAll):
        _require_unrestricted(f)
        pi = f.path
        if isinstance(pi, Next):
            return Not(reduce_ctlk(Exists(None, Next(Not(pi.operand)))))
        if isinstance(pi, Globally):
            return Not(reduce_ctlk(Exists(None, Eventually(Not(pi.operand)))))
        if isinstance(pi, Eventually):
            return Not(reduce_ctlk(Exists(None, Globally(Not(pi.operand)))))
        nl, nr = Not(pi.left), Not(pi.right)
        if isinstance(pi, Until):
            # A[φ U ψ] = ¬(E[¬ψ U ¬φ∧¬ψ] ∨ EG ¬ψ)
            return Not(Or(reduce_ctlk(Exists(None, Until(nr, And(nl, nr)))),
                          reduce_ctlk(Exists(None, Globally(nr)))))
        return Not(reduce_ctlk(Exists(None, Until(nr, And(nl, nr)))))
    raise UnsupportedOperatorError(f"cannot reduce {f} to ARCTL")


def _require_unrestricted(f):
    if f.alpha is not None:
        raise UnsupportedOperatorError(
            "action-restricted quantifiers have no CTLK reading; "
            "use the arctl dialect for ARCTL formulas")


# ---------------------------------------------------------------------------
# Bundled example: the dining cryptographers protocol
# ---------------------------------------------------------------------------

CRYPTO_AGENTS = ("a", "b", "c")


def build_crypto_model() -> MultiAgentSystem:
    """Three dining cryptographers around a table (ring a→b→c→a).

    Phase 0 fixes who pays (nobody or exactly one), phase 1 flips the three
    coins, phase 2 publishes the claims: a non-payer claims whether the two
    coins she sees are equal, the payer claims the opposite.  The terminal
    phase loops on itself.  Agent x sees her own coin and the coin of her
    left neighbor, her own payer flag, all claims and the phase.
    """
    agents = CRYPTO_AGENTS
    left = {"a": "c", "b": "a", "c": "b"}
    payers = ("none",) + agents

    def coin_id(coins):
        return "".join("H" if coins[x] else "T" for x in agents)

    def claim_id(claims):
        return "".join(claims[x][0].upper() for x in agents)  # E / D

    states, transitions, initial = {}, [], []

    def state_vars_for(payer, coins, claims, phase):
        record = {"phase": phase}
        for x in agents:
            record[f"{x}.payer"] = payer == x
            record[f"coin.{x}"] = coins[x]
            record[f"claim.{x}"] = claims[x]
        return record

    no_coins = {x: False for x in agents}
    no_claims = {x: "none" for x in agents}
    coin_flips = [
        {agents[0]: bool(bits & 4), agents[1]: bool(bits & 2), agents[2]: bool(bits & 1)}
        for bits in range(8)
    ]

    for payer in payers:
        sid = f"init_{payer}"
        states[sid] = state_vars_for(payer, no_coins, no_claims, 0)
        initial.append(sid)
    for payer in payers:
        for coins in coin_flips:
            sid = f"flip_{payer}_{coin_id(coins)}"
            states[sid] = state_vars_for(payer, coins, no_claims, 1)
            transitions.append((f"init_{payer}", sid))
    for payer in payers:
        for coins in coin_flips:
            claims = {
                x: "equal" if (coins[x] == coins[left[x]]) != (payer == x)
                else "different"
                for x in agents
            }
            sid = f"claim_{payer}_{coin_id(coins)}_{claim_id(claims)}"
            states[sid] = state_vars_for(payer, coins, claims, 2)
            transitions.append((f"flip_{payer}_{coin_id(coins)}", sid))
            transitions.append((sid, sid))

    agent_locals = {
        x: (f"{x}.payer", f"coin.{x}", f"coin.{left[x]}",
            "claim.a", "claim.b", "claim.c", "phase")
        for x in agents
    }
    return MultiAgentSystem(
        state_vars=["phase"]
        + [f"{x}.payer" for x in agents]
        + [f"coin.{x}" for x in agents]
        + [f"claim.{x}" for x in agents],
        states=states,
        initial=initial,
        transitions=transitions,
        agents=agent_locals,
    )


# ---------------------------------------------------------------------------
# Bundled example: Alice, Bob and the primality of N
# ---------------------------------------------------------------------------

def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def build_primality_model(low=10, high=100, questions=(2, 3, 5)) -> MultiAgentSystem:
    """Alice picks N in [low, high]; Bob asks whether N is divisible by each
    of the fixed question numbers in turn.  Bob observes only the step
    counter and Alice's answers, never N itself."""
    answer_vars = [f"ans{i + 1}" for i in range(len(questions))]
    states, transitions, initial = {}, [], []
    for n in range(low, high + 1):
        for step in range(len(questions) + 1):
            sid = f"n{n}_step{step}"
            record = {"n": n, "prime": _is_prime(n), "step": step}
            for i, q in enumerate(questions):
                record[answer_vars[i]] = ("yes" if n % q == 0 else "no") \
                    if step > i else "none"
            states[sid] = record
            if step == 0:
                initial.append(sid)
            if step < len(questions):
                transitions.append((sid, f"n{n}_step{step + 1}"))
            else:
                transitions.append((sid, sid))
    return MultiAgentSystem(
        state_vars=["n", "prime", "step"] + answer_vars,
        states=states,
        initial=initial,
        transitions=transitions,
        agents={
            "alice": ("n", "prime", "step", *answer_vars),
            "bob": ("step", *answer_vars),
        },
    )
