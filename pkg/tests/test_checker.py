"""Satisfaction sets, witness paths and the generator against the oracles."""

import random

import pytest

from generators import ALPHAS, nnf_formula_family, random_mts
from oracles import minimal_lasso_length, minimal_until_length, oracle_sat
from tlace.checker import (
    GenerationParams, check, eag_explain, eau_explain, eax_explain, explain,
    sat,
)
from tlace.errors import PreconditionError
from tlace.formula import (
    ActionAtom, ActionTrue, Atom, Exists, ForAll, Globally, Next, Not, TRUE,
    Until, negate_nnf, parse_formula, pretty_print,
)
from tlace.model import MixedTransitionSystem
from tlace.tlace import Branch, TlaceNode, explains, is_adequate


def chain3():
    """s0 -> s1 -> s2, p at s0/s1, q at s2."""
    return MixedTransitionSystem(
        ["p", "q"], ["u"],
        {"s0": {"p": True, "q": False},
         "s1": {"p": True, "q": False},
         "s2": {"p": False, "q": True}},
        ["s0"], {"a": {"u": True}},
        [("s0", "a", "s1"), ("s1", "a", "s2")])


class TestSat:
    def test_true_everywhere(self, two_state_chain):
        assert sat(two_state_chain, TRUE) == {"s0", "s1"}

    def test_exists_next(self, two_state_chain):
        f = Exists(ActionAtom("u"), Next(Atom("p")))
        assert sat(two_state_chain, f) == {"s0"}
        assert oracle_sat(two_state_chain, f) == {"s0"}

    def test_exists_globally_needs_loop(self, loop_state):
        f = Exists(ActionAtom("u"), Globally(Atom("p")))
        assert sat(loop_state, f) == {"s0"}
        assert oracle_sat(loop_state, f) == {"s0"}

    def test_globally_false_on_finite_paths(self, two_state_chain):
        # p holds at s1 but the only maximal path from s1 is finite
        f = Exists(ActionAtom("u"), Globally(Atom("p")))
        assert sat(two_state_chain, f) == frozenset()

    def test_non_nnf_rejected(self, two_state_chain):
        with pytest.raises(PreconditionError):
            sat(two_state_chain, Not(TRUE))

    def test_unknown_atom_propagates(self, two_state_chain):
        from tlace.errors import UnknownAtomError

        with pytest.raises(UnknownAtomError):
            sat(two_state_chain, Atom("ghost"))
        with pytest.raises(UnknownAtomError):
            sat(two_state_chain, Exists(ActionAtom("ghost"), Next(Atom("p"))))

    def test_matches_oracle_on_random_corpus(self):
        rng = random.Random(21)
        for _ in range(80):
            mts = random_mts(rng)
            for f in nnf_formula_family(rng, depth=2, per_level=8):
                assert sat(mts, f) == oracle_sat(mts, f), \
                    f"{pretty_print(f)} on {mts.to_document()}"


class TestCheck:
    def test_tautology(self, two_state_chain):
        verdict = check(two_state_chain, TRUE)
        assert verdict.holds and verdict.counterexample is None

    def test_violation_reports_first_initial(self):
        mts = MixedTransitionSystem(
            ["p"], ["u"],
            {"s0": {"p": True}, "s1": {"p": False}, "s2": {"p": False}},
            ["s0", "s1", "s2"], {"a": {"u": True}}, [])
        verdict = check(mts, Atom("p"))
        assert not verdict.holds
        assert verdict.state == "s1"
        assert verdict.counterexample.state == "s1"

    def test_counterexample_is_adequate(self, two_state_chain):
        f = parse_formula("A<u>G p")
        verdict = check(two_state_chain, f)
        assert not verdict.holds
        witness = verdict.counterexample
        assert is_adequate(witness, two_state_chain, negate_nnf(f), verdict.state)


class TestExplainPaths:
    def test_eax_only_candidate(self, two_state_chain):
        path = eax_explain(two_state_chain, "s0", Atom("p"), ActionAtom("u"))
        assert path.states == ("s0", "s1")
        assert path.actions == ("a",)

    def test_eax_canonically_least(self):
        mts = MixedTransitionSystem(
            ["p"], ["u"],
            {"s0": {"p": False}, "s1": {"p": True}, "s2": {"p": True}},
            ["s0"], {"a": {"u": True}, "b": {"u": True}},
            [("s0", "b", "s1"), ("s0", "a", "s2"), ("s0", "a", "s1")])
        # enumerate candidates and order by (action index, state index)
        candidates = sorted(
            ((a, t) for (s, a, t) in mts.transitions if s == "s0"),
            key=lambda at: (mts.actions.index(at[0]), mts.states.index(at[1])))
        path = eax_explain(mts, "s0", Atom("p"), ActionTrue())
        assert (path.actions[0], path.states[1]) == candidates[0] == ("a", "s1")

    def test_eax_defensive(self, two_state_chain):
        with pytest.raises(PreconditionError):
            eax_explain(two_state_chain, "s1", Atom("p"), ActionAtom("u"))

    def test_eau_immediate(self, two_state_chain):
        path = eau_explain(two_state_chain, "s1", Atom("q"), Atom("p"),
                           ActionAtom("u"))
        assert path.states == ("s1",)
        assert path.actions == ()

    def test_eau_chain(self):
        mts = chain3()
        path = eau_explain(mts, "s0", Atom("p"), Atom("q"), ActionAtom("u"))
        assert path.states == ("s0", "s1", "s2")

    def test_eau_shortest(self):
        # two routes to q: length 2 via s1, length 1 direct
        mts = MixedTransitionSystem(
            ["p", "q"], ["u"],
            {"s0": {"p": True, "q": False},
             "s1": {"p": True, "q": False},
             "s2": {"p": False, "q": True}},
            ["s0"], {"a": {"u": True}},
            [("s0", "a", "s1"), ("s1", "a", "s2"), ("s0", "a", "s2")])
        path = eau_explain(mts, "s0", Atom("p"), Atom("q"), ActionAtom("u"))
        assert len(path.actions) == 1

    def test_eag_self_loop(self, loop_state):
        path = eag_explain(loop_state, "s0", Atom("p"), ActionAtom("u"))
        assert path.states == ("s0", "s0")
        assert path.lasso_index == 0

    def test_eag_stem_into_cycle(self):
        mts = MixedTransitionSystem(
            ["p"], ["u"],
            {f"s{i}": {"p": True} for i in range(4)},
            ["s0"], {"a": {"u": True}},
            [("s0", "a", "s1"), ("s1", "a", "s2"), ("s2", "a", "s3"),
             ("s3", "a", "s2")])
        path = eag_explain(mts, "s0", Atom("p"), ActionAtom("u"))
        assert path.states[0] == "s0"
        assert path.states[path.lasso_index] == path.states[-1]
        assert len(path.actions) == 4  # 2-edge stem + 2-edge cycle

    def test_eag_no_cycle_fails(self):
        mts = chain3()
        with pytest.raises(PreconditionError):
            eag_explain(mts, "s0", TRUE, ActionAtom("u"))


class TestPathMinimality:
    def test_eau_matches_bfs_oracle(self):
        rng = random.Random(22)
        checked = 0
        while checked < 200:
            mts = random_mts(rng)
            alpha = rng.choice(ALPHAS)
            left, right = sat(mts, Atom("p")), sat(mts, Atom("q"))
            target = sat(mts, Exists(alpha, Until(Atom("p"), Atom("q"))))
            for s in target:
                path = eau_explain(mts, s, Atom("p"), Atom("q"), alpha)
                expected = minimal_until_length(mts, s, left, right, alpha)
                assert len(path.actions) == expected
                checked += 1

    def test_eag_matches_lasso_oracle(self):
        rng = random.Random(23)
        checked = 0
        while checked < 200:
            mts = random_mts(rng)
            alpha = rng.choice(ALPHAS)
            region = sat(mts, Atom("p"))
            target = sat(mts, Exists(alpha, Globally(Atom("p"))))
            for s in target:
                path = eag_explain(mts, s, Atom("p"), alpha)
                expected = minimal_lasso_length(mts, s, region, alpha)
                assert len(path.actions) <= expected
                checked += 1


class TestExplain:
    def test_literal(self, loop_state):
        n = explain(loop_state, "s0", Atom("p"))
        assert n == TlaceNode("s0", atomics=frozenset({Atom("p")}))

    def test_universal_annotation_only(self, loop_state):
        f = ForAll(ActionAtom("u"), Globally(Atom("p")))
        n = explain(loop_state, "s0", f)
        assert n == TlaceNode("s0", universals=frozenset({f}))

    def test_globally_self_loop_shape(self, loop_state):
        f = Exists(ActionAtom("u"), Globally(Atom("p")))
        n = explain(loop_state, "s0", f)
        assert len(n.branches) == 1
        path = n.branches[0].path
        assert [child.state for child in path.nodes] == ["s0"]
        assert path.loop_index == 0
        assert path.nodes[0].atomics == {Atom("p")}
        assert is_adequate(n, loop_state, f, "s0")

    def test_until_immediate(self, two_state_chain):
        f = Exists(ActionAtom("u"), Until(Atom("q"), Atom("p")))
        n = explain(two_state_chain, "s1", f)
        path = n.branches[0].path
        assert len(path.nodes) == 1
        assert path.nodes[0].atomics == {Atom("p")}

    def test_next_first_node_empty(self, two_state_chain):
        f = Exists(ActionAtom("u"), Next(Atom("p")))
        n = explain(two_state_chain, "s0", f)
        first = n.branches[0].path.nodes[0]
        assert first == TlaceNode("s0")

    def test_disjunction_prefers_left(self, loop_state):
        f = parse_formula("p | E<u>X p")
        n = explain(loop_state, "s0", f)
        assert n.atomics == {Atom("p")} and not n.branches

    def test_precondition_violation(self, two_state_chain):
        with pytest.raises(PreconditionError):
            explain(two_state_chain, "s0", Atom("p"))

    def test_deterministic(self):
        rng = random.Random(24)
        for _ in range(20):
            mts = random_mts(rng)
            for f in nnf_formula_family(rng, depth=2, per_level=5):
                states = sat(mts, f)
                for s in sorted(states):
                    assert explain(mts, s, f) == explain(mts, s, f)

    def test_generator_sound_on_corpus(self):
        rng = random.Random(25)
        for _ in range(30):
            mts = random_mts(rng)
            for f in nnf_formula_family(rng, depth=2, per_level=6):
                for s in sorted(sat(mts, f)):
                    witness = explain(mts, s, f)
                    assert is_adequate(witness, mts, f, s), \
                        f"{pretty_print(f)} at {s}"

    def test_existential_fragment_completeness(self):
        """For the existential fragment a witness exists exactly when the
        state satisfies the formula: explain succeeds on sat states and
        refuses everywhere else."""
        rng = random.Random(26)
        for _ in range(25):
            mts = random_mts(rng)
            for f in nnf_formula_family(rng, depth=2, per_level=6):
                if _has_universal(f):
                    continue
                satisfied = sat(mts, f)
                for s in mts.states:
                    if s in satisfied:
                        assert is_adequate(explain(mts, s, f), mts, f, s)
                    else:
                        with pytest.raises(PreconditionError):
                            explain(mts, s, f)


def _has_universal(f):
    from tlace.formula import And, ForAll, Or

    if isinstance(f, ForAll):
        return True
    if isinstance(f, (And, Or)):
        return _has_universal(f.left) or _has_universal(f.right)
    if isinstance(f, Exists):
        parts = (f.path.operand,) if hasattr(f.path, "operand") else \
            (f.path.left, f.path.right)
        return any(_has_universal(g) for g in parts)
    return False


class TestGenerationParams:
    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            GenerationParams(branch_ops=frozenset({"EaF"}))

    def test_negative_depth_rejected(self):
        with pytest.raises(ValueError):
            GenerationParams(max_depth=-1)

    def test_excluded_op_not_expanded(self, loop_state):
        f = Exists(ActionAtom("u"), Globally(Atom("p")))
        params = GenerationParams(branch_ops=frozenset({"EaX", "EaU"}))
        n = explain(loop_state, "s0", f, params)
        assert n.truncated
        assert n.branches == (Branch(f, None),)
        assert explains(n, loop_state, f)

    def test_depth_zero_truncates_root(self, loop_state):
        f = Exists(ActionAtom("u"), Globally(Atom("p")))
        n = explain(loop_state, "s0", f, GenerationParams(max_depth=0))
        assert n.truncated and n.branches[0].path is None

    def test_depth_limits_nesting(self, loop_state):
        f = Exists(ActionAtom("u"), Globally(
            Exists(ActionAtom("u"), Globally(Atom("p")))))
        n = explain(loop_state, "s0", f, GenerationParams(max_depth=1))
        outer = n.branches[0]
        assert outer.path is not None
        inner = outer.path.nodes[0].branches[0]
        assert inner.path is None
        # unlimited expansion reaches depth 2
        full = explain(loop_state, "s0", f)
        assert full.branches[0].path.nodes[0].branches[0].path is not None
