#!/usr/bin/env python3
"""Measure how counter-example size grows with model size and property
nesting: the directed-cycle family exhibits the |S|^D worst case, nested
knows-whether properties on the cryptographers stay linear."""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tlace.checker import check, explain
from tlace.epistemic import build_crypto_model, reduce_ctlk, reduce_mas
from tlace.formula import (
    ActionTrue, Atom, Eventually, Exists, ForAll, Globally, Knows, Not, Or,
)
from tlace.model import MixedTransitionSystem
from tlace.tlace import stats


def cycle_model(n):
    states = {f"c{i}": {"b": True} for i in range(n)}
    transitions = [(f"c{i}", "t", f"c{(i + 1) % n}") for i in range(n)]
    return MixedTransitionSystem(["b"], ["step"], states, ["c0"],
                                 {"t": {"step": True}}, transitions)


def nested_eg(depth):
    f = Atom("b")
    for _ in range(depth):
        f = Exists(ActionTrue(), Globally(f))
    return f


def knows_whether(agent, f):
    return Or(Knows(agent, f), Knows(agent, Not(f)))


def main():
    print("directed cycle, nested E<TRUE>G properties")
    print(f"{'|S|':>4} {'D':>3} {'nodes':>7} {'|S|^D':>7} {'ratio':>7}")
    measured = {}
    for n in (3, 4, 5, 6):
        mts = cycle_model(n)
        for d in (1, 2, 3):
            count = stats(explain(mts, "c0", nested_eg(d))).node_count
            measured[(n, d)] = count
            print(f"{n:>4} {d:>3} {count:>7} {n ** d:>7} {count / n ** d:>7.3f}")
    c_fit = math.exp(sum(math.log(c / (n ** d))
                         for (n, d), c in measured.items()) / len(measured))
    print(f"geometric-mean constant: {c_fit:.3f}")

    print()
    print("cryptographers, nested knows-whether properties")
    mts = reduce_mas(build_crypto_model()).mts
    agents = ["b", "a", "b", "a", "b", "a"]
    print(f"{'nesting':>8} {'nodes':>7} {'branches':>9}")
    previous = None
    for nesting in range(1, 7):
        f = Atom("a.payer")
        for i in range(nesting):
            f = knows_whether(agents[i], f)
        verdict = check(mts, reduce_ctlk(ForAll(None, Eventually(f))))
        assert not verdict.holds
        size = stats(verdict.counterexample)
        delta = "" if previous is None else f"  (+{size.node_count - previous})"
        print(f"{nesting:>8} {size.node_count:>7} {size.branch_count:>9}{delta}")
        previous = size.node_count
    return 0


if __name__ == "__main__":
    sys.exit(main())
