#!/usr/bin/env python3
"""Regenerate frontend/fixtures: the bundled exports plus two witnesses the
visualizer tests rely on (a 37-branch nested-knowledge counter-example and a
depth-limited witness with unexpanded branches)."""

import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tlace.checker import GenerationParams, check
from tlace.epistemic import build_crypto_model, reduce_ctlk, reduce_mas
from tlace.formula import Atom, Eventually, ForAll, Knows, Not, Or, parse_formula
from tlace.tlace import stats, to_json

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "frontend" / "fixtures"

CRYPTO_PROPERTY = "!a.payer -> AF (K<a> b.payer | K<a> c.payer)"


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name in ("cryptographers.tlace.json", "cryptographers.tlace.xml",
                 "cryptographers.model.json", "primality.tlace.json"):
        source = ROOT / "data" / name
        if not source.exists():
            print(f"missing {source}; run the demo scripts first")
            return 1
        shutil.copy(source, FIXTURES / name)

    mts = reduce_mas(build_crypto_model()).mts

    f = Atom("a.payer")
    for agent in ("b", "a", "b"):
        f = Or(Knows(agent, f), Knows(agent, Not(f)))
    verdict = check(mts, reduce_ctlk(ForAll(None, Eventually(f))))
    assert not verdict.holds
    size = stats(verdict.counterexample)
    (FIXTURES / "nested-knowledge.tlace.json").write_text(
        to_json(verdict.counterexample), encoding="utf-8")
    print(f"nested-knowledge: {size.node_count} nodes, {size.branch_count} branches")

    prop = reduce_ctlk(parse_formula(CRYPTO_PROPERTY, "ctlk"))
    verdict = check(mts, prop, GenerationParams(max_depth=2))
    assert not verdict.holds
    text = to_json(verdict.counterexample)
    assert '"path": null' in text
    (FIXTURES / "truncated.tlace.json").write_text(text, encoding="utf-8")
    print("truncated: depth-limited witness with unexpanded branches")
    return 0


if __name__ == "__main__":
    sys.exit(main())
