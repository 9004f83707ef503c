#!/usr/bin/env python3
"""Alice picks N in 10..100, Bob probes divisibility by 2, 3, 5 and must
decide whether N is prime.  Checks that Bob does not always find out, and
exports the model plus the counter-example."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tlace.checker import check
from tlace.epistemic import build_primality_model, reduce_ctlk, reduce_mas, save_mas
from tlace.formula import parse_formula
from tlace.tlace import stats, to_json, to_xml

PROPERTY = "AF (K<bob> prime | K<bob> !prime)"


def main():
    out_dir = Path(__file__).resolve().parents[1] / "data"
    out_dir.mkdir(exist_ok=True)

    mas = build_primality_model()
    print(f"model: {len(mas.states)} states over N in 10..100")
    (out_dir / "primality.mas.json").write_text(save_mas(mas), encoding="utf-8")

    mts = reduce_mas(mas).mts
    verdict = check(mts, reduce_ctlk(parse_formula(PROPERTY, "ctlk")))
    if verdict.holds:
        print("unexpected: Bob always learns the answer")
        return 1
    size = stats(verdict.counterexample)
    print(f"violated at {verdict.state} (its divisibility pattern is shared "
          f"by prime and composite numbers)")
    print(f"counter-example: {size.node_count} nodes, "
          f"{size.branch_count} branches")
    (out_dir / "primality.tlace.xml").write_text(to_xml(verdict.counterexample),
                                                 encoding="utf-8")
    (out_dir / "primality.tlace.json").write_text(to_json(verdict.counterexample),
                                                  encoding="utf-8")
    print(f"exports written to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
