"""Command-line interface: check properties, validate exported witnesses,
report witness statistics, and reduce multi-agent systems to plain models.

Exit codes: 0 = property holds / witness adequate, 1 = property violated /
witness rejected, 2 = usage, format or model errors.
"""

from __future__ import annotations

import argparse
import sys

from .checker import BRANCH_OPS, GenerationParams, check
from .epistemic import load_mas, reduce_ctlk, reduce_mas
from .errors import TlaceError
from .formula import negate_nnf, parse_formula, pretty_print, to_nnf
from .model import load_model, save_model
from .tlace import (
    explains, find_inconsistency, find_mismatch, from_json, from_xml, stats,
    to_json, to_xml,
)


def _read(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise TlaceError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise TlaceError(f"cannot write {path}: {exc.strerror}") from None


def _load_checkable(model_path, dialect):
    """Load the model for a dialect; ctlk reduces a MAS document, arctl
    loads a plain model document."""
    text = _read(model_path)
    if dialect == "ctlk":
        return reduce_mas(load_mas(text)).mts
    return load_model(text)


def _parse_property(args):
    if (args.formula is None) == (args.formula_file is None):
        raise TlaceError("provide exactly one of --formula or --formula-file")
    text = args.formula if args.formula is not None else _read(args.formula_file)
    f = parse_formula(text.strip(), args.dialect)
    return reduce_ctlk(f) if args.dialect == "ctlk" else f


def _generation_params(args):
    ops = BRANCH_OPS
    if args.explain_ops is not None:
        names = [w.strip() for w in args.explain_ops.split(",") if w.strip()]
        unknown = set(names) - BRANCH_OPS
        if unknown:
            raise TlaceError(
                f"unknown --explain-ops operators {sorted(unknown)}; "
                f"choose from {sorted(BRANCH_OPS)}")
        ops = frozenset(names)
    return GenerationParams(branch_ops=ops, max_depth=args.max_depth)


def render_text(node, indent=""):
    """Indented tree rendering of a witness for terminal reading."""
    lines = [f"{indent}state {node.state}"]
    for lit in sorted(node.atomics, key=pretty_print):
        lines.append(f"{indent}  atomic: {pretty_print(lit)}")
    for f in sorted(node.universals, key=pretty_print):
        lines.append(f"{indent}  universal: {pretty_print(f)}")
    for branch in node.branches:
        if branch.path is None:
            lines.append(f"{indent}  branch {pretty_print(branch.formula)} (not expanded)")
            continue
        lines.append(f"{indent}  branch {pretty_print(branch.formula)}:")
        path = branch.path
        for i, child in enumerate(path.nodes):
            lines.append(render_text(child, indent + "    "))
            if i < len(path.actions):
                arrow = f"{indent}    --{path.actions[i]}-->"
                if path.loop_index is not None and i == len(path.nodes) - 1:
                    arrow += f" loop to position {path.loop_index}"
                lines.append(arrow)
    return "\n".join(lines)


def _serialize(node, fmt):
    if fmt == "xml":
        return to_xml(node)
    if fmt == "json":
        return to_json(node)
    return render_text(node) + "\n"


def cmd_check(args):
    mts = _load_checkable(args.model, args.dialect)
    f = _parse_property(args)
    verdict = check(mts, f, _generation_params(args))
    if verdict.holds:
        print(f"holds: all {len(mts.initial)} initial states satisfy the property")
        return 0
    print(f"violated: initial state {verdict.state} does not satisfy the property")
    document = _serialize(verdict.counterexample, args.format)
    _write(args.output, document)
    if args.output != "-":
        print(f"counter-example written to {args.output}")
    return 1


def _load_tlace(path):
    text = _read(path)
    stripped = text.lstrip()
    return from_xml(text) if stripped.startswith("<") else from_json(text)


def cmd_validate(args):
    mts = _load_checkable(args.model, args.dialect)
    f = _parse_property(args)
    target = to_nnf(f) if args.witness else negate_nnf(f)
    node = _load_tlace(args.tlace)
    problem = find_inconsistency(node)
    if problem:
        print(f"inadequate (consistency): {problem}")
        return 1
    problem = find_mismatch(node, mts)
    if problem:
        print(f"inadequate (matches): {problem}")
        return 1
    if not explains(node, mts, target):
        print(f"inadequate (explains): the witness does not explain "
              f"{pretty_print(target)} at {node.state}")
        return 1
    print("adequate: witness is consistent, matches the model and explains "
          + pretty_print(target))
    return 0


def _plural(count, singular, plural):
    return f"{count} {singular if count == 1 else plural}"


def cmd_stats(args):
    result = stats(_load_tlace(args.tlace))
    print(f"{_plural(result.node_count, 'node', 'nodes')}, "
          f"{_plural(result.branch_count, 'branch', 'branches')}, "
          f"max depth {result.max_temporal_depth}")
    return 0


def cmd_reduce(args):
    reduction = reduce_mas(load_mas(_read(args.mas)))
    _write(args.output, save_model(reduction.mts))
    summary = ", ".join(f"{name} ({origin})"
                        for name, origin in reduction.origins.items())
    print(f"reduced: actions {summary}; atom {reduction.init_atom} "
          f"marks initial states", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tlace",
        description="ARCTL/CTLK model checking with tree-like annotated "
                    "counter-examples")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_property_args(p):
        p.add_argument("--formula", "-f", help="property text")
        p.add_argument("--formula-file", help="file holding the property")
        p.add_argument("--dialect", choices=("arctl", "ctlk"), default="arctl",
                       help="formula dialect; ctlk expects a multi-agent model")

    p_check = sub.add_parser("check", help="check a property, export a "
                                           "counter-example on violation")
    p_check.add_argument("model", help="model document (plain or multi-agent)")
    add_property_args(p_check)
    p_check.add_argument("--explain-ops", metavar="LIST",
                         help="comma-separated subset of EaX,EaU,EaG to expand")
    p_check.add_argument("--max-depth", type=int, default=None, metavar="N",
                         help="maximum nesting of generated branches")
    p_check.add_argument("--format", choices=("xml", "json", "text"),
                         default="text", help="counter-example format")
    p_check.add_argument("--output", "-o", default="-", metavar="PATH",
                         help="counter-example destination ('-' = stdout)")
    p_check.set_defaults(handler=cmd_check)

    p_validate = sub.add_parser("validate",
                                help="certify an exported witness against a "
                                     "model and property")
    p_validate.add_argument("model")
    p_validate.add_argument("tlace", help="witness document (xml or json)")
    add_property_args(p_validate)
    p_validate.add_argument("--witness", action="store_true",
                            help="the document witnesses the property itself, "
                                 "not its negation")
    p_validate.set_defaults(handler=cmd_validate)

    p_stats = sub.add_parser("stats", help="report witness size statistics")
    p_stats.add_argument("tlace")
    p_stats.set_defaults(handler=cmd_stats)

    p_reduce = sub.add_parser("reduce",
                              help="reduce a multi-agent system to a plain model")
    p_reduce.add_argument("mas")
    p_reduce.add_argument("--output", "-o", default="-", metavar="PATH")
    p_reduce.set_defaults(handler=cmd_reduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except TlaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
