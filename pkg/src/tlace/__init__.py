"""Explicit-state ARCTL model checker with tree-like annotated
counter-examples, CTLK support via reduction, and witness certification."""

from .checker import (
    BRANCH_OPS, DEFAULT_PARAMS, GenerationParams, Verdict, check, eag_explain,
    eau_explain, eax_explain, explain, sat,
)
from .epistemic import (
    BACK, INIT_ATOM, RUN, MultiAgentSystem, ReductionResult, agent_action,
    build_crypto_model, build_primality_model, load_mas, reduce_ctlk,
    reduce_mas, save_mas,
)
from .errors import (
    FormulaSyntaxError, ModelFormatError, PreconditionError, SchemaError,
    TlaceError, UnknownAtomError, UnknownOperatorError, UnsupportedOperatorError,
)
from .formula import (
    ActionAnd, ActionAtom, ActionFalse, ActionFormula, ActionNot, ActionOr,
    ActionTrue, And, Atom, Eventually, Exists, FalseFormula, ForAll, Globally,
    Iff, Implies, Knows, Next, Not, Or, PathFormula, StateFormula, TRUE,
    FALSE, TrueFormula, Until, WeakUntil, depth, is_literal, is_nnf,
    negate_nnf, parse_formula, pretty_print, pretty_print_action, to_nnf,
)
from .model import MixedTransitionSystem, Path, load_model, save_model
from .tlace import (
    Branch, TlaceNode, TlacePath, TlaceStats, explains, find_inconsistency,
    find_mismatch, from_json, from_xml, is_adequate, is_consistent, matches,
    node, stats, to_json, to_xml,
)

__version__ = "0.1.0"
