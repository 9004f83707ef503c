"""ARCTL and CTLK state formulas: syntax trees, parsing, printing and
reduction to negative normal form.

The concrete grammar is documented in docs/formula-grammar.md.  Two dialects
exist: ``arctl`` (action-restricted quantifiers ``E<α>``/``A<α>`` only) and
``ctlk`` (plain CTL quantifiers plus the knowledge operator ``K<agent>``).
CTLK trees use ``alpha=None`` on quantifiers until the epistemic reduction
replaces them with RUN-restricted quantifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FormulaSyntaxError, UnknownOperatorError, UnsupportedOperatorError


# ---------------------------------------------------------------------------
# Action formulas (boolean expressions over action atoms)
# ---------------------------------------------------------------------------

class ActionFormula:
    """Base class for boolean expressions over action atomic propositions."""

    def __str__(self):
        return pretty_print_action(self)


@dataclass(frozen=True)
class ActionTrue(ActionFormula):
    pass


@dataclass(frozen=True)
class ActionFalse(ActionFormula):
    pass


@dataclass(frozen=True)
class ActionAtom(ActionFormula):
    name: str


@dataclass(frozen=True)
class ActionNot(ActionFormula):
    operand: ActionFormula


@dataclass(frozen=True)
class ActionAnd(ActionFormula):
    left: ActionFormula
    right: ActionFormula


@dataclass(frozen=True)
class ActionOr(ActionFormula):
    left: ActionFormula
    right: ActionFormula


# ---------------------------------------------------------------------------
# Path and state formulas
# ---------------------------------------------------------------------------

class PathFormula:
    """Base class for path formulas (operands of a path quantifier)."""


class StateFormula:
    """Base class for ARCTL/CTLK state formulas."""

    def __str__(self):
        return pretty_print(self)


@dataclass(frozen=True)
class Next(PathFormula):
    operand: StateFormula


@dataclass(frozen=True)
class Eventually(PathFormula):
    operand: StateFormula


@dataclass(frozen=True)
class Globally(PathFormula):
    operand: StateFormula


@dataclass(frozen=True)
class Until(PathFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class WeakUntil(PathFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class TrueFormula(StateFormula):
    pass


@dataclass(frozen=True)
class FalseFormula(StateFormula):
    pass


@dataclass(frozen=True)
class Atom(StateFormula):
    name: str


@dataclass(frozen=True)
class Not(StateFormula):
    operand: StateFormula


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Or(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Implies(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Iff(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Exists(StateFormula):
    """E<alpha> path quantifier.  alpha is None for pre-reduction CTLK trees."""

    alpha: ActionFormula | None
    path: PathFormula


@dataclass(frozen=True)
class ForAll(StateFormula):
    """A<alpha> path quantifier.  alpha is None for pre-reduction CTLK trees."""

    alpha: ActionFormula | None
    path: PathFormula


@dataclass(frozen=True)
class Knows(StateFormula):
    """CTLK knowledge operator K<agent>."""

    agent: str
    operand: StateFormula


TRUE = TrueFormula()
FALSE = FalseFormula()


def is_literal(f):
    """True for atoms and negated atoms (the only NNF uses of negation)."""
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.operand, Atom))


# ---------------------------------------------------------------------------
# Negative normal form
# ---------------------------------------------------------------------------

def to_nnf(f: StateFormula) -> StateFormula:
    """Reduce an ARCTL state formula to negative normal form.

    The result only uses literals, conjunction, disjunction, E<a>X, E<a>G,
    E<a>U and opaque A<a>π leaves (whose operands are normalized but whose
    path operator is kept).  F is rewritten to U with a true left operand and
    W to (U ∨ G) under E quantifiers.
    """
    if isinstance(f, (TrueFormula, FalseFormula, Atom)):
        return f
    if isinstance(f, Not):
        return _nnf_negated(f.operand)
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Implies):
        return Or(_nnf_negated(f.left), to_nnf(f.right))
    if isinstance(f, Iff):
        return Or(And(to_nnf(f.left), to_nnf(f.right)),
                  And(_nnf_negated(f.left), _nnf_negated(f.right)))
    if isinstance(f, Exists):
        _require_arctl(f)
        p = f.path
        if isinstance(p, Next):
            return Exists(f.alpha, Next(to_nnf(p.operand)))
        if isinstance(p, Globally):
            return Exists(f.alpha, Globally(to_nnf(p.operand)))
        if isinstance(p, Eventually):
            return Exists(f.alpha, Until(TRUE, to_nnf(p.operand)))
        if isinstance(p, Until):
            return Exists(f.alpha, Until(to_nnf(p.left), to_nnf(p.right)))
        if isinstance(p, WeakUntil):
            left, right = to_nnf(p.left), to_nnf(p.right)
            return Or(Exists(f.alpha, Until(left, right)),
                      Exists(f.alpha, Globally(left)))
    if isinstance(f, ForAll):
        _require_arctl(f)
        p = f.path
        if isinstance(p, (Next, Eventually, Globally)):
            return ForAll(f.alpha, type(p)(to_nnf(p.operand)))
        return ForAll(f.alpha, type(p)(to_nnf(p.left), to_nnf(p.right)))
    if isinstance(f, Knows):
        raise UnsupportedOperatorError(
            "knowledge operator is not an ARCTL construct; apply the CTLK reduction first")
    raise TypeError(f"not a state formula: {f!r}")


def _nnf_negated(f: StateFormula) -> StateFormula:
    """Negative normal form of ¬f."""
    if isinstance(f, TrueFormula):
        return FALSE
    if isinstance(f, FalseFormula):
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.operand)
    if isinstance(f, And):
        return Or(_nnf_negated(f.left), _nnf_negated(f.right))
    if isinstance(f, Or):
        return And(_nnf_negated(f.left), _nnf_negated(f.right))
    if isinstance(f, Implies):
        return And(to_nnf(f.left), _nnf_negated(f.right))
    if isinstance(f, Iff):
        return Or(And(to_nnf(f.left), _nnf_negated(f.right)),
                  And(_nnf_negated(f.left), to_nnf(f.right)))
    if isinstance(f, Exists):
        _require_arctl(f)
        p = f.path
        if isinstance(p, Next):
            return ForAll(f.alpha, Next(_nnf_negated(p.operand)))
        if isinstance(p, Globally):
            return ForAll(f.alpha, Eventually(_nnf_negated(p.operand)))
        if isinstance(p, Eventually):
            return ForAll(f.alpha, Globally(_nnf_negated(p.operand)))
        # ¬(φ U ψ) = ¬ψ W (¬φ ∧ ¬ψ)  and  ¬(φ W ψ) = ¬ψ U (¬φ ∧ ¬ψ)
        nl, nr = _nnf_negated(p.left), _nnf_negated(p.right)
        if isinstance(p, Until):
            return ForAll(f.alpha, WeakUntil(nr, And(nl, nr)))
        return ForAll(f.alpha, Until(nr, And(nl, nr)))
    if isinstance(f, ForAll):
        _require_arctl(f)
        p = f.path
        if isinstance(p, Next):
            return Exists(f.alpha, Next(_nnf_negated(p.operand)))
        if isinstance(p, Globally):
            return Exists(f.alpha, Until(TRUE, _nnf_negated(p.operand)))
        if isinstance(p, Eventually):
            return Exists(f.alpha, Globally(_nnf_negated(p.operand)))
        nl, nr = _nnf_negated(p.left), _nnf_negated(p.right)
        if isinstance(p, Until):
            return Or(Exists(f.alpha, Until(nr, And(nl, nr))),
                      Exists(f.alpha, Globally(nr)))
        return Exists(f.alpha, Until(nr, And(nl, nr)))
    if isinstance(f, Knows):
        raise UnsupportedOperatorError(
            "knowledge operator is not an ARCTL construct; apply the CTLK reduction first")
    raise TypeError(f"not a state formula: {f!r}")


def _require_arctl(f):
    if f.alpha is None:
        raise UnsupportedOperatorError(
            "unrestricted (CTLK) quantifier; apply the CTLK reduction first")


def negate_nnf(f: StateFormula) -> StateFormula:
    """Negative normal form of the negation of f."""
    return _nnf_negated(f)


def is_nnf(f: StateFormula) -> bool:
    """Check the NNF invariant: negation only on atoms, no →/↔, and the only
    temporal constructs are E<a>X, E<a>G, E<a>U and A<a>π."""
    if isinstance(f, (TrueFormula, FalseFormula, Atom)):
        return True
    if isinstance(f, Not):
        return isinstance(f.operand, Atom)
    if isinstance(f, (And, Or)):
        return is_nnf(f.left) and is_nnf(f.right)
    if isinstance(f, Exists):
        if f.alpha is None or isinstance(f.path, (Eventually, WeakUntil)):
            return False
        return all(is_nnf(g) for g in _path_operands(f.path))
    if isinstance(f, ForAll):
        return f.alpha is not None and all(is_nnf(g) for g in _path_operands(f.path))
    return False


def _path_operands(p: PathFormula):
    if isinstance(p, (Next, Eventually, Globally)):
        return (p.operand,)
    return (p.left, p.right)


def depth(f: StateFormula) -> int:
    """Maximum nesting of temporal (and epistemic) quantifiers in f."""
    if isinstance(f, (TrueFormula, FalseFormula, Atom)):
        return 0
    if isinstance(f, Not):
        return depth(f.operand)
    if isinstance(f, (And, Or, Implies, Iff)):
        return max(depth(f.left), depth(f.right))
    if isinstance(f, (Exists, ForAll)):
        return 1 + max(depth(g) for g in _path_operands(f.path))
    if isinstance(f, Knows):
        return 1 + depth(f.operand)
    raise TypeError(f"not a state formula: {f!r}")


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

# Precedence levels; higher binds tighter.  Unary constructs sit at level 5,
# atoms and bracketed forms at 6.
_LEVELS = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _level(f) -> int:
    return _LEVELS.get(type(f), 5 if isinstance(f, (Not, Exists, ForAll, Knows)) else 6)


def pretty_print(f: StateFormula) -> str:
    """Render f in the concrete syntax; parse_formula round-trips the result."""
    if isinstance(f, TrueFormula):
        return "TRUE"
    if isinstance(f, FalseFormula):
        return "FALSE"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.operand, 5)
    if isinstance(f, And):
        return f"{_wrap(f.left, 4)} & {_wrap(f.right, 5)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, 3)} | {_wrap(f.right, 4)}"
    if isinstance(f, Implies):
        # right-associative
        return f"{_wrap(f.left, 3)} -> {_wrap(f.right, 2)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left, 1)} <-> {_wrap(f.right, 2)}"
    if isinstance(f, (Exists, ForAll)):
        q = "E" if isinstance(f, Exists) else "A"
        restrict = "" if f.alpha is None else f"<{pretty_print_action(f.alpha)}>"
        p = f.path
        if isinstance(p, Next):
            return f"{q}{restrict}X {_wrap(p.operand, 5)}"
        if isinstance(p, Eventually):
            return f"{q}{restrict}F {_wrap(p.operand, 5)}"
        if isinstance(p, Globally):
            return f"{q}{restrict}G {_wrap(p.operand, 5)}"
        op = "U" if isinstance(p, Until) else "W"
        return f"{q}{restrict}[{pretty_print(p.left)} {op} {pretty_print(p.right)}]"
    if isinstance(f, Knows):
        return f"K<{f.agent}> {_wrap(f.operand, 5)}"
    raise TypeError(f"not a state formula: {f!r}")


def _wrap(f, minimum):
    text = pretty_print(f)
    return f"({text})" if _level(f) < minimum else text


_ACTION_LEVELS = {ActionOr: 1, ActionAnd: 2}


def pretty_print_action(a: ActionFormula) -> str:
    if isinstance(a, ActionTrue):
        return "TRUE"
    if isinstance(a, ActionFalse):
        return "FALSE"
    if isinstance(a, ActionAtom):
        return a.name
    if isinstance(a, ActionNot):
        return "!" + _wrap_action(a.operand, 3)
    if isinstance(a, ActionAnd):
        return f"{_wrap_action(a.left, 2)} & {_wrap_action(a.right, 3)}"
    if isinstance(a, ActionOr):
        return f"{_wrap_action(a.left, 1)} | {_wrap_action(a.right, 2)}"
    raise TypeError(f"not an action formula: {a!r}")


def _wrap_action(a, minimum):
    text = pretty_print_action(a)
    level = _ACTION_LEVELS.get(type(a), 3)
    return f"({text})" if level < minimum else text


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_KEYWORDS = frozenset({
    "TRUE", "FALSE", "E", "A", "X", "F", "G", "U", "W", "K",
    "EX", "EF", "EG", "AX", "AF", "AG", "EK", "DK", "CK",
})
_CTLK_ONLY = frozenset({"EX", "EF", "EG", "AX", "AF", "AG", "K"})
_GROUP_KNOWLEDGE = frozenset({"EK", "DK", "CK"})
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # "kw", "ident", "sym", "eof"
    value: str
    line: int
    col: int


def _tokenize(text):
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("<->", i):
            tokens.append(_Token("sym", "<->", line, col))
            i += 3
            col += 3
            continue
        if text.startswith("->", i):
            tokens.append(_Token("sym", "->", line, col))
            i += 2
            col += 2
            continue
        if c in "()[]<>!&|":
            tokens.append(_Token("sym", c, line, col))
            i += 1
            col += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            kind = "kw" if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, line, col))
            i = m.end()
            col += len(word)
            continue
        raise FormulaSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text, dialect):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.dialect = dialect

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(message, tok.line, tok.col)

    def expect_sym(self, sym):
        tok = self.peek()
        if tok.kind != "sym" or tok.value != sym:
            found = "end of input" if tok.kind == "eof" else repr(tok.value)
            self.error(f"expected {sym!r}, found {found}", tok)
        return self.advance()

    def at_sym(self, sym):
        tok = self.peek()
        return tok.kind == "sym" and tok.value == sym

    # grammar: iff < implies < or < and < unary
    def parse_iff(self):
        left = self.parse_implies()
        while self.at_sym("<->"):
            self.advance()
            left = Iff(left, self.parse_implies())
        return left

    def parse_implies(self):
        left = self.parse_or()
        if self.at_sym("->"):
            self.advance()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.at_sym("|"):
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_unary()
        while self.at_sym("&"):
            self.advance()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "sym":
            if tok.value == "!":
                self.advance()
                return Not(self.parse_unary())
            if tok.value == "(":
                self.advance()
                inner = self.parse_iff()
                self.expect_sym(")")
                return inner
            self.error(f"unexpected {tok.value!r}", tok)
        if tok.kind == "eof":
            self.error("unexpected end of input", tok)
        if tok.kind == "ident":
            self.advance()
            return Atom(tok.value)
        # keyword
        if tok.value == "TRUE":
            self.advance()
            return TRUE
        if tok.value == "FALSE":
            self.advance()
            return FALSE
        if tok.value in _GROUP_KNOWLEDGE:
            raise UnsupportedOperatorError(
                f"{tok.line}:{tok.col}: group knowledge operator {tok.value!r} is not supported")
        if tok.value in _CTLK_ONLY:
            if self.dialect != "ctlk":
                raise UnknownOperatorError(
                    f"{tok.line}:{tok.col}: operator {tok.value!r} requires the ctlk dialect")
            return self.parse_ctlk_op(self.advance())
        if tok.value in ("E", "A"):
            return self.parse_quantifier(self.advance())
        self.error(f"unexpected keyword {tok.value!r}", tok)

    def parse_ctlk_op(self, tok):
        if tok.value == "K":
            self.expect_sym("<")
            agent = self.peek()
            if agent.kind not in ("ident", "kw"):
                self.error("expected an agent name", agent)
            self.advance()
            self.expect_sym(">")
            return Knows(agent.value, self.parse_unary())
        ctor = Exists if tok.value[0] == "E" else ForAll
        path = {"X": Next, "F": Eventually, "G": Globally}[tok.value[1]]
        return ctor(None, path(self.parse_unary()))

    def parse_quantifier(self, tok):
        ctor = Exists if tok.value == "E" else ForAll
        if self.at_sym("<"):
            if self.dialect == "ctlk":
                raise UnknownOperatorError(
                    f"{tok.line}:{tok.col}: action-restricted quantifier "
                    f"{tok.value}<...> requires the arctl dialect")
            self.advance()
            alpha = self.parse_action_or()
            self.expect_sym(">")
            return ctor(alpha, self.parse_path_tail())
        if self.at_sym("["):
            if self.dialect != "ctlk":
                raise UnknownOperatorError(
                    f"{tok.line}:{tok.col}: unrestricted quantifier "
                    f"{tok.value}[...] requires the ctlk dialect")
            return ctor(None, self.parse_bracketed_path())
        self.error(f"expected '<' or '[' after {tok.value!r}")

    def parse_path_tail(self):
        tok = self.peek()
        if tok.kind == "kw" and tok.value in ("X", "F", "G"):
            self.advance()
            path = {"X": Next, "F": Eventually, "G": Globally}[tok.value]
            return path(self.parse_unary())
        if self.at_sym("["):
            return self.parse_bracketed_path()
        self.error("expected a path operator (X, F, G or [ ... U/W ... ])", tok)

    def parse_bracketed_path(self):
        self.expect_sym("[")
        left = self.parse_iff()
        tok = self.peek()
        if tok.kind != "kw" or tok.value not in ("U", "W"):
            self.error("expected 'U' or 'W'", tok)
        self.advance()
        right = self.parse_iff()
        self.expect_sym("]")
        return Until(left, right) if tok.value == "U" else WeakUntil(left, right)

    # action expressions: ! > & > |
    def parse_action_or(self):
        left = self.parse_action_and()
        while self.at_sym("|"):
            self.advance()
            left = ActionOr(left, self.parse_action_and())
        return left

    def parse_action_and(self):
        left = self.parse_action_unary()
        while self.at_sym("&"):
            self.advance()
            left = ActionAnd(left, self.parse_action_unary())
        return left

    def parse_action_unary(self):
        tok = self.peek()
        if tok.kind == "sym":
            if tok.value == "!":
                self.advance()
                return ActionNot(self.parse_action_unary())
            if tok.value == "(":
                self.advance()
                inner = self.parse_action_or()
                self.expect_sym(")")
                return inner
            self.error(f"unexpected {tok.value!r} in action expression", tok)
        if tok.kind == "ident":
            self.advance()
            return ActionAtom(tok.value)
        if tok.kind == "kw" and tok.value == "TRUE":
            self.advance()
            return ActionTrue()
        if tok.kind == "kw" and tok.value == "FALSE":
            self.advance()
            return ActionFalse()
        self.error("expected an action atom in action expression", tok)


def parse_formula(text: str, dialect: str = "arctl") -> StateFormula:
    """Parse a state formula in the given dialect ("arctl" or "ctlk")."""
    if dialect not in ("arctl", "ctlk"):
        raise ValueError(f"unknown dialect {dialect!r}")
    parser = _Parser(text, dialect)
    result = parser.parse_iff()
    trailing = parser.peek()
    if trailing.kind != "eof":
        parser.error(f"unexpected trailing input {trailing.value!r}", trailing)
    return result
