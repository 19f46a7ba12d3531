"""LTL formulas: syntax tree, parser, printer, simplification and progression.

Formulas are immutable and compared structurally, so they can be used as
dictionary keys when rows of a table are grouped by their simplified result.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError
from pydantic import BaseModel, ConfigDict, Field

from errors import FormulaSyntaxError

ATOM_NAME = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*\Z")
# Words the grammar reads as operators or constants, never as atoms
RESERVED = frozenset({"true", "false", "U"})
OPERATOR_RUN = re.compile(r"[XFG]+\Z")


class Truth3(str, Enum):
    """Three-valued truth: definite true, definite false, or not yet observed."""

    TOP = "T"
    BOT = "F"
    UNKNOWN = "?"

    @property
    def definite(self) -> bool:
        return self is not Truth3.UNKNOWN

    @classmethod
    def of(cls, value: bool) -> "Truth3":
        return cls.TOP if value else cls.BOT


# Row enumeration order used by every table
B3_ORDER = (Truth3.UNKNOWN, Truth3.BOT, Truth3.TOP)

Assignment = Mapping[str, Truth3]


class Formula:
    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class TrueBool(Formula):
    pass


@dataclass(frozen=True)
class FalseBool(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not ATOM_NAME.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")
        if is_reserved(self.name):
            raise ValueError(f"reserved word {self.name!r} cannot be an atom")


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Globally(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


TRUE = TrueBool()
FALSE = FalseBool()

UNARY = (Not, Next, Eventually, Globally)
BINARY = (And, Or, Until)
TEMPORAL_SYMBOLS = {Next: "X", Eventually: "F", Globally: "G"}
TEMPORAL_TYPES = {symbol: kind for kind, symbol in TEMPORAL_SYMBOLS.items()}


def is_reserved(name: str) -> bool:
    return name in RESERVED or bool(OPERATOR_RUN.match(name))


def const(value: bool) -> Formula:
    return TRUE if value else FALSE


# Parsing

GRAMMAR = r"""
?start: implication

?implication: until
            | until "->" implication        -> implies_op

?until: disj
      | disj UNTIL until                    -> until_op

?disj: conj
     | disj "|" conj                        -> or_op

?conj: unary
     | conj "&" unary                       -> and_op

?unary: primary
      | "!" unary                           -> not_op
      | TEMPORAL unary                      -> temporal_op

?primary: NAME                              -> atom_op
        | "(" implication ")"

TEMPORAL.2: /[XFG]+(?![A-Za-z0-9_])/
UNTIL.2: /U(?![A-Za-z0-9_])/
NAME: /[a-zA-Z_][a-zA-Z0-9_]*/

%import common.WS
%ignore WS
"""


@v_args(inline=True)
class _FormulaBuilder(Transformer):
    def atom_op(self, token):
        name = str(token)
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        if is_reserved(name):
            raise FormulaSyntaxError(f"reserved word {name!r} used as an atom", token.line, token.column)
        return Atom(name)

    def not_op(self, operand):
        return Not(operand)

    def temporal_op(self, symbols, operand):
        for symbol in reversed(str(symbols)):
            operand = TEMPORAL_TYPES[symbol](operand)
        return operand

    def and_op(self, left, right):
        return And(left, right)

    def or_op(self, left, right):
        return Or(left, right)

    def until_op(self, left, _token, right):
        return Until(left, right)

    def implies_op(self, left, right):
        return Or(Not(left), right)


_parser = Lark(GRAMMAR, parser="lalr")
_builder = _FormulaBuilder()


def _end_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def parse(text: str) -> Formula:
    """Parse formula text.

    Args:
        text: Formula in the grammar ``U`` < ``|`` < ``&`` < unary ``! X F G``,
            with ``->`` accepted as sugar for ``!p | q``.

    Returns:
        The syntax tree.

    Raises:
        FormulaSyntaxError: with the line and column of the offending input.
    """
    try:
        tree = _parser.parse(text)
    except UnexpectedCharacters as e:
        raise FormulaSyntaxError(f"unknown operator or character {text[e.pos_in_stream]!r}", e.line, e.column, text) from None
    except UnexpectedEOF:
        line, column = _end_position(text)
        raise FormulaSyntaxError("unexpected end of formula", line, column, text) from None
    except UnexpectedInput as e:
        token = getattr(e, "token", None)
        if token is None or token.type == "$END":
            line, column = _end_position(text)
            raise FormulaSyntaxError("unexpected end of formula", line, column, text) from None
        raise FormulaSyntaxError(f"unexpected token {str(token)!r}", e.line, e.column, text) from None
    try:
        return _builder.transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, FormulaSyntaxError):
            e.orig_exc.text = text
            raise e.orig_exc from None
        raise


# Rendering

def _precedence(f: Formula) -> int:
    if isinstance(f, Until):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    if isinstance(f, UNARY):
        return 4
    return 5


def _wrap(f: Formula, parens_below: int) -> str:
    text = render(f)
    return f"({text})" if _precedence(f) < parens_below else text


def render(f: Formula) -> str:
    """Canonical text with minimal parentheses; ``parse(render(f)) == f``."""
    if isinstance(f, TrueBool):
        return "true"
    if isinstance(f, FalseBool):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.operand, 4)
    if isinstance(f, (Next, Eventually, Globally)):
        symbols = ""
        while isinstance(f, (Next, Eventually, Globally)):
            symbols += TEMPORAL_SYMBOLS[type(f)]
            f = f.operand
        return f"{symbols} {_wrap(f, 4)}"
    if isinstance(f, And):
        return f"{_wrap(f.left, 3)} & {_wrap(f.right, 4)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, 2)} | {_wrap(f.right, 3)}"
    if isinstance(f, Until):
        return f"{_wrap(f.left, 2)} U {_wrap(f.right, 1)}"
    raise TypeError(f"not a formula: {f!r}")


# Structure queries

def atoms(f: Formula) -> frozenset[str]:
    """All atom names, including those inside X-residues."""
    return frozenset(_collect_atoms(f, skip_next=False))


def step_atoms(f: Formula) -> frozenset[str]:
    """Atoms that occur outside any X-residue (the step-t propositions)."""
    return frozenset(_collect_atoms(f, skip_next=True))


def _collect_atoms(f: Formula, skip_next: bool) -> Iterable[str]:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            yield g.name
        elif isinstance(g, BINARY):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, UNARY):
            if skip_next and isinstance(g, Next):
                continue
            stack.append(g.operand)


def size(f: Formula) -> int:
    """Number of syntax-tree nodes."""
    if isinstance(f, BINARY):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, UNARY):
        return 1 + size(f.operand)
    return 1


# Simplification

def _chain(kind: type, f: Formula) -> list[Formula]:
    operands, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, kind):
            stack.append(g.right)
            stack.append(g.left)
        else:
            operands.append(g)
    return operands


def _simplify_chain(kind: type, f: Formula) -> Formula:
    unit, zero = (TRUE, FALSE) if kind is And else (FALSE, TRUE)
    operands: set[Formula] = set()
    for child in _chain(kind, f):
        s = simplify(child)
        if s == zero:
            return zero
        if s != unit:
            operands.update(_chain(kind, s))
    if not operands:
        return unit
    ordered = sorted(operands, key=render)
    result = ordered[0]
    for operand in ordered[1:]:
        result = kind(result, operand)
    return result


def simplify(f: Formula) -> Formula:
    """Fold constants, remove double negation and duplicate chain operands.

    And/Or chains are flattened and their operands sorted by rendered text,
    so equal results are structurally equal. Temporal operators are kept;
    only their operands are simplified.
    """
    if isinstance(f, (TrueBool, FalseBool, Atom)):
        return f
    if isinstance(f, Not):
        inner = simplify(f.operand)
        if inner == TRUE:
            return FALSE
        if inner == FALSE:
            return TRUE
        if isinstance(inner, Not):
            return inner.operand
        return Not(inner)
    if isinstance(f, (And, Or)):
        return _simplify_chain(type(f), f)
    if isinstance(f, Until):
        return Until(simplify(f.left), simplify(f.right))
    return type(f)(simplify(f.operand))


# Substitution and renaming

def map_atoms(f: Formula, fn: Callable[[Atom], Formula], skip_next: bool = False) -> Formula:
    """Rebuild ``f`` with every atom replaced by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, (TrueBool, FalseBool)):
        return f
    if skip_next and isinstance(f, Next):
        return f
    if isinstance(f, BINARY):
        return type(f)(map_atoms(f.left, fn, skip_next), map_atoms(f.right, fn, skip_next))
    return type(f)(map_atoms(f.operand, fn, skip_next))


def substitute(f: Formula, atom: str, value: Truth3) -> Formula:
    """Replace ``atom`` by a constant everywhere and simplify."""
    if not value.definite:
        raise ValueError("only definite values are substituted")
    replacement = const(value is Truth3.TOP)
    return simplify(map_atoms(f, lambda a: replacement if a.name == atom else a))


def substitute_all(f: Formula, values: Assignment, residues_opaque: bool = False) -> Formula:
    """Substitute every definite value at once, then simplify.

    With ``residues_opaque`` the subformulas under X are left untouched.
    """
    constants = {name: const(v is Truth3.TOP) for name, v in values.items() if v.definite}
    if not constants:
        return simplify(f)
    return simplify(map_atoms(f, lambda a: constants.get(a.name, a), skip_next=residues_opaque))


def rename(f: Formula, source: str, target: str) -> Formula:
    """Replace atom ``source`` by ``target`` everywhere, without simplifying."""
    return map_atoms(f, lambda a: Atom(target) if a.name == source else a)


def rename_many(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename several atoms simultaneously."""
    return map_atoms(f, lambda a: Atom(mapping[a.name]) if a.name in mapping else a)


# Temporal expansion and progression

def expand_step(f: Formula) -> Formula:
    """Unfold F, G and U by one step; the X-wrapped copies are residues.

    F p -> p | X F p,  G p -> p & X G p,  p U q -> q | (p & X (p U q)).
    Existing X subformulas are residues already and are not descended into.
    """
    if isinstance(f, Eventually):
        return Or(expand_step(f.operand), Next(f))
    if isinstance(f, Globally):
        return And(expand_step(f.operand), Next(f))
    if isinstance(f, Until):
        return Or(expand_step(f.right), And(expand_step(f.left), Next(f)))
    if isinstance(f, (And, Or)):
        return type(f)(expand_step(f.left), expand_step(f.right))
    if isinstance(f, Not):
        return Not(expand_step(f.operand))
    return f


def strip_next(f: Formula) -> Formula:
    """Remove one X from every outermost residue."""
    if isinstance(f, Next):
        return f.operand
    if isinstance(f, (And, Or)):
        return type(f)(strip_next(f.left), strip_next(f.right))
    if isinstance(f, Not):
        return Not(strip_next(f.operand))
    return f


def step_formula(f: Formula, step: Assignment) -> Formula:
    """Expanded ``f`` with the step's definite values applied, residues opaque."""
    return substitute_all(expand_step(f), step, residues_opaque=True)


def progress(f: Formula, step: Assignment) -> Formula:
    """Obligation for the next step after observing ``step``.

    Atoms left Unknown stay symbolic.
    """
    return simplify(strip_next(step_formula(f, step)))


def verdict_of(f: Formula) -> Truth3:
    if f == TRUE:
        return Truth3.TOP
    if f == FALSE:
        return Truth3.BOT
    return Truth3.UNKNOWN


def definite_step(values: Mapping[str, bool]) -> dict[str, Truth3]:
    return {name: Truth3.of(bool(v)) for name, v in values.items()}


# Reference evaluators

def evaluate(f: Formula, values: Mapping[str, bool]) -> bool:
    """Boolean value of a propositional formula under a total assignment."""
    if isinstance(f, TrueBool):
        return True
    if isinstance(f, FalseBool):
        return False
    if isinstance(f, Atom):
        return bool(values[f.name])
    if isinstance(f, Not):
        return not evaluate(f.operand, values)
    if isinstance(f, And):
        return evaluate(f.left, values) and evaluate(f.right, values)
    if isinstance(f, Or):
        return evaluate(f.left, values) or evaluate(f.right, values)
    raise ValueError(f"temporal operator in propositional evaluation: {render(f)}")


def holds_on_lasso(f: Formula, prefix: Sequence[Mapping[str, bool]], loop: Sequence[Mapping[str, bool]]) -> bool:
    """Whether the infinite word ``prefix · loop^ω`` satisfies ``f`` at position 0."""
    if not loop:
        raise ValueError("lasso loop must be non-empty")
    word = list(prefix) + list(loop)
    positions = range(len(word))
    successor = [i + 1 for i in positions]
    successor[-1] = len(prefix)
    memo: dict[Formula, tuple[bool, ...]] = {}

    def until(left: tuple[bool, ...], right: tuple[bool, ...]) -> tuple[bool, ...]:
        holds = list(right)
        changed = True
        while changed:
            changed = False
            for i in positions:
                if not holds[i] and left[i] and holds[successor[i]]:
                    holds[i] = changed = True
        return tuple(holds)

    def sat(g: Formula) -> tuple[bool, ...]:
        if g in memo:
            return memo[g]
        if isinstance(g, TrueBool):
            result = tuple(True for _ in positions)
        elif isinstance(g, FalseBool):
            result = tuple(False for _ in positions)
        elif isinstance(g, Atom):
            result = tuple(bool(word[i][g.name]) for i in positions)
        elif isinstance(g, Not):
            result = tuple(not v for v in sat(g.operand))
        elif isinstance(g, And):
            result = tuple(x and y for x, y in zip(sat(g.left), sat(g.right)))
        elif isinstance(g, Or):
            result = tuple(x or y for x, y in zip(sat(g.left), sat(g.right)))
        elif isinstance(g, Next):
            inner = sat(g.operand)
            result = tuple(inner[successor[i]] for i in positions)
        elif isinstance(g, Eventually):
            result = until(sat(TRUE), sat(g.operand))
        elif isinstance(g, Globally):
            result = tuple(not v for v in until(sat(TRUE), sat(Not(g.operand))))
        else:
            result = until(sat(g.left), sat(g.right))
        memo[g] = result
        return result

    return sat(f)[0]


# Observations

class Event(BaseModel):
    """Definite observations of one process at one step."""

    model_config = ConfigDict(frozen=True)

    process: str = Field(..., min_length=1)
    props: dict[str, bool]


# One global step per position; each step is total over the global alphabet.
Trace = list[dict[str, bool]]
