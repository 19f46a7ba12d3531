"""Trigger expressions: sum-of-products synthesized from table row groups."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Mapping

from errors import TargetNotInTable
from logs import get_logger
from ltl import Assignment, Formula, Truth3, render, step_atoms
from table import Table

logger = get_logger("progmon.synth")

# Tables up to this many variables are re-checked after synthesis
VERIFY_LIMIT = 6


@dataclass(frozen=True, order=True)
class Literal:
    atom: str
    positive: bool = True

    def satisfied_by(self, value: Truth3) -> bool:
        return value is (Truth3.TOP if self.positive else Truth3.BOT)

    def negated(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self):
        return self.atom if self.positive else f"!{self.atom}"


@dataclass(frozen=True)
class Term:
    literals: frozenset[Literal]

    def __post_init__(self):
        names = [lit.atom for lit in self.literals]
        if len(names) != len(set(names)):
            raise ValueError(f"term uses an atom with both signs: {self}")

    @classmethod
    def of(cls, *literals: Literal) -> "Term":
        return cls(frozenset(literals))

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset(lit.atom for lit in self.literals)

    def sign(self, atom: str) -> bool | None:
        for lit in self.literals:
            if lit.atom == atom:
                return lit.positive
        return None

    def satisfied_by(self, values: Assignment) -> bool:
        return all(lit.satisfied_by(values.get(lit.atom, Truth3.UNKNOWN)) for lit in self.literals)

    def __len__(self):
        return len(self.literals)

    def __str__(self):
        return " & ".join(str(lit) for lit in sorted(self.literals)) or "true"


def term_key(term: Term) -> tuple[int, str]:
    return len(term), str(term)


@dataclass(frozen=True)
class SumOfProducts:
    target: Formula
    terms: frozenset[Term]

    def ordered_terms(self) -> list[Term]:
        return sorted(self.terms, key=term_key)

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset().union(*(t.atoms for t in self.terms))

    def __str__(self):
        return " | ".join(str(t) for t in self.ordered_terms()) or "false"


def row_term(t: Table, config: tuple[Truth3, ...]) -> Term:
    return Term(frozenset(Literal(name, value is Truth3.TOP) for name, value in zip(t.vars, config) if value.definite))


def raw_terms(t: Table, target: Formula) -> list[Term]:
    """One term per row whose result is ``target``: its definite entries."""
    return [row_term(t, row.config) for row in t.rows if row.result == target]


def _absorb(terms: set[Term]) -> set[Term]:
    kept: list[Term] = []
    for term in sorted(terms, key=len):
        if not any(other.literals <= term.literals for other in kept):
            kept.append(term)
    return set(kept)


def _merge_complements(terms: set[Term]) -> set[Term]:
    merged = set()
    for term in terms:
        for lit in term.literals:
            rest = term.literals - {lit}
            if Term(rest | {lit.negated()}) in terms:
                merged.add(Term(rest))
    return merged


def minimize(s: SumOfProducts) -> SumOfProducts:
    """Apply xP + !xP -> P and P + PQ -> P until nothing changes."""
    terms = _absorb(set(s.terms))
    while True:
        merged = _merge_complements(terms) - terms
        if not merged:
            return SumOfProducts(s.target, frozenset(terms))
        terms = _absorb(terms | merged)


def synthesize(t: Table, target: Formula, verify: bool | None = None) -> SumOfProducts:
    """Minimized trigger expression for the rows of ``t`` that simplify to ``target``.

    Raises:
        TargetNotInTable: when no row has ``target`` as its result.
    """
    terms = raw_terms(t, target)
    if not terms:
        raise TargetNotInTable(render(target))
    sop = minimize(SumOfProducts(target, frozenset(terms)))
    if verify if verify is not None else len(t.vars) <= VERIFY_LIMIT:
        _verify(t, sop)
    return sop


def _verify(t: Table, sop: SumOfProducts) -> None:
    # Checked on rows where exactly the target's step atoms are Unknown.
    open_atoms = step_atoms(sop.target)
    for row in t.rows:
        values = t.assignment(row)
        if any((name in open_atoms) == value.definite for name, value in values.items()):
            continue
        if evaluate_sop(sop, values) != (row.result == sop.target):
            raise AssertionError(f"trigger for {render(sop.target)} disagrees with row {values}")


def evaluate_sop(s: SumOfProducts, values: Mapping[str, Truth3 | bool]) -> bool:
    normalized = {
        name: (Truth3.of(value) if isinstance(value, bool) else value) for name, value in values.items()
    }
    return any(term.satisfied_by(normalized) for term in s.terms)


def eval_terms(s: SumOfProducts, k: Assignment) -> list[Term]:
    """Terms of ``s`` whose literals all hold under the definite values of ``k``."""
    return [term for term in s.ordered_terms() if term.satisfied_by(k)]


def minimal_set(
    all_sops: Iterable[SumOfProducts],
    k: Assignment,
    current: Formula,
    local: Collection[str] | None = None,
) -> frozenset[str]:
    """Smallest atom set, taken from a satisfied trigger term, worth propagating.

    Only expressions whose target is ``current`` are consulted. When none of
    their terms hold, every definite value the sender observed locally is
    returned (all definite values of ``k`` when ``local`` is not given).
    """
    satisfied = [term for s in all_sops if s.target == current for term in eval_terms(s, k)]
    if satisfied:
        return min(satisfied, key=term_key).atoms
    fallback = frozenset(name for name, v in k.items() if v.definite and (local is None or name in local))
    logger.debug(f"No trigger term holds for {render(current)}; sending {sorted(fallback)}")
    return fallback
