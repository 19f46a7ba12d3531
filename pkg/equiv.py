"""Variables with equivalent logical influence: detection, reduction, extension.

A formula is reduced by keeping two representatives of every equivalence
class. Weights and trigger expressions computed on the reduced formula are
then carried back to the original one.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from errors import ModeMismatch, NotAReducedTarget, UnsupportedExtension
from logs import get_logger
from ltl import (
    Formula,
    Truth3,
    atoms,
    expand_step,
    rename,
    rename_many,
    render,
    simplify,
    step_atoms,
    substitute,
    substitute_all,
)
from synth import Literal, SumOfProducts, Term, minimize
from table import CountMode, Table, TableMode, Weight, all_weights, build_table

logger = get_logger("progmon.equiv")


@dataclass(frozen=True)
class EquivalencePartition:
    classes: tuple[tuple[str, ...], ...]
    singletons: tuple[str, ...]

    def class_of(self, name: str) -> tuple[str, ...] | None:
        for members in self.classes:
            if name in members:
                return members
        return None


@dataclass(frozen=True)
class ReductionMap:
    original: Formula
    reduced: Formula
    partition: EquivalencePartition
    representatives: tuple[tuple[str, str], ...]
    dropped: tuple[tuple[str, ...], ...]

    def representative(self, name: str) -> str:
        """Atom that stands for ``name`` in the reduced formula."""
        for (first, _), gone in zip(self.representatives, self.dropped):
            if name in gone:
                return first
        return name


def equivalent(f: Formula, a: str, b: str) -> bool:
    """Substituting ``a`` or ``b`` gives the same formula up to renaming ``a`` to ``b``."""
    for value in (Truth3.TOP, Truth3.BOT):
        if substitute(f, a, value) != simplify(rename(substitute(f, b, value), a, b)):
            return False
    return True


def equivalent_partition(f: Formula) -> EquivalencePartition:
    names = sorted(atoms(f))
    matched: set[str] = set()
    classes = []
    for i, first in enumerate(names):
        if first in matched:
            continue
        members = [first]
        for other in names[i + 1:]:
            if other not in matched and equivalent(f, first, other):
                members.append(other)
                matched.add(other)
        if len(members) > 1:
            matched.add(first)
            classes.append(tuple(members))
    singletons = tuple(name for name in names if name not in matched)
    logger.debug(f"Partition of {render(f)}: classes={classes} singletons={list(singletons)}")
    return EquivalencePartition(classes=tuple(classes), singletons=singletons)


def reduce(f: Formula, p: EquivalencePartition | None = None) -> ReductionMap:
    """Keep the two smallest atoms of each class and fold the rest into the first."""
    p = equivalent_partition(f) if p is None else p
    mapping = {}
    representatives, dropped = [], []
    for members in p.classes:
        first, second, *rest = sorted(members)
        representatives.append((first, second))
        dropped.append(tuple(rest))
        mapping.update({name: first for name in rest})
    return ReductionMap(
        original=f,
        reduced=simplify(rename_many(f, mapping)),
        partition=p,
        representatives=tuple(representatives),
        dropped=tuple(dropped),
    )


def reduction_size(rm: ReductionMap) -> int:
    """n - sum(|E_i|) + 2k."""
    n = len(atoms(rm.original))
    return n - sum(len(c) for c in rm.partition.classes) + 2 * len(rm.partition.classes)


# Weights

def all_equivalent_weight(w: Fraction, n: int) -> Fraction:
    """(N/D)^(n-1) for a representative weight N/D in lowest terms."""
    w = Fraction(w)
    return Fraction(w.numerator ** (n - 1), w.denominator ** (n - 1))


def extend_weights(rm: ReductionMap, wR: Mapping[str, Weight], cm: CountMode) -> dict[str, Weight]:
    """Carry weights of the reduced formula back to every original variable.

    Weight 1 stays 1. When one class holds every variable the closed form
    (N/D)^(n-1) is exact. Class members whose reduced weight is N/3 get the
    same closed form, flagged approximate; all other variables inherit their
    representative's weight, also flagged approximate.

    Raises:
        ModeMismatch: when ``wR`` was counted in another mode.
    """
    cm = CountMode(cm)
    for w in wR.values():
        if w.mode is not cm:
            raise ModeMismatch(cm.value, w.mode.value)
    names = sorted(atoms(rm.original))
    n = len(names)
    denominator = 3 ** (n - 1)
    classes = rm.partition.classes
    single_class = len(classes) == 1 and not rm.partition.singletons
    extended = {}
    for name in names:
        value = wR[rm.representative(name)].value
        if value == 1:
            extended[name] = Weight(denominator, denominator, cm)
        elif single_class or (rm.partition.class_of(name) and value.denominator == 3):
            closed = all_equivalent_weight(value, n)
            extended[name] = Weight(closed.numerator, closed.denominator, cm, approximate=not single_class)
        else:
            scaled = value * denominator
            extended[name] = Weight(int(scaled), denominator, cm, approximate=bool(classes))
    return extended


def exact_weights(rm: ReductionMap, cm: CountMode, mode: TableMode = TableMode.PROGRESSION) -> dict[str, Weight]:
    """Weights from the full table of the original formula (within the cap)."""
    return all_weights(build_table(rm.original, mode), cm)


@dataclass(frozen=True)
class WeightCheck:
    expected: Fraction
    observed: dict[str, Fraction]

    @property
    def agrees(self) -> bool:
        return all(v == self.expected for v in self.observed.values())


def check_all_equivalent_weight(f: Formula, cm: CountMode, mode: TableMode = TableMode.PROGRESSION) -> WeightCheck:
    """Compare the closed form with the full table for an all-equivalent formula."""
    rm = reduce(f)
    if len(rm.partition.classes) != 1 or rm.partition.singletons:
        raise ValueError(f"not every variable of {render(f)} is in one class")
    first = rm.representatives[0][0]
    reduced_weight = all_weights(build_table(rm.reduced, mode), cm)[first].value
    expected = all_equivalent_weight(reduced_weight, len(atoms(f)))
    observed = {name: w.value for name, w in all_weights(build_table(f, mode), cm).items()}
    check = WeightCheck(expected=expected, observed=observed)
    if not check.agrees:
        logger.warning(f"Closed-form weight {expected} disagrees with the table of {render(f)}: {observed}")
    return check


# Trigger expressions

def _extend_terms(terms: set[Term], first: str, second: str, gone: tuple[str, ...]) -> set[Term]:
    extended = set()
    for term in terms:
        sign_first, sign_second = term.sign(first), term.sign(second)
        if sign_first is not None and sign_second is not None:
            extended.add(Term(term.literals | {Literal(d, sign_first) for d in gone}))
            continue
        extended.add(term)
        kept = first if sign_first is not None else second if sign_second is not None else None
        if kept is None:
            continue
        sign = term.sign(kept)
        rest = term.literals - {Literal(kept, sign)}
        for d in gone:
            if term.sign(d) is None:
                extended.add(Term(rest | {Literal(d, sign)}))
    return extended


def extended_target(rm: ReductionMap, target: Formula, table: Table) -> Formula:
    """Result of the original formula on a reduced row that yields ``target``.

    Dropped atoms take the value of their class's first representative.
    """
    for row in table.rows:
        if row.result == target:
            values = table.assignment(row)
            for (first, _), gone in zip(rm.representatives, rm.dropped):
                values.update({d: values[first] for d in gone})
            if table.mode is TableMode.PROGRESSION:
                return substitute_all(expand_step(rm.original), values, residues_opaque=True)
            return substitute_all(rm.original, values)
    raise NotAReducedTarget(render(target))


def extend_boolean(
    B: SumOfProducts,
    target: Formula,
    rm: ReductionMap,
    table: Table | None = None,
    mode: TableMode = TableMode.PROGRESSION,
) -> tuple[SumOfProducts, Formula]:
    """Extend a reduced-table trigger expression to the original formula.

    Per class with representatives r1, r2 and dropped atoms D: a term with
    exactly one representative gets one copy per d in D with that
    representative replaced by d; a term with both gets all of D added with
    r1's sign. The target is carried over by recomputing one of its rows on
    the original formula, dropped atoms taking r1's value.

    Raises:
        NotAReducedTarget: ``target`` is not a result of the reduced table.
        UnsupportedExtension: outside its X-residues ``target`` keeps exactly one
            representative of a class.
    """
    table = build_table(rm.reduced, mode) if table is None else table
    if table.formula != rm.reduced:
        raise ValueError("table was not built from the reduced formula")
    in_target = step_atoms(target)
    for first, second in rm.representatives:
        present = in_target & {first, second}
        if len(present) == 1:
            raise UnsupportedExtension(render(target), f"keeps only {sorted(present)[0]} of its class")
    new_target = extended_target(rm, target, table)
    terms = set(B.terms)
    for (first, second), gone in zip(rm.representatives, rm.dropped):
        if gone:
            terms = _extend_terms(terms, first, second, gone)
    return minimize(SumOfProducts(new_target, frozenset(terms))), new_target
