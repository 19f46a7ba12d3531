"""Simplification / progression tables and influence weights."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Mapping

import pandas as pd

from config import TABLE_CACHE_SIZE, TABLE_VARIABLE_CAP, TRIGGER_SYNTH_CAP
from errors import UnknownVariable, VariableCapExceeded
from logs import get_logger
from ltl import B3_ORDER, Assignment, Formula, Truth3, atoms, expand_step, render, step_atoms, substitute_all

logger = get_logger("progmon.table")


class TableMode(str, Enum):
    PROPOSITIONAL = "prop"
    PROGRESSION = "prog"


class CountMode(str, Enum):
    """Where an occurrence of a variable counts towards its weight.

    STEP_ONLY ignores occurrences inside X-residues, FULL counts them too.
    """

    STEP_ONLY = "step"
    FULL = "full"


@dataclass(frozen=True)
class TableRow:
    config: tuple[Truth3, ...]
    result: Formula


@dataclass(frozen=True)
class Table:
    formula: Formula
    vars: tuple[str, ...]
    mode: TableMode
    rows: tuple[TableRow, ...]

    def index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise UnknownVariable(name) from None

    def assignment(self, row: TableRow) -> dict[str, Truth3]:
        return dict(zip(self.vars, row.config))

    def results(self) -> list[Formula]:
        """Distinct row results in row order."""
        return list(dict.fromkeys(row.result for row in self.rows))

    def row_for(self, config: Assignment) -> TableRow:
        """Row of ``config``; variables it leaves out are Unknown."""
        unknown = set(config) - set(self.vars)
        if unknown:
            raise UnknownVariable(sorted(unknown)[0])
        position = 0
        for name in self.vars:
            position = position * 3 + B3_ORDER.index(config.get(name, Truth3.UNKNOWN))
        return self.rows[position]

    def frame(self) -> pd.DataFrame:
        records = [
            {**{name: value.value for name, value in zip(self.vars, row.config)}, "result": render(row.result)}
            for row in self.rows
        ]
        return pd.DataFrame.from_records(records, columns=[*self.vars, "result"])


@dataclass(frozen=True)
class Weight:
    numerator: int
    denominator: int
    mode: CountMode
    approximate: bool = False

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self):
        return f"{self.value}{' (approx.)' if self.approximate else ''}"


def build_table(f: Formula, mode: TableMode = TableMode.PROPOSITIONAL, cap: int | None = None) -> Table:
    """Enumerate every B3 assignment of the variables of ``f``.

    Propositional rows simplify ``f`` under the row's definite values.
    Progression rows do the same on the one-step expansion of ``f`` and
    leave the X-residues untouched.
    Tables of at most ``TRIGGER_SYNTH_CAP`` variables are memoized.

    Raises:
        VariableCapExceeded: when ``f`` has more variables than ``cap``.
    """
    cap = TABLE_VARIABLE_CAP if cap is None else cap
    n = len(atoms(f))
    if n > cap:
        raise VariableCapExceeded(n, cap)
    mode = TableMode(mode)
    if n > TRIGGER_SYNTH_CAP:
        return _enumerate(f, mode)
    return _cached_table(f, mode)


def _enumerate(f: Formula, mode: TableMode) -> Table:
    names = tuple(sorted(atoms(f)))
    source = expand_step(f) if mode is TableMode.PROGRESSION else f
    opaque = mode is TableMode.PROGRESSION
    rows = tuple(
        TableRow(config, substitute_all(source, dict(zip(names, config)), residues_opaque=opaque))
        for config in product(B3_ORDER, repeat=len(names))
    )
    logger.debug(f"Built {mode.value} table for {render(f)}: {len(names)} variables, {len(rows)} rows")
    return Table(formula=f, vars=names, mode=mode, rows=rows)


_cached_table = lru_cache(maxsize=TABLE_CACHE_SIZE)(_enumerate)


def mentions(result: Formula, name: str, cm: CountMode) -> bool:
    found = step_atoms(result) if cm is CountMode.STEP_ONLY else atoms(result)
    return name in found


def influence_weight(t: Table, name: str, cm: CountMode = CountMode.STEP_ONLY) -> Weight:
    """Share of the rows with ``name`` Unknown whose result still mentions it."""
    i = t.index(name)
    cm = CountMode(cm)
    rows = [row for row in t.rows if row.config[i] is Truth3.UNKNOWN]
    count = sum(1 for row in rows if mentions(row.result, name, cm))
    return Weight(numerator=count, denominator=len(rows), mode=cm)


def all_weights(t: Table, cm: CountMode = CountMode.STEP_ONLY) -> dict[str, Weight]:
    return {name: influence_weight(t, name, cm) for name in t.vars}


def equivalent_configs(t: Table) -> dict[Formula, list[dict[str, Truth3]]]:
    """Rows grouped by their simplified result, in row order."""
    groups: dict[Formula, list[dict[str, Truth3]]] = {}
    for row in t.rows:
        groups.setdefault(row.result, []).append(t.assignment(row))
    return groups


def write_csv(t: Table, path) -> None:
    t.frame().to_csv(path, index=False)


def weights_frame(weights: Mapping[str, Weight]) -> pd.DataFrame:
    return pd.DataFrame.from_records(
        [
            {
                "variable": name,
                "weight": f"{w.value.numerator}/{w.value.denominator}",
                "value": float(w.value),
                "mode": w.mode.value,
                "approximate": w.approximate,
            }
            for name, w in weights.items()
        ],
        columns=["variable", "weight", "value", "mode", "approximate"],
    )
