"""Tests for simplification / progression tables and influence weights."""
from fractions import Fraction

import pytest


def _row(t, **values):
    from ltl import Truth3

    return t.row_for({name: Truth3(v) for name, v in values.items()})


# Results of 'a | (b & c)' in row order: a, then b, then c over ?, F, T
TABLE_ONE = [
    "a | b & c", "a", "a | b",
    "a", "a", "a",
    "a | c", "a", "true",
    "b & c", "false", "b",
    "false", "false", "false",
    "c", "false", "true",
    "true", "true", "true",
    "true", "true", "true",
    "true", "true", "true",
]


class TestBuildTable:
    """Tests for table enumeration."""

    def test_table_one_rows(self):
        """'a | (b & c)' gives the 27 rows of the propositional table."""
        from ltl import parse, render
        from table import build_table

        t = build_table(parse("a | (b & c)"), "prop")
        assert t.vars == ("a", "b", "c")
        assert [render(row.result) for row in t.rows] == TABLE_ONE
        assert ["".join(v.value for v in row.config) for row in t.rows][:4] == ["???", "??F", "??T", "?F?"]

    def test_row_order(self):
        """Rows enumerate ?, F, T with the last variable fastest."""
        from ltl import Truth3, parse
        from table import build_table

        t = build_table(parse("a & b"))
        configs = [row.config for row in t.rows]
        assert configs[0] == (Truth3.UNKNOWN, Truth3.UNKNOWN)
        assert configs[1] == (Truth3.UNKNOWN, Truth3.BOT)
        assert configs[3] == (Truth3.BOT, Truth3.UNKNOWN)
        assert configs[-1] == (Truth3.TOP, Truth3.TOP)

    @pytest.mark.parametrize("text", ["a", "a & b", "a | (b & c)", "F a | G (b & c & d)"])
    def test_rows_are_a_bijection(self, text):
        """3^n distinct configurations, each exactly once."""
        from ltl import atoms, parse
        from table import build_table

        f = parse(text)
        t = build_table(f, "prog")
        n = len(atoms(f))
        assert len(t.rows) == 3 ** n
        assert len({row.config for row in t.rows}) == 3 ** n

    def test_rows_agree_with_boolean_evaluation(self):
        """Fully definite propositional rows are the formula's truth value."""
        import numpy as np

        from ltl import FALSE, TRUE, And, Not, Or, atoms, evaluate
        from patterns import random_formula
        from table import build_table

        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(500):
            f = random_formula(rng, ["a", "b", "c", "d"], 3)
            if not _propositional_only(f, (And, Or, Not)):
                continue
            t = build_table(f, "prop")
            for row in t.rows:
                if all(v.definite for v in row.config):
                    values = {name: v.value == "T" for name, v in t.assignment(row).items()}
                    assert row.result == (TRUE if evaluate(f, values) else FALSE)
            checked += 1
            assert len(t.rows) == 3 ** len(atoms(f))
        assert checked > 50

    def test_rows_with_unknowns_agree_with_boolean_evaluation(self):
        """A row's result is the formula as a function of the row's Unknown atoms."""
        from itertools import product

        import numpy as np

        from ltl import And, Not, Or, atoms, evaluate
        from patterns import random_formula
        from table import build_table

        rng = np.random.default_rng(8)
        checked = 0
        for _ in range(500):
            f = random_formula(rng, ["a", "b", "c", "d"], 3)
            if not _propositional_only(f, (And, Or, Not)):
                continue
            t = build_table(f, "prop")
            for row in t.rows:
                known = {name: v.value == "T" for name, v in t.assignment(row).items() if v.definite}
                open_names = [name for name in t.vars if name not in known]
                assert atoms(row.result) <= set(open_names)
                for bits in product([False, True], repeat=len(open_names)):
                    values = {**known, **dict(zip(open_names, bits))}
                    assert evaluate(row.result, values) == evaluate(f, values)
            checked += 1
        assert checked > 50

    def test_progression_rows_keep_residues(self):
        """A progression row leaves X-residues untouched."""
        from ltl import parse, simplify
        from table import build_table

        t = build_table(parse("F (a & b)"), "prog")
        assert _row(t, a="F").result == simplify(parse("X F (a & b)"))
        assert _row(t, a="T").result == simplify(parse("b | X F (a & b)"))
        assert _row(t, a="T", b="T").result == simplify(parse("true"))

    def test_cap_exceeded(self):
        """Formulas over the cap are refused."""
        from errors import VariableCapExceeded
        from ltl import parse
        from table import build_table

        with pytest.raises(VariableCapExceeded) as info:
            build_table(parse("a & b & c"), cap=2)
        assert info.value.n == 3
        assert info.value.cap == 2

    def test_small_tables_are_memoized(self):
        """Tables within the trigger cap are built once."""
        from ltl import parse
        from table import build_table

        f = parse("F (a & b) | c")
        assert build_table(f, "prog") is build_table(f, "prog")

    def test_large_tables_are_not_kept(self, monkeypatch):
        """Tables over the trigger cap are rebuilt and never enter the cache."""
        import table
        from ltl import parse

        monkeypatch.setattr(table, "TRIGGER_SYNTH_CAP", 2)
        table._cached_table.cache_clear()
        f = parse("a | (b & c)")
        first = table.build_table(f)
        assert table.build_table(f) is not first
        assert table.build_table(f) == first
        assert table._cached_table.cache_info().currsize == 0
        table.build_table(parse("a & b"))
        assert table._cached_table.cache_info().currsize == 1

    def test_cache_is_bounded(self):
        """The memo keeps a fixed number of tables."""
        from config import TABLE_CACHE_SIZE
        from table import _cached_table

        assert _cached_table.cache_info().maxsize == TABLE_CACHE_SIZE

    def test_frame_and_csv(self, tmp_path):
        """The table exports to a DataFrame and CSV."""
        import pandas as pd

        from ltl import parse
        from table import build_table, write_csv

        t = build_table(parse("a | b"))
        frame = t.frame()
        assert list(frame.columns) == ["a", "b", "result"]
        assert len(frame) == 9
        path = tmp_path / "table.csv"
        write_csv(t, path)
        loaded = pd.read_csv(path, keep_default_na=False)
        assert loaded["result"].tolist() == frame["result"].tolist()


def _propositional_only(f, kinds):
    from ltl import Atom

    if isinstance(f, Atom):
        return True
    if not isinstance(f, kinds):
        return False
    children = [f.operand] if hasattr(f, "operand") else [f.left, f.right]
    return all(_propositional_only(c, kinds) for c in children)


class TestInfluenceWeight:
    """Tests for influence weights."""

    def test_table_one_weights(self):
        """IW(a) = 8/9 and IW(b) = IW(c) = 4/9."""
        from ltl import parse
        from table import all_weights, build_table

        weights = all_weights(build_table(parse("a | (b & c)"), "prop"))
        assert weights["a"].value == Fraction(8, 9)
        assert weights["b"].value == Fraction(4, 9)
        assert weights["c"].value == Fraction(4, 9)
        assert weights["a"].denominator == 9

    def test_worked_example_weights(self):
        """Step-only weights of 'F (b | (a1 & a2 & c))'."""
        from ltl import parse
        from table import CountMode, all_weights, build_table

        weights = all_weights(build_table(parse("F (b | (a1 & a2 & c))"), "prog"), CountMode.STEP_ONLY)
        assert weights["b"].value == Fraction(26, 27)
        assert weights["a1"].value == Fraction(8, 27)
        assert weights["a2"].value == Fraction(8, 27)
        assert weights["c"].value == Fraction(8, 27)

    def test_full_count_of_two_classes(self):
        """Full counting on 'F (a & b) | G (c & d)'."""
        from ltl import parse
        from table import CountMode, all_weights, build_table

        t = build_table(parse("F (a & b) | G (c & d)"), "prog")
        full = all_weights(t, CountMode.FULL)
        step = all_weights(t, CountMode.STEP_ONLY)
        assert full["a"].value == 1
        assert full["c"].value == Fraction(16, 27)
        assert step["a"].value == Fraction(18, 27)
        assert step["c"].value == Fraction(16, 27)

    def test_full_count_all_equivalent(self):
        """Every atom of 'F (a & b & c)' has full weight 1."""
        from ltl import parse
        from table import CountMode, all_weights, build_table

        weights = all_weights(build_table(parse("F (a & b & c)"), "prog"), CountMode.FULL)
        assert {w.value for w in weights.values()} == {1}

    def test_unknown_variable(self):
        """Asking for an atom outside the table fails."""
        from errors import UnknownVariable
        from ltl import parse
        from table import build_table, influence_weight

        with pytest.raises(UnknownVariable):
            influence_weight(build_table(parse("a")), "z")

    def test_weights_frame(self):
        """Weights export with exact and float values."""
        from ltl import parse
        from table import all_weights, build_table, weights_frame

        frame = weights_frame(all_weights(build_table(parse("a | (b & c)"))))
        assert frame.set_index("variable").at["a", "weight"] == "8/9"
        assert frame.set_index("variable").at["b", "value"] == pytest.approx(4 / 9)


class TestEquivalentConfigs:
    """Tests for grouping rows by result."""

    def test_groups_cover_every_row(self):
        """Groups partition the rows."""
        from ltl import parse
        from table import build_table, equivalent_configs

        t = build_table(parse("a | (b & c)"))
        groups = equivalent_configs(t)
        assert sum(len(g) for g in groups.values()) == 27
        assert len(groups[parse("true")]) == 9 + 2

    def test_rows_keyed_by_a(self):
        """Five configurations leave exactly 'a'."""
        from ltl import Atom, Truth3, parse
        from table import build_table, equivalent_configs

        groups = equivalent_configs(build_table(parse("a | (b & c)")))
        U, F, T = Truth3.UNKNOWN, Truth3.BOT, Truth3.TOP
        assert groups[Atom("a")] == [
            {"a": U, "b": U, "c": F},
            {"a": U, "b": F, "c": U},
            {"a": U, "b": F, "c": F},
            {"a": U, "b": F, "c": T},
            {"a": U, "b": T, "c": F},
        ]
        assert len(groups) == 9

    def test_single_atom(self):
        """A lone atom keeps itself only while Unknown."""
        from ltl import FALSE, TRUE, Atom, Truth3, parse
        from table import build_table, equivalent_configs

        groups = equivalent_configs(build_table(parse("a")))
        assert groups == {
            Atom("a"): [{"a": Truth3.UNKNOWN}],
            FALSE: [{"a": Truth3.BOT}],
            TRUE: [{"a": Truth3.TOP}],
        }
