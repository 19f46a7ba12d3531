"""Tests for trigger expression synthesis."""
import pytest


def _table_one():
    from ltl import parse
    from table import build_table

    return build_table(parse("a | (b & c)"), "prop")


class TestTerms:
    """Tests for literals and product terms."""

    def test_term_rejects_both_signs(self):
        """A term cannot hold an atom and its negation."""
        from synth import Literal, Term

        with pytest.raises(ValueError):
            Term.of(Literal("a"), Literal("a", False))

    def test_term_satisfaction_needs_definite_values(self):
        """Unknown values satisfy no literal."""
        from ltl import Truth3
        from synth import Literal, Term

        term = Term.of(Literal("a"), Literal("b", False))
        assert term.satisfied_by({"a": Truth3.TOP, "b": Truth3.BOT})
        assert not term.satisfied_by({"a": Truth3.TOP})
        assert not term.satisfied_by({"a": Truth3.TOP, "b": Truth3.TOP})

    def test_term_rendering(self):
        """Literals render sorted, negations with '!'."""
        from synth import Literal, Term

        assert str(Term.of(Literal("b", False), Literal("a"))) == "a & !b"
        assert str(Term.of()) == "true"


class TestMinimize:
    """Tests for the two reduction rules."""

    def test_complement_merge(self):
        """x P + !x P gives P."""
        from ltl import TRUE
        from synth import Literal, SumOfProducts, Term, minimize

        s = SumOfProducts(TRUE, frozenset({
            Term.of(Literal("a"), Literal("b")),
            Term.of(Literal("a"), Literal("b", False)),
        }))
        assert minimize(s).terms == frozenset({Term.of(Literal("a"))})

    def test_absorption(self):
        """P + P Q gives P."""
        from ltl import TRUE
        from synth import Literal, SumOfProducts, Term, minimize

        s = SumOfProducts(TRUE, frozenset({
            Term.of(Literal("a")),
            Term.of(Literal("a"), Literal("c")),
        }))
        assert minimize(s).terms == frozenset({Term.of(Literal("a"))})

    def test_minimize_is_idempotent(self):
        """A minimized expression does not change again."""
        from ltl import FALSE
        from synth import minimize, synthesize

        sop = synthesize(_table_one(), FALSE)
        assert minimize(sop) == sop


class TestSynthesize:
    """Tests for synthesis from table rows."""

    def test_true_trigger_of_table_one(self):
        """'a | (b & c)' is true exactly when a, or b and c, are true."""
        from ltl import TRUE
        from synth import synthesize

        assert str(synthesize(_table_one(), TRUE)) == "a | b & c"

    def test_false_trigger_of_table_one(self):
        """False needs a false and one of b, c false."""
        from ltl import FALSE
        from synth import synthesize

        assert str(synthesize(_table_one(), FALSE)) == "!a & !b | !a & !c"

    def test_residual_target(self):
        """'a | c' remains when only b is known true."""
        from ltl import parse, simplify
        from synth import synthesize

        assert str(synthesize(_table_one(), simplify(parse("a | c")))) == "b"

    def test_progression_trigger(self):
        """'F (a & b)' holds now when both atoms are true."""
        from ltl import TRUE, parse
        from synth import synthesize
        from table import build_table

        assert str(synthesize(build_table(parse("F (a & b)"), "prog"), TRUE)) == "a & b"

    def test_trigger_matches_rows(self):
        """Over the fully definite rows, the trigger holds exactly on the target's rows."""
        from ltl import FALSE, parse
        from synth import evaluate_sop, synthesize
        from table import build_table

        t = build_table(parse("G (a | b) & F c"), "prog")
        for target in t.results():
            sop = synthesize(t, target, verify=True)
            if target == FALSE:
                assert str(sop) == "!a & !b"
                for row in t.rows:
                    if all(v.definite for v in row.config):
                        assert evaluate_sop(sop, t.assignment(row)) == (row.result == FALSE)

    def test_target_not_in_table(self):
        """Asking for a result no row produces fails."""
        from errors import TargetNotInTable
        from ltl import parse
        from synth import synthesize

        with pytest.raises(TargetNotInTable):
            synthesize(_table_one(), parse("d"))

    def test_evaluate_sop_accepts_booleans(self):
        """Plain booleans are taken as definite values."""
        from ltl import TRUE
        from synth import evaluate_sop, synthesize

        sop = synthesize(_table_one(), TRUE)
        assert evaluate_sop(sop, {"a": False, "b": True, "c": True})
        assert not evaluate_sop(sop, {"a": False, "b": True, "c": False})


class TestMinimalSet:
    """Tests for choosing what to propagate."""

    def test_smallest_satisfied_term(self):
        """The shortest satisfied term wins."""
        from ltl import TRUE, Truth3, parse, simplify
        from synth import minimal_set, synthesize

        t = _table_one()
        sops = [synthesize(t, target) for target in t.results()]
        k = {"a": Truth3.TOP, "b": Truth3.TOP, "c": Truth3.TOP}
        assert minimal_set(sops, k, TRUE) == frozenset({"a"})
        k = {"a": Truth3.UNKNOWN, "b": Truth3.TOP, "c": Truth3.TOP}
        assert minimal_set(sops, k, TRUE) == frozenset({"b", "c"})
        k = {"a": Truth3.UNKNOWN, "b": Truth3.TOP, "c": Truth3.UNKNOWN}
        assert minimal_set(sops, k, simplify(parse("a | c"))) == frozenset({"b"})

    def test_fallback_sends_local_values(self):
        """Without a satisfied term the sender's own definite values go out."""
        from ltl import TRUE, Truth3
        from synth import minimal_set, synthesize

        sops = [synthesize(_table_one(), TRUE)]
        k = {"a": Truth3.BOT, "b": Truth3.TOP, "c": Truth3.UNKNOWN}
        assert minimal_set(sops, k, TRUE) == frozenset({"a", "b"})
        assert minimal_set(sops, k, TRUE, local={"b"}) == frozenset({"b"})

    def test_other_targets_are_ignored(self):
        """Expressions for other results are not consulted."""
        from ltl import FALSE, TRUE, Truth3
        from synth import minimal_set, synthesize

        sops = [synthesize(_table_one(), FALSE)]
        k = {"a": Truth3.TOP, "b": Truth3.UNKNOWN, "c": Truth3.UNKNOWN}
        assert minimal_set(sops, k, TRUE) == frozenset({"a"})
