"""Tests for the command-line interface."""
import pytest

WORKED = "F (b | (a1 & a2 & c))"
WORKED_TOPOLOGY = "A:a1,a2;B:b;C:c"


class TestCommands:
    """Tests for the analysis commands."""

    def test_table(self, capsys):
        """The table prints one line per row plus a header."""
        from cli import main

        assert main(["table", "a | (b & c)"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 28

    def test_table_csv(self, tmp_path, capsys):
        """--csv writes the table to a file."""
        import pandas as pd

        from cli import main

        path = tmp_path / "t.csv"
        assert main(["table", "a | b", "--mode", "prog", "--csv", str(path)]) == 0
        assert "wrote 9 rows" in capsys.readouterr().out
        assert len(pd.read_csv(path)) == 9

    def test_weights(self, capsys):
        """Weights print as fractions."""
        from cli import main

        assert main(["weights", "a | (b & c)", "--mode", "prop"]) == 0
        out = capsys.readouterr().out
        assert "8/9" in out and "4/9" in out

    def test_equiv(self, capsys):
        """Classes print in braces."""
        from cli import main

        assert main(["equiv", "F (a & b) | G (c & d)"]) == 0
        assert capsys.readouterr().out.splitlines() == ["{a, b}", "{c, d}"]

    def test_equiv_none(self, capsys):
        """Formulas without classes say so."""
        from cli import main

        assert main(["equiv", "F (a & b) | G (a & c)"]) == 0
        assert "no equivalent variables" in capsys.readouterr().out

    def test_reduce(self, capsys):
        """The reduced formula comes first."""
        from cli import main
        from ltl import parse, render, simplify

        assert main(["reduce", WORKED]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == render(simplify(parse("F (b | (a1 & a2))")))
        assert "folded into a1: c" in out[1]

    def test_synth(self, capsys):
        """The trigger expression for a target."""
        from cli import main

        assert main(["synth", "a | (b & c)", "--target", "true", "--mode", "prop"]) == 0
        assert capsys.readouterr().out.strip() == "a | b & c"

    def test_plan_json(self, capsys):
        """--json prints the plan export."""
        import json

        from cli import main

        assert main(["plan", WORKED, "--topo", WORKED_TOPOLOGY, "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["ring"] == ["B", "A", "C"]

    def test_plan_text(self, capsys):
        """The ring closes back on its head."""
        from cli import main

        assert main(["plan", WORKED, "--topo", WORKED_TOPOLOGY]) == 0
        assert "ring: B -> A -> C -> B" in capsys.readouterr().out

    def test_gen_trace_then_monitor(self, tmp_path, capsys):
        """A generated trace file can be monitored by both monitors."""
        from cli import main

        path = tmp_path / "trace.jsonl"
        assert main(["gen-trace", "--topo", WORKED_TOPOLOGY, "--len", "5", "--seed", "3", "--out", str(path)]) == 0
        assert len(path.read_text().splitlines()) == 5
        assert main(["monitor", WORKED, "--topo", WORKED_TOPOLOGY, "--trace", str(path)]) == 0
        ring_out = capsys.readouterr().out
        assert main(["monitor", WORKED, "--topo", WORKED_TOPOLOGY, "--trace", str(path), "--baseline"]) == 0
        baseline_out = capsys.readouterr().out
        assert ring_out.splitlines()[0] == baseline_out.splitlines()[0]
        assert "msg_bits:" in ring_out

    def test_gen_pattern(self, capsys):
        """Patterns are printed as formulas."""
        from cli import main
        from ltl import parse

        assert main(["gen-pattern", "--class", "absence", "--topo", "A:a0,a1;B:b0,b1", "--seed", "1"]) == 0
        parse(capsys.readouterr().out.strip())

    def test_bench(self, tmp_path, capsys):
        """A tiny benchmark prints the summary table."""
        from cli import main

        path = tmp_path / "bench.csv"
        assert main(["bench", "--class", "universal", "--count", "2", "--len", "5", "--csv", str(path)]) == 0
        assert "univ" in capsys.readouterr().out
        assert path.exists()


class TestExitCodes:
    """Tests for error reporting."""

    def test_syntax_error(self, capsys):
        """Syntax errors point at the column."""
        from cli import main

        assert main(["table", "a # b"]) == 2
        err = capsys.readouterr().err
        assert "syntax error" in err
        assert "    ^" in err

    def test_cap_exceeded(self, capsys):
        """Formulas over the table cap exit with 3."""
        from cli import main

        formula = " & ".join(f"v{i}" for i in range(20))
        assert main(["table", formula]) == 3

    def test_incomplete_topology(self, capsys):
        """Unobserved atoms are a usage error."""
        from cli import main

        assert main(["plan", "a & z", "--topo", "A:a"]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_trace_file(self, tmp_path):
        """A missing trace file is a usage error."""
        from cli import main

        assert main(["monitor", "a", "--topo", "A:a", "--trace", str(tmp_path / "none.jsonl")]) == 2

    def test_unknown_command(self):
        """argparse rejects unknown commands."""
        from cli import main

        with pytest.raises(SystemExit):
            main(["explode"])
