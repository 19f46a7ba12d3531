"""Command-line interface for ProgMon."""
from __future__ import annotations

import sys
from argparse import ArgumentParser, Namespace

from config import DEFAULT_COUNT_MODE, PORT
from errors import BenchRunFailed, FormulaSyntaxError, ProgmonError, VariableCapExceeded
from logs import configure, get_logger
from ltl import parse, render, simplify

logger = get_logger("progmon.cli")

EXIT_OK = 0
EXIT_RUN_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _out(line: str = "") -> None:
    print(line)


def cmd_table(args: Namespace) -> int:
    from table import build_table, write_csv

    t = build_table(parse(args.formula), args.mode)
    if args.csv:
        write_csv(t, args.csv)
        _out(f"wrote {len(t.rows)} rows to {args.csv}")
    else:
        _out(t.frame().to_string(index=False))
    return EXIT_OK


def cmd_weights(args: Namespace) -> int:
    from table import all_weights, build_table, weights_frame

    weights = all_weights(build_table(parse(args.formula), args.mode), args.count_mode)
    _out(weights_frame(weights).to_string(index=False))
    return EXIT_OK


def cmd_equiv(args: Namespace) -> int:
    from equiv import equivalent_partition

    p = equivalent_partition(parse(args.formula))
    if not p.classes:
        _out("no equivalent variables")
    for members in p.classes:
        _out("{" + ", ".join(members) + "}")
    if p.singletons:
        _out("singletons: " + ", ".join(p.singletons))
    return EXIT_OK


def cmd_reduce(args: Namespace) -> int:
    from equiv import reduce

    rm = reduce(parse(args.formula))
    _out(render(rm.reduced))
    for (first, second), gone in zip(rm.representatives, rm.dropped):
        kept = f"{first}, {second}"
        _out(f"  kept {kept}; folded into {first}: {', '.join(gone) or '-'}")
    return EXIT_OK


def cmd_synth(args: Namespace) -> int:
    from synth import synthesize
    from table import build_table

    sop = synthesize(build_table(parse(args.formula), args.mode), simplify(parse(args.target)))
    _out(str(sop))
    return EXIT_OK


def cmd_plan(args: Namespace) -> int:
    from monitor import Topology, plan, plan_to_json

    p = plan(parse(args.formula), Topology.parse(args.topo), args.count_mode)
    if args.json:
        _out(plan_to_json(p))
        return EXIT_OK
    _out(f"formula: {render(p.formula)}")
    _out(f"reduced: {render(p.reduction.reduced)}")
    _out(f"ring: {' -> '.join(p.ring + p.ring[:1])}")
    for pid in p.ring:
        _out(f"  {pid}: factor {p.factors[pid]}")
    for name, w in sorted(p.weights.items()):
        _out(f"  IW({name}) = {w}")
    return EXIT_OK


def cmd_monitor(args: Namespace) -> int:
    from monitor import Topology, centralized_steps, plan, read_trace, run, run_baseline

    f = parse(args.formula)
    topo = Topology.parse(args.topo)
    trace = read_trace(args.trace)
    if args.baseline:
        verdict, metrics = run_baseline(f, topo, trace)
    else:
        verdict, metrics = run(plan(f, topo, args.count_mode), trace)
    oracle, oracle_steps = centralized_steps(f, trace)
    _out(f"verdict: {verdict.value}")
    _out(f"centralized: {oracle.value} after {oracle_steps} steps")
    for key, value in metrics.model_dump().items():
        _out(f"{key}: {value}")
    return EXIT_OK


def cmd_bench(args: Namespace) -> int:
    from bench import bench_many
    from patterns import PATTERN_CLASSES

    classes = list(PATTERN_CLASSES) if "all" in args.pattern_class else args.pattern_class
    report = bench_many(
        classes,
        count=args.count,
        processes=args.procs,
        length=args.len,
        seed=args.seed,
        count_mode=args.count_mode,
        atoms_per_process=args.atoms,
        workers=args.workers,
    )
    if args.csv:
        report.to_csv(args.csv)
    _out(report.to_text())
    return EXIT_OK


def cmd_gen_trace(args: Namespace) -> int:
    from bench import gen_trace
    from monitor import Topology, write_trace

    trace = gen_trace(Topology.parse(args.topo).alphabet, args.len, args.seed)
    if args.out:
        write_trace(trace, args.out)
    else:
        import json

        for values in trace:
            _out(json.dumps(dict(sorted(values.items()))))
    return EXIT_OK


def cmd_gen_pattern(args: Namespace) -> int:
    from monitor import Topology
    from patterns import gen_pattern

    _out(render(gen_pattern(args.pattern_class, Topology.parse(args.topo), args.seed)))
    return EXIT_OK


def cmd_serve(args: Namespace) -> int:
    import uvicorn

    uvicorn.run("api:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> ArgumentParser:
    from bench import BenchConfig
    from patterns import PATTERN_CLASSES

    defaults = BenchConfig.model_fields
    parser = ArgumentParser(prog="progmon", description="Progression tables and decentralized LTL monitoring")
    parser.add_argument("--log-level", default=None, help="Override PROGMON_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", help="Each command analyses a formula or runs monitors")
    subparsers.required = True

    def formula_command(name: str, handler, help_text: str) -> ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("formula", help="LTL formula, e.g. 'F (a & b) | G c'")
        sub.set_defaults(func=handler)
        return sub

    def count_mode_option(sub: ArgumentParser) -> None:
        sub.add_argument("--count-mode", choices=["step", "full"], default=DEFAULT_COUNT_MODE,
                         help="Count occurrences inside X-residues (full) or not (step). Default: %(default)s")

    sub = formula_command("table", cmd_table, "Print the simplification or progression table")
    sub.add_argument("--mode", choices=["prop", "prog"], default="prop", help="Default: %(default)s")
    sub.add_argument("--csv", help="Write the table to this CSV file instead")

    sub = formula_command("weights", cmd_weights, "Influence weight of every variable")
    sub.add_argument("--mode", choices=["prop", "prog"], default="prog", help="Default: %(default)s")
    count_mode_option(sub)

    formula_command("equiv", cmd_equiv, "Classes of equivalent variables")
    formula_command("reduce", cmd_reduce, "Reduced formula with two representatives per class")

    sub = formula_command("synth", cmd_synth, "Trigger expression for one table result")
    sub.add_argument("--target", required=True, help="Result formula to characterize")
    sub.add_argument("--mode", choices=["prop", "prog"], default="prog", help="Default: %(default)s")

    sub = formula_command("plan", cmd_plan, "Weights, influence factors and ring for a topology")
    sub.add_argument("--topo", required=True, help="Topology such as 'A:a1,a2;B:b;C:c'")
    sub.add_argument("--json", action="store_true", help="Print the plan as JSON")
    count_mode_option(sub)

    sub = formula_command("monitor", cmd_monitor, "Monitor a JSON Lines trace")
    sub.add_argument("--topo", required=True, help="Topology such as 'A:a1,a2;B:b;C:c'")
    sub.add_argument("--trace", required=True, help="JSON Lines file, one step per line")
    sub.add_argument("--baseline", action="store_true", help="Use the formula-forwarding baseline")
    count_mode_option(sub)

    sub = subparsers.add_parser("bench", help="Paired benchmark of both monitors over pattern formulas")
    sub.add_argument("--class", dest="pattern_class", action="append", required=True,
                     choices=[*PATTERN_CLASSES, "all"], help="Pattern class; repeat or use 'all'")
    sub.add_argument("--count", type=int, default=defaults["count"].default, help="Default: %(default)s")
    sub.add_argument("--procs", type=int, default=defaults["processes"].default, help="Default: %(default)s")
    sub.add_argument("--len", type=int, default=defaults["length"].default, help="Default: %(default)s")
    sub.add_argument("--seed", type=int, default=0, help="Default: %(default)s")
    sub.add_argument("--atoms", type=int, default=defaults["atoms_per_process"].default,
                     help="Atoms per process. Default: %(default)s")
    sub.add_argument("--workers", type=int, default=defaults["workers"].default, help="Default: %(default)s")
    sub.add_argument("--csv", help="Write the summary to this CSV file")
    count_mode_option(sub)
    sub.set_defaults(func=cmd_bench)

    sub = subparsers.add_parser("gen-trace", help="Seeded uniform random trace")
    sub.add_argument("--topo", required=True, help="Topology whose alphabet the trace covers")
    sub.add_argument("--len", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", help="Write JSON Lines here instead of stdout")
    sub.set_defaults(func=cmd_gen_trace)

    sub = subparsers.add_parser("gen-pattern", help="Seeded pattern formula over a topology")
    sub.add_argument("--class", dest="pattern_class", required=True, choices=PATTERN_CLASSES)
    sub.add_argument("--topo", required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=cmd_gen_pattern)

    sub = subparsers.add_parser("serve", help="Start the HTTP analysis service")
    sub.add_argument("--host", default="0.0.0.0")
    sub.add_argument("--port", type=int, default=PORT)
    sub.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        configure(level=args.log_level.upper())
    try:
        return args.func(args)
    except FormulaSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        lines = e.text.split("\n")
        if e.text and e.line <= len(lines):
            print(f"  {lines[e.line - 1]}", file=sys.stderr)
            print("  " + " " * (e.column - 1) + "^", file=sys.stderr)
        return EXIT_USAGE
    except VariableCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except BenchRunFailed as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUN_FAILED
    except (ProgmonError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
