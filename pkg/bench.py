"""Benchmark harness: seeded traces and patterns, paired monitor runs, reports."""
from __future__ import annotations

import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator

from config import (
    BENCH_ATOMS_PER_PROCESS,
    BENCH_COUNT,
    BENCH_PROCESSES,
    BENCH_TRACE_LENGTH,
    BENCH_WORKERS,
    DEFAULT_COUNT_MODE,
)
from errors import BenchRunFailed
from logs import get_logger
from ltl import Trace, render
from monitor import Process, Topology, centralized, plan, run, run_baseline
from patterns import ABBREVIATIONS, PATTERN_CLASSES, gen_pattern, skipped_templates
from table import CountMode

logger = get_logger("progmon.bench")

METRICS = ("trace", "msgs", "msg_bits", "mem_bits")
METRIC_HEADERS = {"trace": "|trace|", "msgs": "#msg", "msg_bits": "|msg|", "mem_bits": "|mem|"}
MONITORS = ("BF", "PDM")


def gen_trace(alphabet: Iterable[str], length: int, seed: int) -> Trace:
    """Uniform i.i.d. truth values for every atom at every step."""
    if length < 1:
        raise ValueError("trace length must be at least 1")
    names = sorted(alphabet)
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, 2, size=(length, len(names)))
    return [{name: bool(v) for name, v in zip(names, row)} for row in draws]


def bench_topology(processes: int, atoms_per_process: int) -> Topology:
    """Processes ``A, B, ...`` observing ``a0, a1, ...``, ``b0, b1, ...``."""
    if not 1 <= processes <= len(string.ascii_uppercase):
        raise ValueError(f"process count must be between 1 and {len(string.ascii_uppercase)}")
    if atoms_per_process < 1:
        raise ValueError("each process needs at least one atom")
    return Topology(
        processes=[
            Process(id=pid, alphabet=frozenset(f"{pid.lower()}{i}" for i in range(atoms_per_process)))
            for pid in string.ascii_uppercase[:processes]
        ]
    )


class BenchConfig(BaseModel):
    pattern: str
    count: int = Field(BENCH_COUNT, ge=1)
    processes: int = Field(BENCH_PROCESSES, ge=1)
    length: int = Field(BENCH_TRACE_LENGTH, ge=1)
    seed: int = 0
    count_mode: CountMode = CountMode(DEFAULT_COUNT_MODE)
    atoms_per_process: int = Field(BENCH_ATOMS_PER_PROCESS, ge=1)
    workers: int = Field(BENCH_WORKERS, ge=1)

    @field_validator("pattern")
    @classmethod
    def _known_pattern(cls, value: str) -> str:
        if value not in PATTERN_CLASSES:
            raise ValueError(f"unknown pattern class {value!r}")
        return value


def repetition_seeds(cfg: BenchConfig) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(cfg.seed).generate_state(cfg.count)]


def run_repetition(cfg: BenchConfig, index: int, seed: int) -> list[dict]:
    """Both monitors on the same formula and trace."""
    topo = bench_topology(cfg.processes, cfg.atoms_per_process)
    pattern_seed, trace_seed = (int(s) for s in np.random.SeedSequence(seed).generate_state(2))
    try:
        formula = gen_pattern(cfg.pattern, topo, pattern_seed)
        trace = gen_trace(topo.alphabet, cfg.length, trace_seed)
        monitor_plan = plan(formula, topo, cfg.count_mode)
        results = {"PDM": run(monitor_plan, trace), "BF": run_baseline(formula, topo, trace)}
        oracle = centralized(formula, trace)
    except Exception as e:
        raise BenchRunFailed(cfg.pattern, seed, e) from e
    return [
        {
            "pattern": cfg.pattern,
            "monitor": name,
            "run": index,
            "seed": seed,
            "formula": render(formula),
            "verdict": verdict.value,
            "oracle": oracle.value,
            "trace": metrics.trace_len,
            "msgs": metrics.msg_count,
            "msg_bits": metrics.msg_bits,
            "mem_bits": metrics.mem_bits,
        }
        for name, (verdict, metrics) in results.items()
    ]


def _run_packed(args: tuple[BenchConfig, int, int]) -> list[dict]:
    return run_repetition(*args)


@dataclass
class BenchReport:
    runs: pd.DataFrame
    skipped: dict[str, list[str]] = field(default_factory=dict)

    def summary(self) -> pd.DataFrame:
        """Means per pattern and monitor, plus the number of runs."""
        grouped = self.runs.groupby(["pattern", "monitor"], sort=False)
        summary = grouped[list(METRICS)].mean()
        summary["runs"] = grouped.size()
        return summary.reset_index()

    def to_csv(self, path) -> None:
        self.summary().to_csv(path, index=False)

    def to_text(self) -> str:
        """Aligned table: one row per pattern, each metric split by monitor."""
        summary = self.summary()
        headers = ["pattern"] + [f"{METRIC_HEADERS[m]} {mon}" for m in METRICS for mon in MONITORS]
        rows = []
        for pattern in dict.fromkeys(summary["pattern"]):
            part = summary[summary["pattern"] == pattern].set_index("monitor")
            row = [ABBREVIATIONS.get(pattern, pattern)]
            row += [f"{part.at[mon, m]:.2f}" if mon in part.index else "-" for m in METRICS for mon in MONITORS]
            rows.append(row)
        widths = [max(len(str(r[i])) for r in [headers, *rows]) for i in range(len(headers))]
        lines = ["  ".join(str(cell).rjust(w) for cell, w in zip(r, widths)) for r in [headers, *rows]]
        for pattern, texts in self.skipped.items():
            for text in texts:
                lines.append(f"skipped {ABBREVIATIONS.get(pattern, pattern)} template: {text}")
        return "\n".join(lines)


def bench(cfg: BenchConfig) -> BenchReport:
    """Run ``cfg.count`` paired repetitions of one pattern class.

    Raises:
        BenchRunFailed: a repetition failed; carries its seed.
    """
    seeds = repetition_seeds(cfg)
    jobs = [(cfg, i, seed) for i, seed in enumerate(seeds)]
    logger.info(f"Benchmarking {cfg.pattern}: {cfg.count} runs, {cfg.processes} processes, seed {cfg.seed}")
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = [r for batch in pool.map(_run_packed, jobs) for r in batch]
    else:
        records = [r for job in jobs for r in _run_packed(job)]
    return BenchReport(runs=pd.DataFrame.from_records(records), skipped={cfg.pattern: skipped_templates(cfg.pattern)})


def bench_many(patterns: Iterable[str], **settings) -> BenchReport:
    reports = [bench(BenchConfig(pattern=pattern, **settings)) for pattern in patterns]
    skipped = {k: v for report in reports for k, v in report.skipped.items()}
    return BenchReport(runs=pd.concat([r.runs for r in reports], ignore_index=True), skipped=skipped)
