"""Decentralized monitoring over a ring of processes.

Setup (``plan``) reduces the formula, tables it, weighs the atoms and
synthesizes trigger expressions; the ring orders processes by influence
factor. ``run`` then replays a trace step by step: within a step the
processes relay, along the ring, the values that decide the current step
formula. ``centralized`` and ``run_baseline`` are the references the
decentralized run is measured against.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from config import (
    FORMULA_NODE_BITS,
    KNOWLEDGE_ENTRY_BITS,
    MSG_HEADER_BITS,
    TABLE_VARIABLE_CAP,
    TRIGGER_SYNTH_CAP,
)
from equiv import ReductionMap, exact_weights, extend_boolean, extend_weights, reduce
from errors import AlphabetMismatch, IncompleteTopology, NotAReducedTarget, TargetNotInTable, UnknownVariable
from logs import get_logger
from ltl import (
    Atom,
    Event,
    Formula,
    Trace,
    Truth3,
    atoms,
    definite_step,
    expand_step,
    progress,
    render,
    simplify,
    size,
    step_atoms,
    step_formula,
    strip_next,
    substitute_all,
    verdict_of,
)
from synth import SumOfProducts, minimal_set, synthesize
from table import CountMode, TableMode, Weight, all_weights, build_table

logger = get_logger("progmon.monitor")


# Topology

class Process(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    alphabet: frozenset[str]

    @field_validator("alphabet")
    @classmethod
    def _check_names(cls, alphabet: frozenset[str]) -> frozenset[str]:
        for name in alphabet:
            Atom(name)
        return alphabet


class Topology(BaseModel):
    """Processes with pairwise disjoint alphabets."""

    model_config = ConfigDict(frozen=True)

    processes: list[Process] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_processes(self):
        ids = [p.id for p in self.processes]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate process ids in {ids}")
        seen: set[str] = set()
        for p in self.processes:
            shared = seen & p.alphabet
            if shared:
                raise ValueError(f"process {p.id} shares {sorted(shared)} with another process")
            seen |= p.alphabet
        return self

    @classmethod
    def parse(cls, text: str) -> "Topology":
        """Read ``A:a1,a2;B:b;C:c``."""
        processes = []
        for chunk in filter(None, (part.strip() for part in text.split(";"))):
            pid, sep, names = chunk.partition(":")
            if not sep:
                raise ValueError(f"process spec {chunk!r} is missing ':'")
            alphabet = frozenset(filter(None, (n.strip() for n in names.split(","))))
            processes.append(Process(id=pid.strip(), alphabet=alphabet))
        return cls(processes=processes)

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.processes]

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset().union(*(p.alphabet for p in self.processes))

    def process(self, pid: str) -> Process:
        for p in self.processes:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def owner(self, atom: str) -> str:
        for p in self.processes:
            if atom in p.alphabet:
                return p.id
        raise UnknownVariable(atom)

    def check_covers(self, f: Formula) -> None:
        missing = atoms(f) - self.alphabet
        if missing:
            raise IncompleteTopology(missing)

    def __str__(self):
        return ";".join(f"{p.id}:{','.join(sorted(p.alphabet))}" for p in self.processes)


def split_step(topo: Topology, values: Mapping[str, bool]) -> list[Event]:
    """Cut one global step into the processes' local events."""
    events = []
    for p in topo.processes:
        missing = p.alphabet - values.keys()
        if missing:
            raise AlphabetMismatch(p.id, p.alphabet, p.alphabet - missing)
        events.append(Event(process=p.id, props={name: bool(values[name]) for name in p.alphabet}))
    return events


# Setup

@dataclass(frozen=True)
class MonitorPlan:
    formula: Formula
    topology: Topology
    count_mode: CountMode
    reduction: ReductionMap
    weights: dict[str, Weight]
    weights_exact: bool
    factors: dict[str, Fraction]
    ring: tuple[str, ...]
    triggers: dict[Formula, SumOfProducts]
    skipped_targets: tuple[Formula, ...] = ()


def _plan_triggers(rm: ReductionMap) -> tuple[dict[Formula, SumOfProducts], list[Formula]]:
    reduced_table = build_table(rm.reduced, TableMode.PROGRESSION)
    triggers: dict[Formula, SumOfProducts] = {}
    skipped = []
    for target in reduced_table.results():
        sop = synthesize(reduced_table, target)
        try:
            extended, ext_target = extend_boolean(sop, target, rm, table=reduced_table)
        except NotAReducedTarget as e:
            logger.debug(f"Trigger for {render(target)} not extended: {e}")
            skipped.append(target)
            continue
        if ext_target in triggers:
            extended = SumOfProducts(ext_target, triggers[ext_target].terms | extended.terms)
        triggers[ext_target] = extended
    return triggers, skipped


def plan(f: Formula, topo: Topology, cm: CountMode = CountMode.STEP_ONLY) -> MonitorPlan:
    """Setup phase: reduce, table, weigh, synthesize triggers and order the ring.

    Weights come from the full table of ``f`` while it fits under the table
    cap; larger formulas use weights extended from the reduced table.

    Raises:
        IncompleteTopology: some atom of ``f`` has no observer.
        VariableCapExceeded: the reduced formula is too large to table.
    """
    cm = CountMode(cm)
    f = simplify(f)
    topo.check_covers(f)
    rm = reduce(f)
    exact = len(atoms(f)) <= TABLE_VARIABLE_CAP
    if exact:
        weights = exact_weights(rm, cm)
    else:
        weights = extend_weights(rm, all_weights(build_table(rm.reduced, TableMode.PROGRESSION), cm), cm)
    factors = {
        p.id: sum((weights[name].value for name in p.alphabet if name in weights), Fraction(0))
        for p in topo.processes
    }
    ring = tuple(sorted(topo.ids, key=lambda pid: (-factors[pid], pid)))
    triggers, skipped = _plan_triggers(rm)
    logger.debug(
        f"Planned {render(f)}: reduced to {render(rm.reduced)}, ring {' -> '.join(ring)}, "
        f"{len(triggers)} triggers"
    )
    return MonitorPlan(
        formula=f,
        topology=topo,
        count_mode=cm,
        reduction=rm,
        weights=weights,
        weights_exact=exact,
        factors=factors,
        ring=ring,
        triggers=triggers,
        skipped_targets=tuple(skipped),
    )


@lru_cache(maxsize=4096)
def _obligation_triggers(obligation: Formula, target: Formula) -> tuple[SumOfProducts, ...]:
    if len(atoms(obligation)) > TRIGGER_SYNTH_CAP:
        return ()
    try:
        return (synthesize(build_table(obligation, TableMode.PROGRESSION), target, verify=False),)
    except TargetNotInTable:
        return ()


def triggers_for(p: MonitorPlan, obligation: Formula, target: Formula) -> list[SumOfProducts]:
    """Trigger expressions for ``target`` as a step result of ``obligation``."""
    if obligation == p.formula and target in p.triggers:
        return [p.triggers[target]]
    return list(_obligation_triggers(obligation, target))


# Run

@dataclass(frozen=True)
class Entry:
    atom: str
    value: Truth3
    step: int


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    step: int
    entries: tuple[Entry, ...] = ()

    def bits(self, alphabet_size: int) -> int:
        per_entry = (max(alphabet_size, 1) - 1).bit_length() + 1
        return MSG_HEADER_BITS + per_entry * len(self.entries)


@dataclass(frozen=True)
class MonitorState:
    step: int
    obligation: dict[str, Formula]
    knowledge: dict[str, dict[str, Truth3]] = field(default_factory=dict)
    # Processes whose obligation still waits for the rest of the previous step
    pending: frozenset[str] = frozenset()
    previous: Formula | None = None
    verdict: Truth3 = Truth3.UNKNOWN

    def memory_bits(self) -> int:
        nodes = sum(size(f) for f in self.obligation.values())
        entries = sum(len(k) for k in self.knowledge.values())
        return nodes * FORMULA_NODE_BITS + entries * KNOWLEDGE_ENTRY_BITS


class RunMetrics(BaseModel):
    msg_count: int = Field(0, ge=0)
    msg_bits: int = Field(0, ge=0)
    trace_len: int = Field(0, ge=0)
    mem_bits: int = Field(0, ge=0)


def initial_state(p: MonitorPlan) -> MonitorState:
    return MonitorState(step=0, obligation={pid: p.formula for pid in p.ring})


def _advance(psi: Formula) -> Formula | None:
    """Next obligation once no step atom is left open, else None."""
    if step_atoms(psi):
        return None
    return simplify(strip_next(psi))


def _payload(p: MonitorPlan, obligation: Formula, k: dict[str, Truth3], local: frozenset[str], step: int) -> tuple[Entry, ...]:
    psi = step_formula(obligation, k)
    chosen = minimal_set(triggers_for(p, obligation, psi), k, psi, local=local)
    if step_formula(obligation, {name: k[name] for name in chosen if name in k}) != psi:
        chosen = frozenset(k)
    return tuple(Entry(name, k[name], step) for name in sorted(chosen) if name in k)


def _local_values(p: MonitorPlan, events: Sequence[Event]) -> dict[str, dict[str, Truth3]]:
    watched = atoms(p.formula)
    by_process = {e.process: e for e in events}
    local = {}
    for proc in p.topology.processes:
        event = by_process.get(proc.id)
        observed = frozenset(event.props) if event else frozenset()
        if observed != proc.alphabet:
            raise AlphabetMismatch(proc.id, proc.alphabet, observed)
        local[proc.id] = {name: v for name, v in definite_step(event.props).items() if name in watched}
    return local


def step(p: MonitorPlan, state: MonitorState, events: Sequence[Event]) -> tuple[MonitorState, list[Message], Truth3]:
    """Process one global step.

    Starting at the ring head every process merges what it received,
    evaluates the step formula on its knowledge and sends its successor the
    values that decide it. The tail closes the ring back to the head, so
    both ends see the whole step. Processes in between keep their step
    knowledge and are completed at the next step by their predecessor,
    which adds entries for the previous step to its message.

    Raises:
        AlphabetMismatch: an event does not cover its process's alphabet.
    """
    if state.verdict.definite:
        return state, [], state.verdict
    t = state.step
    local = _local_values(p, events)
    ring = p.ring
    m = len(ring)
    obligation = dict(state.obligation)
    retained = {pid: dict(k) for pid, k in state.knowledge.items()}
    knowledge = {pid: dict(local[pid]) for pid in ring}
    current = obligation[ring[0]]
    messages: list[Message] = []
    verdict = Truth3.UNKNOWN

    def receive(pid: str, message: Message) -> None:
        for entry in message.entries:
            target = knowledge[pid] if entry.step == t else retained.setdefault(pid, {})
            target[entry.atom] = entry.value
        if pid in state.pending:
            resolved = _advance(step_formula(state.previous, retained.get(pid, {})))
            if resolved is None:
                raise RuntimeError(f"process {pid} could not complete step {t - 1}")
            obligation[pid] = resolved

    psi: dict[str, Formula] = {}
    for i, pid in enumerate(ring):
        if i > 0:
            receive(pid, messages[-1])
        psi[pid] = step_formula(obligation[pid], knowledge[pid])
        nxt = _advance(psi[pid])
        if nxt is not None and verdict_of(nxt).definite:
            verdict = verdict_of(nxt)
            obligation[pid] = nxt
            break
        if m == 1:
            break
        successor = ring[(i + 1) % m]
        alphabet = p.topology.process(pid).alphabet
        entries = _payload(p, obligation[pid], knowledge[pid], alphabet, t)
        if successor in state.pending:
            entries += _payload(p, state.previous, retained.get(pid, {}), alphabet, t - 1)
        messages.append(Message(pid, successor, t, entries))
    else:
        if m > 1:
            head = ring[0]
            receive(head, messages[-1])
            psi[head] = step_formula(obligation[head], knowledge[head])

    pending = set()
    if not verdict.definite:
        for pid in ring:
            nxt = _advance(psi[pid])
            if nxt is None:
                pending.add(pid)
                continue
            obligation[pid] = nxt
            if not verdict.definite and verdict_of(nxt).definite:
                verdict = verdict_of(nxt)

    new_state = MonitorState(
        step=t + 1,
        obligation=obligation,
        knowledge=knowledge,
        pending=frozenset(pending),
        previous=current,
        verdict=verdict,
    )
    return new_state, messages, verdict


def run(p: MonitorPlan, trace: Trace) -> tuple[Truth3, RunMetrics]:
    """Monitor ``trace`` until a definite verdict or the end of the trace."""
    state = initial_state(p)
    alphabet_size = len(p.topology.alphabet)
    msg_count = msg_bits = peak = 0
    for values in trace:
        state, messages, verdict = step(p, state, split_step(p.topology, values))
        msg_count += sum(1 for msg in messages if msg.entries)
        msg_bits += sum(msg.bits(alphabet_size) for msg in messages)
        peak = max(peak, state.memory_bits())
        if verdict.definite:
            break
    metrics = RunMetrics(msg_count=msg_count, msg_bits=msg_bits, trace_len=state.step, mem_bits=peak)
    return state.verdict, metrics


def centralized_steps(f: Formula, trace: Trace) -> tuple[Truth3, int]:
    """Verdict of a monitor that sees every step whole, and the steps it used."""
    obligation = simplify(f)
    for i, values in enumerate(trace):
        obligation = progress(obligation, definite_step(values))
        verdict = verdict_of(obligation)
        if verdict.definite:
            return verdict, i + 1
    return Truth3.UNKNOWN, len(trace)


def centralized(f: Formula, trace: Trace) -> Truth3:
    return centralized_steps(f, trace)[0]


def run_baseline(f: Formula, topo: Topology, trace: Trace) -> tuple[Truth3, RunMetrics]:
    """Formula-forwarding reference monitor on the alphabetical ring.

    Each process rewrites the received formula with its own values and
    forwards the whole result; the tail progresses it and hands the new
    obligation to the head.
    """
    obligation = simplify(f)
    topo.check_covers(obligation)
    ring = sorted(topo.ids)
    m = len(ring)
    msg_count = msg_bits = peak = steps = 0
    verdict = Truth3.UNKNOWN
    for t, values in enumerate(trace):
        events = {e.process: definite_step(e.props) for e in split_step(topo, values)}
        steps = t + 1
        inbox = {pid: 0 for pid in ring}
        if m > 1 and t > 0:
            inbox[ring[0]] = size(obligation)
        held: dict[str, Formula] = {}
        formula = expand_step(obligation)
        for i, pid in enumerate(ring):
            formula = substitute_all(formula, events[pid], residues_opaque=True)
            held[pid] = formula
            if verdict_of(formula).definite:
                break
            if i < m - 1:
                msg_count += 1
                msg_bits += MSG_HEADER_BITS + size(formula) * FORMULA_NODE_BITS
                inbox[ring[i + 1]] = size(formula)
        obligation = simplify(strip_next(formula))
        peak = max(peak, sum(size(g) + inbox[pid] for pid, g in held.items()) * FORMULA_NODE_BITS)
        verdict = verdict_of(obligation)
        if verdict.definite:
            break
        if m > 1:
            msg_count += 1
            msg_bits += MSG_HEADER_BITS + size(obligation) * FORMULA_NODE_BITS
    metrics = RunMetrics(msg_count=msg_count, msg_bits=msg_bits, trace_len=steps, mem_bits=peak)
    return verdict, metrics


# Files and exports

_step_adapter = TypeAdapter(dict[str, bool])


def read_trace(path: str | Path) -> Trace:
    """One JSON object per line mapping atom to boolean."""
    trace = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                trace.append(_step_adapter.validate_json(line))
    return trace


def write_trace(trace: Iterable[Mapping[str, bool]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for values in trace:
            fh.write(json.dumps(dict(sorted(values.items()))) + "\n")


def pad_trace(trace: Trace, extra: int) -> Trace:
    """Repeat the final step ``extra`` more times."""
    if not trace or extra <= 0:
        return list(trace)
    return list(trace) + [dict(trace[-1]) for _ in range(extra)]


def _fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class PlanExport(BaseModel):
    formula: str
    reduced: str
    count_mode: str
    classes: list[list[str]]
    ring: list[str]
    weights: dict[str, str]
    approximate: dict[str, bool]
    weights_exact: bool
    factors: dict[str, str]
    triggers: dict[str, str]
    skipped_targets: list[str]


def plan_export(p: MonitorPlan) -> PlanExport:
    return PlanExport(
        formula=render(p.formula),
        reduced=render(p.reduction.reduced),
        count_mode=p.count_mode.value,
        classes=[list(c) for c in p.reduction.partition.classes],
        ring=list(p.ring),
        weights={name: _fraction(w.value) for name, w in sorted(p.weights.items())},
        approximate={name: w.approximate for name, w in sorted(p.weights.items())},
        weights_exact=p.weights_exact,
        factors={pid: _fraction(v) for pid, v in p.factors.items()},
        triggers={render(target): str(sop) for target, sop in sorted(p.triggers.items(), key=lambda kv: render(kv[0]))},
        skipped_targets=[render(f) for f in p.skipped_targets],
    )


def plan_to_json(p: MonitorPlan) -> str:
    return plan_export(p).model_dump_json(indent=2)
