"""Cycle-based two-state simulation.

One clock cycle ``c`` is:

1. apply the stimulus row for ``c``;
2. evaluate every continuous assign in dependency order;
3. run each always block top-down against the start-of-cycle state,
   collecting nonblocking writes;
4. commit all writes at once;
5. recompute the observed wires and sample the observation list.

All registers and memory rows start at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..errors import (
    EmptyStimulus,
    MemoryIndexOutOfRange,
    StimulusError,
    UnknownObservationSignal,
)
from ..frontend.ir import ElaboratedDesign, SignalKind
from .codegen import OutOfRange, compile_design, initial_values


@dataclass(frozen=True)
class Stimulus:
    """Per-cycle input values; the clock is implicit."""

    inputs: tuple[int, ...]
    values: np.ndarray  # (n_cycles, len(inputs)) uint64

    @property
    def n_cycles(self) -> int:
        return int(self.values.shape[0])

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.values]

    @classmethod
    def from_rows(cls, design: ElaboratedDesign, rows: Sequence[Mapping[str | int, int]]) -> "Stimulus":
        """Build from per-cycle mappings of input name (or id) to value."""
        inputs = tuple(s.id for s in design.inputs)
        names = design.names
        table = np.zeros((len(rows), len(inputs)), dtype=np.uint64)
        col = {sig: j for j, sig in enumerate(inputs)}
        for c, row in enumerate(rows):
            seen = set()
            for key, value in row.items():
                sig = names.get(key) if isinstance(key, str) else key
                if sig is None or sig not in col:
                    raise StimulusError(f"'{key}' is not a stimulus input of {design.name}")
                width = design.signals[sig].width
                if not 0 <= value < 1 << width:
                    raise StimulusError(
                        f"cycle {c}: value {value} does not fit {width}-bit input "
                        f"'{design.signals[sig].name}'"
                    )
                table[c, col[sig]] = value
                seen.add(sig)
            missing = [design.signals[s].name for s in inputs if s not in seen]
            if missing:
                raise StimulusError(f"cycle {c}: missing inputs {', '.join(missing)}")
        return cls(inputs, table)

    def check(self, design: ElaboratedDesign) -> None:
        expected = tuple(s.id for s in design.inputs)
        if tuple(sorted(self.inputs)) != expected:
            raise StimulusError("stimulus columns do not match the design's inputs")
        if self.n_cycles == 0:
            raise EmptyStimulus("stimulus has no cycles")


@dataclass(frozen=True)
class GoldenTrace:
    """Observation values sampled at the end of every cycle."""

    observation: tuple[int, ...]
    values: np.ndarray  # (n_cycles, len(observation)) uint64

    @property
    def n_cycles(self) -> int:
        return int(self.values.shape[0])

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.values]

    def column(self, signal: int) -> np.ndarray:
        return self.values[:, self.observation.index(signal)]


@dataclass(frozen=True)
class CoverageTrace:
    """Per-cycle executed statements plus the memory/register traffic behind them.

    ``mem_reads[c]`` holds ``(stmt, mem, row)`` for reads performed during
    cycle ``c``; ``sample_reads[c]`` holds the reads made while recomputing
    observed wires after the commit of cycle ``c``. ``reg_writes[c]`` maps a
    register to the mask of bits committed at the end of ``c`` and
    ``mem_writes[c]`` lists committed ``(mem, row)`` pairs.
    """

    executed: np.ndarray  # (n_cycles, n_statements) bool
    mem_reads: tuple[tuple[tuple[int, int, int], ...], ...] = ()
    sample_reads: tuple[tuple[tuple[int, int, int], ...], ...] = ()
    reg_writes: tuple[Mapping[int, int], ...] = ()
    mem_writes: tuple[frozenset[tuple[int, int]], ...] = ()

    @property
    def n_cycles(self) -> int:
        return int(self.executed.shape[0])

    def executed_at(self, cycle: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.executed[cycle]).tolist())


@dataclass(frozen=True)
class SimState:
    registers: Mapping[int, int]
    memories: Mapping[int, tuple[int, ...]]
    wires: Mapping[int, int] = field(default_factory=dict)

    @classmethod
    def initial(cls, design: ElaboratedDesign) -> "SimState":
        regs = {s.id: 0 for s in design.signals if s.kind is SignalKind.REG}
        mems = {s.id: (0,) * s.depth for s in design.signals if s.kind is SignalKind.MEMORY}
        return cls(regs, mems, {})


@dataclass(frozen=True)
class CycleResult:
    next_state: SimState
    executed: frozenset[int]
    wires: Mapping[int, int]


def _check_observation(design: ElaboratedDesign, observation) -> tuple[int, ...]:
    obs = []
    for sig in observation:
        if isinstance(sig, str):
            if sig not in design.names:
                raise UnknownObservationSignal(f"unknown observation signal '{sig}'")
            sig = design.names[sig]
        if not 0 <= sig < len(design.signals):
            raise UnknownObservationSignal(f"unknown observation signal id {sig}")
        if design.signals[sig].kind is SignalKind.MEMORY:
            raise UnknownObservationSignal(
                f"memory '{design.signals[sig].name}' cannot be observed directly"
            )
        obs.append(sig)
    return tuple(sorted(set(obs)))


def _commit(V, N, W, strict: bool):
    """Apply nonblocking writes; return committed memory rows."""
    for sig, (value, mask) in N.items():
        V[sig] = (V[sig] & ~mask) | value
    rows = []
    for mem, row, value in W:
        data = V[mem]
        if row < len(data):
            data[row] = value
            rows.append((mem, row))
        elif strict:
            raise OutOfRange(mem, row)
    return rows


def simulate_golden(
    design: ElaboratedDesign, stimulus: Stimulus, observation
) -> tuple[GoldenTrace, CoverageTrace]:
    """Fault-free run producing the observation and coverage traces."""
    stimulus.check(design)
    obs = _check_observation(design, observation)
    eng = compile_design(design)
    _, cone_golden, _ = eng.cone(design, obs)
    assign_ids = [a.id for a in design.assigns]
    n_stmt = len(design.statements)

    V = initial_values(design)
    executed = np.zeros((stimulus.n_cycles, n_stmt), dtype=bool)
    if assign_ids:
        executed[:, assign_ids] = True
    values = np.zeros((stimulus.n_cycles, len(obs)), dtype=np.uint64)
    mem_reads, sample_reads, reg_writes, mem_writes = [], [], [], []
    inputs = stimulus.inputs

    for c, row in enumerate(stimulus.rows()):
        for sig, v in zip(inputs, row):
            V[sig] = v
        L: list = []
        C: list = []
        N: dict = {}
        W: list = []
        LB: list = []
        try:
            eng.comb_golden(V, L)
            eng.seq_golden(V, N, W, C, L)
            rows = _commit(V, N, W, strict=True)
            cone_golden(V, LB)
        except OutOfRange as exc:
            raise MemoryIndexOutOfRange(design.signals[exc.mem].name, exc.index, c) from None
        if C:
            executed[c, C] = True
        mem_reads.append(tuple(L))
        sample_reads.append(tuple(LB))
        reg_writes.append({sig: mask for sig, (_, mask) in sorted(N.items())})
        mem_writes.append(frozenset(rows))
        for j, sig in enumerate(obs):
            values[c, j] = V[sig]

    golden = GoldenTrace(obs, values)
    coverage = CoverageTrace(
        executed,
        tuple(mem_reads),
        tuple(sample_reads),
        tuple(reg_writes),
        tuple(mem_writes),
    )
    return golden, coverage


def evaluate_cycle(design: ElaboratedDesign, state: SimState, inputs: Mapping[str | int, int]) -> CycleResult:
    """Advance one clock cycle from ``state`` (which is not modified)."""
    eng = compile_design(design)
    V = initial_values(design)
    for sig, v in state.registers.items():
        V[sig] = v
    for sig, rows in state.memories.items():
        V[sig] = list(rows)
    stim = Stimulus.from_rows(design, [inputs])
    for sig, v in zip(stim.inputs, stim.rows()[0]):
        V[sig] = v
    L: list = []
    C: list = []
    N: dict = {}
    W: list = []
    try:
        eng.comb_golden(V, L)
        wires = {
            s.id: V[s.id] for s in design.signals if s.kind in (SignalKind.WIRE, SignalKind.OUTPUT)
        }
        eng.seq_golden(V, N, W, C, L)
        _commit(V, N, W, strict=True)
        eng.comb_golden(V, [])
    except OutOfRange as exc:
        raise MemoryIndexOutOfRange(design.signals[exc.mem].name, exc.index, None) from None
    executed = frozenset(C) | frozenset(a.id for a in design.assigns)
    next_state = SimState(
        registers={s: V[s] for s in state.registers},
        memories={s: tuple(V[s]) for s in state.memories},
        wires={
            s.id: V[s.id] for s in design.signals if s.kind in (SignalKind.WIRE, SignalKind.OUTPUT)
        },
    )
    return CycleResult(next_state, executed, wires)


def simulate_flip(
    design: ElaboratedDesign,
    input_rows: Sequence[tuple[int, ...]],
    inputs: tuple[int, ...],
    observation: tuple[int, ...],
    golden_rows: Sequence[tuple[int, ...]],
    signal: int,
    row: int,
    bit: int,
    cycle: int,
    persistent: bool,
) -> int | None:
    """Re-simulate with one stored bit flipped; return the first mismatch cycle.

    The flip is applied at the start of ``cycle``. Without ``persistent`` the
    original bit is restored at the end of that cycle unless the commit wrote
    it. Simulation stops at the first cycle whose observation sample differs
    from ``golden_rows``.
    """
    eng = compile_design(design)
    comb, seq = eng.comb, eng.seq
    cone, _, _ = eng.cone(design, observation)
    V = initial_values(design)
    flip = 1 << bit
    is_mem = design.signals[signal].kind is SignalKind.MEMORY
    for c, in_row in enumerate(input_rows):
        for sig, v in zip(inputs, in_row):
            V[sig] = v
        if c == cycle:
            if is_mem:
                V[signal][row] ^= flip
            else:
                V[signal] ^= flip
        comb(V)
        N: dict = {}
        W: list = []
        seq(V, N, W)
        rows = _commit(V, N, W, strict=False)
        if c == cycle and not persistent:
            if is_mem:
                if (signal, row) not in rows:
                    V[signal][row] ^= flip
            else:
                written = N.get(signal)
                if written is None or not written[1] & flip:
                    V[signal] ^= flip
        cone(V)
        sample = tuple([V[o] for o in observation])
        if sample != golden_rows[c]:
            return c
    return None
