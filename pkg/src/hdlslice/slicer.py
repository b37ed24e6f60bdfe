"""Per-cycle dynamic slices and pruned fault lists.

A fault is one stored bit ``(signal, row, bit)`` flipped at the start of one
clock ``cycle``. The prune modes trade list size for how much of the golden
run they consult:

``Exhaustive``
    every bit of every selected register or memory row, every cycle.
``StaticPrune``
    keep a signal iff it belongs to the static slice (cycle independent).
``DynamicPrune``
    keep ``(r, t)`` iff some statement in the dynamic slice of cycle ``t``
    reads ``r``. Sound for transient flips, which only live for one cycle.
``DynamicLivePrune``
    keep ``(r, t)`` iff the flipped bit is read by a slice statement (or
    sampled as an observation) before the golden run overwrites it. Sound for
    persistent flips.

Memory rows are pruned with the golden run's concrete read/write addresses
when ``refine_memory`` is set, otherwise at whole-memory granularity.
"""

from __future__ import annotations

import csv
import enum
import fnmatch
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO

import numpy as np

from .depgraph import StaticSlice
from .errors import ModeRequiresDynamicSlice, NoMatchingTargets
from .frontend.ir import ElaboratedDesign, SignalDecl, SignalKind
from .sim.codegen import observation_cone
from .sim.engine import CoverageTrace


class PruneMode(str, enum.Enum):
    EXHAUSTIVE = "Exhaustive"
    STATIC = "StaticPrune"
    DYNAMIC = "DynamicPrune"
    DYNAMIC_LIVE = "DynamicLivePrune"


class Semantics(str, enum.Enum):
    TRANSIENT = "Transient"
    PERSISTENT = "Persistent"


DEFAULT_SEMANTICS = {
    PruneMode.EXHAUSTIVE: Semantics.TRANSIENT,
    PruneMode.STATIC: Semantics.TRANSIENT,
    PruneMode.DYNAMIC: Semantics.TRANSIENT,
    PruneMode.DYNAMIC_LIVE: Semantics.PERSISTENT,
}


class FaultDescriptor(NamedTuple):
    signal: int
    row: int
    bit: int
    cycle: int
    semantics: Semantics = Semantics.TRANSIENT


@dataclass(frozen=True)
class FaultList:
    mode: PruneMode
    semantics: Semantics
    faults: tuple[FaultDescriptor, ...]
    universe_size: int
    targets: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.faults)

    def __iter__(self):
        return iter(self.faults)

    @property
    def prune_ratio(self) -> float:
        return len(self.faults) / self.universe_size if self.universe_size else 0.0


@dataclass(frozen=True)
class DynamicSliceSeries:
    statements: np.ndarray  # (n_cycles, n_statements) bool

    @property
    def n_cycles(self) -> int:
        return int(self.statements.shape[0])

    def slice_at(self, cycle: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.statements[cycle]).tolist())


def statement_mask(ids: Iterable[int], n_statements: int) -> np.ndarray:
    mask = np.zeros(n_statements, dtype=bool)
    ids = list(ids)
    if ids:
        mask[ids] = True
    return mask


def dynamic_slice(static: StaticSlice, coverage: CoverageTrace) -> DynamicSliceSeries:
    """``slice(c) = static ∩ executed(c)`` for every cycle."""
    n_statements = coverage.executed.shape[1]
    return DynamicSliceSeries(coverage.executed & statement_mask(static.statements, n_statements))


# -- target selection ----------------------------------------------------------


def select_targets(design: ElaboratedDesign, target_spec: str | Iterable[str] = "all") -> tuple[SignalDecl, ...]:
    """Registers and memories matching ``target_spec``.

    ``target_spec`` is ``"all"`` or a comma separated list of glob patterns;
    trailing ``[]`` suffixes are ignored so ``mem[][]`` selects ``mem``.
    """
    if isinstance(target_spec, str):
        patterns = [p.strip() for p in target_spec.split(",") if p.strip()]
    else:
        patterns = [p.strip() for p in target_spec]
    storage = design.storage
    if any(p.lower() == "all" for p in patterns):
        chosen = storage
    else:
        cleaned = []
        for p in patterns:
            while p.endswith("[]"):
                p = p[:-2]
            cleaned.append(p)
        chosen = tuple(s for s in storage if any(fnmatch.fnmatchcase(s.name, p) for p in cleaned))
    if not chosen:
        raise NoMatchingTargets(f"no register or memory matches target '{target_spec}'")
    return chosen


def _rows(sig: SignalDecl) -> int:
    return sig.depth if sig.kind is SignalKind.MEMORY else 1


def fault_universe(
    design: ElaboratedDesign,
    n_cycles: int,
    target_spec: str | Iterable[str] = "all",
    semantics: Semantics = Semantics.TRANSIENT,
) -> FaultList:
    targets = select_targets(design, target_spec)
    semantics = Semantics(semantics)
    faults = [
        FaultDescriptor(sig.id, row, bit, cycle, semantics)
        for sig in targets
        for row in range(_rows(sig))
        for bit in range(sig.width)
        for cycle in range(n_cycles)
    ]
    return FaultList(
        PruneMode.EXHAUSTIVE,
        semantics,
        tuple(faults),
        len(faults),
        tuple(s.id for s in targets),
    )


# -- keep matrices -------------------------------------------------------------
#
# Each helper returns, per target signal, a bool array (n_cycles, rows, width)
# of faults to keep.


def _use_matrix(design: ElaboratedDesign) -> np.ndarray:
    use = np.zeros((len(design.statements), len(design.signals)), dtype=bool)
    for sid, du in enumerate(design.defuse):
        if du.uses:
            use[sid, list(du.uses)] = True
    return use


def _slice_reads(design: ElaboratedDesign, dyn: DynamicSliceSeries) -> np.ndarray:
    """(n_cycles, n_signals): signal read by some dynamic-slice statement."""
    return (dyn.statements.astype(np.int32) @ _use_matrix(design).astype(np.int32)) > 0


def _row_reads(reads_per_cycle, signal: int, depth: int, n_cycles: int, in_slice) -> np.ndarray:
    out = np.zeros((n_cycles, depth), dtype=bool)
    for c in range(n_cycles):
        for stmt, mem, row in reads_per_cycle[c]:
            if mem == signal and in_slice(c, stmt):
                out[c, row] = True
    return out


def _transient_keep(design, sig, static, dyn, coverage, refine_memory, slice_reads) -> np.ndarray:
    n_cycles = dyn.n_cycles
    read = slice_reads[:, sig.id]
    if sig.kind is SignalKind.MEMORY and refine_memory:
        rows = _row_reads(
            coverage.mem_reads, sig.id, sig.depth, n_cycles, lambda c, s: dyn.statements[c, s]
        )
    else:
        rows = np.repeat(read[:, None], _rows(sig), axis=1)
    return np.repeat(rows[:, :, None], sig.width, axis=2)


def _persistent_keep(design, sig, static, dyn, coverage, refine_memory, slice_reads) -> np.ndarray:
    n_cycles = dyn.n_cycles
    n_rows = _rows(sig)
    width = sig.width

    # reads during the cycle (start-of-cycle values)
    if sig.kind is SignalKind.MEMORY and refine_memory:
        during = _row_reads(
            coverage.mem_reads, sig.id, sig.depth, n_cycles, lambda c, s: dyn.statements[c, s]
        )
    else:
        during = np.repeat(slice_reads[:, sig.id][:, None], n_rows, axis=1)

    # reads after the commit, when the observation is sampled
    cone = observation_cone(design, static.criterion)
    if sig.kind is SignalKind.MEMORY and refine_memory:
        cone_ids = {a.id for a in cone}
        after = _row_reads(
            coverage.sample_reads, sig.id, sig.depth, n_cycles, lambda c, s: s in cone_ids
        )
    else:
        sampled = sig.id in static.criterion or any(
            sig.id in design.defuse[a.id].uses for a in cone
        )
        after = np.full((n_cycles, n_rows), sampled, dtype=bool)

    # committed overwrites, per bit
    killed = np.zeros((n_cycles, n_rows, width), dtype=bool)
    bits = 1 << np.arange(width, dtype=np.uint64)
    for c in range(n_cycles):
        if sig.kind is SignalKind.MEMORY:
            for mem, row in coverage.mem_writes[c]:
                if mem == sig.id:
                    killed[c, row, :] = True
        else:
            mask = coverage.reg_writes[c].get(sig.id)
            if mask:
                killed[c, 0, :] = (np.uint64(mask) & bits) != 0

    # live(t) = during(t) or (not killed(t) and (after(t) or live(t+1)))
    keep = np.zeros((n_cycles, n_rows, width), dtype=bool)
    live_next = np.zeros((n_rows, width), dtype=bool)
    for c in range(n_cycles - 1, -1, -1):
        live = during[c][:, None] | (~killed[c] & (after[c][:, None] | live_next))
        keep[c] = live
        live_next = live
    return keep


def generate_fault_list(
    design: ElaboratedDesign,
    static: StaticSlice | None,
    dyn: DynamicSliceSeries | None,
    coverage: CoverageTrace | None,
    n_cycles: int,
    mode: PruneMode | str,
    target_spec: str | Iterable[str] = "all",
    semantics: Semantics | str | None = None,
    refine_memory: bool = True,
) -> FaultList:
    """Fault list for ``mode``, sorted by ``(signal, row, bit, cycle)``."""
    mode = PruneMode(mode)
    semantics = Semantics(semantics) if semantics is not None else DEFAULT_SEMANTICS[mode]
    universe = fault_universe(design, n_cycles, target_spec, semantics)
    targets = [design.signals[s] for s in universe.targets]

    if mode is PruneMode.EXHAUSTIVE:
        return universe
    if static is None:
        raise ModeRequiresDynamicSlice(f"{mode.value} needs a static slice")
    if mode is PruneMode.STATIC:
        faults = tuple(f for f in universe.faults if f.signal in static.registers)
        return FaultList(mode, semantics, faults, universe.universe_size, universe.targets)

    if dyn is None or coverage is None:
        raise ModeRequiresDynamicSlice(f"{mode.value} needs a dynamic slice and coverage trace")
    if dyn.n_cycles != n_cycles:
        raise ModeRequiresDynamicSlice(
            f"dynamic slice covers {dyn.n_cycles} cycles, fault horizon is {n_cycles}"
        )
    keep_fn = _transient_keep if mode is PruneMode.DYNAMIC else _persistent_keep
    slice_reads = _slice_reads(design, dyn)
    faults: list[FaultDescriptor] = []
    for sig in targets:
        if sig.id not in static.registers:
            continue
        keep = keep_fn(design, sig, static, dyn, coverage, refine_memory, slice_reads)
        # reorder to (row, bit, cycle) so enumeration matches the sort key
        for row, bit, cycle in np.argwhere(keep.transpose(1, 2, 0)):
            faults.append(FaultDescriptor(sig.id, int(row), int(bit), int(cycle), semantics))
    return FaultList(mode, semantics, tuple(faults), universe.universe_size, universe.targets)


# -- CSV -----------------------------------------------------------------------

FAULT_FIELDS = ("signal", "row", "bit", "cycle", "mode", "semantics")


def write_fault_list(design: ElaboratedDesign, faults: FaultList, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FAULT_FIELDS)
    for f in faults.faults:
        w.writerow(
            [design.signals[f.signal].name, f.row, f.bit, f.cycle, faults.mode.value, f.semantics.value]
        )


def read_fault_list(
    design: ElaboratedDesign, f: TextIO, universe_size: int | None = None
) -> FaultList:
    reader = csv.DictReader(f)
    if tuple(reader.fieldnames or ()) != FAULT_FIELDS:
        raise ValueError(f"fault list header must be {','.join(FAULT_FIELDS)}")
    faults = []
    mode = PruneMode.EXHAUSTIVE
    semantics = Semantics.TRANSIENT
    for rec in reader:
        mode = PruneMode(rec["mode"])
        semantics = Semantics(rec["semantics"])
        faults.append(
            FaultDescriptor(
                design.signal_id(rec["signal"]),
                int(rec["row"]),
                int(rec["bit"]),
                int(rec["cycle"]),
                semantics,
            )
        )
    faults.sort()
    targets = tuple(sorted({f.signal for f in faults}))
    size = universe_size if universe_size is not None else len(faults)
    return FaultList(mode, semantics, tuple(faults), size, targets)
