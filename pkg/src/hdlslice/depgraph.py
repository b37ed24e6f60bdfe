"""Program dependence graph over MiniRTL statements and backward static slices.

Nodes are every assignment and every ``if``/``case`` header; ``begin``/``end``
blocks are transparent. Data edges connect a definition to every use of the
same signal (across clock cycles for registers, within a cycle for wires).
Control edges connect a header to every statement nested under it.
Memories are handled as whole signals.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import EmptyCriterion, UnknownObservationSignal
from .frontend.ir import Block, ElaboratedDesign, SignalKind


class EdgeKind(enum.Enum):
    DATA = "data"
    CONTROL = "control"


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    kind: EdgeKind


@dataclass(frozen=True)
class Pdg:
    nodes: frozenset[int]
    edges: frozenset[Edge]
    defined_by: dict[int, frozenset[int]]
    used_by: dict[int, frozenset[int]]

    def predecessors(self) -> dict[int, tuple[int, ...]]:
        preds: dict[int, list[int]] = {n: [] for n in self.nodes}
        for e in self.edges:
            preds[e.dst].append(e.src)
        return {n: tuple(sorted(set(p))) for n, p in preds.items()}

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind.value))


@dataclass(frozen=True)
class StaticSlice:
    criterion: frozenset[int]
    statements: frozenset[int]
    registers: frozenset[int]


def build_pdg(design: ElaboratedDesign) -> Pdg:
    nodes = frozenset(s.id for s in design.statements if not isinstance(s, Block))
    defined_by: dict[int, set[int]] = {s.id: set() for s in design.signals}
    used_by: dict[int, set[int]] = {s.id: set() for s in design.signals}
    for sid in nodes:
        du = design.defuse[sid]
        for sig in du.defs:
            defined_by[sig].add(sid)
        for sig in du.uses:
            used_by[sig].add(sid)

    edges: set[Edge] = set()
    for sig, defs in defined_by.items():
        for a in defs:
            for b in used_by[sig]:
                edges.add(Edge(a, b, EdgeKind.DATA))
    for sid in nodes:
        anc = design.parent[sid]
        while anc is not None:
            if not isinstance(design.statements[anc], Block):
                edges.add(Edge(anc, sid, EdgeKind.CONTROL))
            anc = design.parent[anc]

    return Pdg(
        nodes=nodes,
        edges=frozenset(edges),
        defined_by={k: frozenset(v) for k, v in defined_by.items()},
        used_by={k: frozenset(v) for k, v in used_by.items()},
    )


def resolve_observation(design: ElaboratedDesign, observation: Iterable[int | str]) -> frozenset[int]:
    """Map names or ids to signal ids, rejecting unknown entries."""
    names = design.names
    out = set()
    for item in observation:
        if isinstance(item, str):
            if item not in names:
                raise UnknownObservationSignal(f"unknown observation signal '{item}'")
            out.add(names[item])
        else:
            if not 0 <= item < len(design.signals):
                raise UnknownObservationSignal(f"unknown observation signal id {item}")
            out.add(int(item))
    return frozenset(out)


def static_slice(pdg: Pdg, design: ElaboratedDesign, observation: Iterable[int | str]) -> StaticSlice:
    """Backward closure over data and control edges from the criterion's definitions."""
    criterion = resolve_observation(design, observation)
    if not criterion:
        raise EmptyCriterion("observation list is empty")
    for sig in criterion:
        if design.signals[sig].kind is SignalKind.MEMORY:
            raise UnknownObservationSignal(
                f"memory '{design.signals[sig].name}' cannot be observed directly"
            )
    seeds = set()
    for sig in criterion:
        seeds |= pdg.defined_by[sig]
    if not seeds:
        names = ", ".join(sorted(design.signals[s].name for s in criterion))
        raise EmptyCriterion(f"no statement defines any of: {names}")

    preds = pdg.predecessors()
    seen = set(seeds)
    queue = deque(sorted(seeds))
    while queue:
        n = queue.popleft()
        for p in preds[n]:
            if p not in seen:
                seen.add(p)
                queue.append(p)

    # an observed register is sampled directly, even if nothing in the slice touches it
    registers = {sig for sig in criterion if design.signals[sig].is_storage}
    for sid in seen:
        du = design.defuse[sid]
        for sig in du.defs | du.uses:
            if design.signals[sig].is_storage:
                registers.add(sig)
    return StaticSlice(criterion, frozenset(seen), frozenset(registers))


def write_edge_list(pdg: Pdg, out: TextIO) -> None:
    """Line-oriented export: one ``<from> <kind> <to>`` triple per line."""
    for e in pdg.sorted_edges():
        out.write(f"{e.src} {e.kind.value} {e.dst}\n")


def read_edge_list(lines: Iterable[str]) -> list[Edge]:
    edges = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        src, kind, dst = line.split()
        edges.append(Edge(int(src), int(dst), EdgeKind(kind)))
    return edges
