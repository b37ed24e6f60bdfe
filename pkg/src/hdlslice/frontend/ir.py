"""Immutable IR for MiniRTL designs.

Signals and statements carry dense integer ids. Statement ids are assigned
in source (pre-order) order, so identical text always yields identical ids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union

from ..errors import SourceLoc


class SignalKind(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    WIRE = "wire"
    REG = "reg"
    MEMORY = "memory"


STORAGE_KINDS = frozenset({SignalKind.REG, SignalKind.MEMORY})


@dataclass(frozen=True)
class SignalDecl:
    id: int
    name: str
    kind: SignalKind
    width: int
    depth: int
    loc: SourceLoc
    port: bool = False

    @property
    def is_storage(self) -> bool:
        return self.kind in STORAGE_KINDS

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1


# -- expressions --------------------------------------------------------------
#
# ``width`` is 0 straight out of the parser and filled in by elaboration.


@dataclass(frozen=True)
class Const:
    value: int
    width: int
    sized: bool = True


@dataclass(frozen=True)
class Ref:
    signal: int
    width: int = 0


@dataclass(frozen=True)
class Index:
    """Memory row read ``mem[index]``."""

    signal: int
    index: "Expr"
    width: int = 0


@dataclass(frozen=True)
class BitSelect:
    """Constant bit or part select ``base[msb:lsb]`` of a Ref or Index."""

    base: "Expr"
    msb: int
    lsb: int
    width: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    width: int = 0


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    width: int = 0


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    otherwise: "Expr"
    width: int = 0


@dataclass(frozen=True)
class Concat:
    parts: tuple["Expr", ...]
    width: int = 0


Expr = Union[Const, Ref, Index, BitSelect, Unary, Binary, Ternary, Concat]


def subexpressions(expr: Expr) -> Iterator[Expr]:
    """Yield ``expr`` and all nested expressions, pre-order."""
    yield expr
    if isinstance(expr, Index):
        yield from subexpressions(expr.index)
    elif isinstance(expr, BitSelect):
        yield from subexpressions(expr.base)
    elif isinstance(expr, Unary):
        yield from subexpressions(expr.operand)
    elif isinstance(expr, Binary):
        yield from subexpressions(expr.left)
        yield from subexpressions(expr.right)
    elif isinstance(expr, Ternary):
        yield from subexpressions(expr.cond)
        yield from subexpressions(expr.then)
        yield from subexpressions(expr.otherwise)
    elif isinstance(expr, Concat):
        for part in expr.parts:
            yield from subexpressions(part)


def signals_read(expr: Expr) -> frozenset[int]:
    out = set()
    for e in subexpressions(expr):
        if isinstance(e, (Ref, Index)):
            out.add(e.signal)
    return frozenset(out)


# -- statements ---------------------------------------------------------------


class StatementKind(enum.Enum):
    NONBLOCKING_ASSIGN = "nonblocking"
    CONTINUOUS_ASSIGN = "continuous"
    IF = "if"
    CASE = "case"
    BLOCK = "block"


@dataclass(frozen=True)
class Target:
    """Assignment destination: whole signal, memory row, or constant part select."""

    signal: int
    index: Expr | None = None
    msb: int | None = None
    lsb: int | None = None

    @property
    def is_partial(self) -> bool:
        return self.msb is not None


@dataclass(frozen=True)
class NonBlockingAssign:
    id: int
    loc: SourceLoc
    target: Target
    rhs: Expr

    kind = StatementKind.NONBLOCKING_ASSIGN

    @property
    def children(self) -> tuple[int, ...]:
        return ()


@dataclass(frozen=True)
class ContinuousAssign:
    id: int
    loc: SourceLoc
    target: Target
    rhs: Expr

    kind = StatementKind.CONTINUOUS_ASSIGN

    @property
    def children(self) -> tuple[int, ...]:
        return ()


@dataclass(frozen=True)
class If:
    id: int
    loc: SourceLoc
    cond: Expr
    then: "Statement | None"
    otherwise: "Statement | None" = None

    kind = StatementKind.IF

    @property
    def children(self) -> tuple[int, ...]:
        return tuple(s.id for s in (self.then, self.otherwise) if s is not None)


@dataclass(frozen=True)
class CaseItem:
    labels: tuple[Expr, ...]  # empty tuple marks ``default``
    body: "Statement | None"

    @property
    def is_default(self) -> bool:
        return not self.labels


@dataclass(frozen=True)
class Case:
    id: int
    loc: SourceLoc
    subject: Expr
    items: tuple[CaseItem, ...]

    kind = StatementKind.CASE

    @property
    def children(self) -> tuple[int, ...]:
        return tuple(item.body.id for item in self.items if item.body is not None)


@dataclass(frozen=True)
class Block:
    id: int
    loc: SourceLoc
    body: tuple["Statement", ...]

    kind = StatementKind.BLOCK

    @property
    def children(self) -> tuple[int, ...]:
        return tuple(s.id for s in self.body)


Statement = Union[NonBlockingAssign, ContinuousAssign, If, Case, Block]
ASSIGN_KINDS = (NonBlockingAssign, ContinuousAssign)
HEADER_KINDS = (If, Case)


def walk(stmt: Statement | None) -> Iterator[Statement]:
    """Pre-order traversal of a statement tree."""
    if stmt is None:
        return
    yield stmt
    if isinstance(stmt, If):
        yield from walk(stmt.then)
        yield from walk(stmt.otherwise)
    elif isinstance(stmt, Case):
        for item in stmt.items:
            yield from walk(item.body)
    elif isinstance(stmt, Block):
        for s in stmt.body:
            yield from walk(s)


def statement_exprs(stmt: Statement) -> tuple[Expr, ...]:
    """Expressions evaluated by ``stmt`` itself (not by its children)."""
    if isinstance(stmt, ASSIGN_KINDS):
        if stmt.target.index is not None:
            return (stmt.target.index, stmt.rhs)
        return (stmt.rhs,)
    if isinstance(stmt, If):
        return (stmt.cond,)
    if isinstance(stmt, Case):
        return (stmt.subject,) + tuple(lab for item in stmt.items for lab in item.labels)
    return ()


@dataclass(frozen=True)
class Process:
    """An ``always @(posedge clk)`` block."""

    body: Statement
    loc: SourceLoc


@dataclass(frozen=True)
class Design:
    """Parsed (name-resolved) design. Produced by :func:`parse_design`."""

    name: str
    ports: tuple[str, ...]
    signals: tuple[SignalDecl, ...]
    processes: tuple[Process, ...]
    assigns: tuple[ContinuousAssign, ...]
    statements: tuple[Statement, ...]
    clock: int | None
    source: str = field(default="", repr=False, compare=False)

    def signal(self, name: str) -> SignalDecl:
        for sig in self.signals:
            if sig.name == name:
                return sig
        raise KeyError(name)

    def signal_id(self, name: str) -> int:
        return self.signal(name).id

    @property
    def names(self) -> dict[str, int]:
        return {s.name: s.id for s in self.signals}

    def source_line(self, line: int) -> str:
        lines = self.source.splitlines()
        if 1 <= line <= len(lines):
            return lines[line - 1].strip()
        return ""


@dataclass(frozen=True)
class DefUse:
    defs: frozenset[int]
    uses: frozenset[int]

    def __iter__(self):
        return iter((self.defs, self.uses))


@dataclass
class ElaboratedDesign:
    """Width-annotated design plus the tables slicing and simulation need."""

    name: str
    ports: tuple[str, ...]
    signals: tuple[SignalDecl, ...]
    processes: tuple[Process, ...]
    assigns: tuple[ContinuousAssign, ...]
    statements: tuple[Statement, ...]
    clock: int | None
    defuse: tuple[DefUse, ...]
    parent: tuple[int | None, ...]
    comb_order: tuple[int, ...]
    source: str = field(default="", repr=False)
    _engine: object = field(default=None, init=False, repr=False, compare=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_engine"] = None
        return state

    signal = Design.signal
    signal_id = Design.signal_id
    names = Design.names
    source_line = Design.source_line

    @property
    def inputs(self) -> tuple[SignalDecl, ...]:
        """Stimulus-driven inputs (the clock is implicit and excluded)."""
        return tuple(
            s for s in self.signals if s.kind is SignalKind.INPUT and s.id != self.clock
        )

    @property
    def storage(self) -> tuple[SignalDecl, ...]:
        return tuple(s for s in self.signals if s.is_storage)

    @property
    def sliceable(self) -> tuple[int, ...]:
        """Statement ids that can appear in slices (everything but blocks)."""
        return tuple(s.id for s in self.statements if not isinstance(s, Block))

    def defs_of(self, signal: int) -> tuple[int, ...]:
        return tuple(i for i, du in enumerate(self.defuse) if signal in du.defs)

    def uses_of(self, signal: int) -> tuple[int, ...]:
        return tuple(i for i, du in enumerate(self.defuse) if signal in du.uses)
