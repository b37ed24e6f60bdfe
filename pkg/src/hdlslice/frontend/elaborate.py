"""Width resolution, legality checks and def/use tables."""

from __future__ import annotations

import dataclasses
import graphlib
import heapq

from ..errors import (
    CombinationalLoop,
    ElaborationError,
    IllegalAssignment,
    MultipleDrivers,
    UndrivenOutput,
    WidthMismatch,
)
from .ir import (
    ASSIGN_KINDS,
    Binary,
    BitSelect,
    Block,
    Case,
    CaseItem,
    Concat,
    Const,
    ContinuousAssign,
    DefUse,
    Design,
    ElaboratedDesign,
    Expr,
    If,
    Index,
    NonBlockingAssign,
    Process,
    Ref,
    SignalKind,
    Statement,
    Target,
    Ternary,
    Unary,
    signals_read,
    statement_exprs,
    walk,
)
from .parser import MAX_WIDTH

_COMPARE_OPS = frozenset({"==", "!=", "<", "<=", ">", ">=", "&&", "||"})


def def_use(stmt: Statement) -> DefUse:
    """Signals written and read by ``stmt`` itself.

    Headers (``if``/``case``) define nothing and use their condition; a
    memory write defines the memory and uses the index and value signals.
    """
    uses: set[int] = set()
    for expr in statement_exprs(stmt):
        uses |= signals_read(expr)
    if isinstance(stmt, ASSIGN_KINDS):
        return DefUse(frozenset({stmt.target.signal}), frozenset(uses))
    return DefUse(frozenset(), frozenset(uses))


class _Elaborator:
    def __init__(self, design: Design):
        self.design = design
        self.signals = design.signals
        self.statements: list[Statement | None] = [None] * len(design.statements)

    def sig_name(self, sid: int) -> str:
        return self.signals[sid].name

    def expr(self, e: Expr, loc) -> Expr:
        if isinstance(e, Const):
            return e
        if isinstance(e, Ref):
            sig = self.signals[e.signal]
            if sig.kind is SignalKind.MEMORY:
                raise ElaborationError(f"memory '{sig.name}' must be indexed", loc)
            return dataclasses.replace(e, width=sig.width)
        if isinstance(e, Index):
            sig = self.signals[e.signal]
            index = self.expr(e.index, loc)
            if isinstance(index, Const) and index.value >= sig.depth:
                raise ElaborationError(
                    f"constant index {index.value} out of range for '{sig.name}'", loc
                )
            return Index(e.signal, index, sig.width)
        if isinstance(e, BitSelect):
            base = self.expr(e.base, loc)
            if e.msb < e.lsb or e.msb >= base.width:
                raise WidthMismatch(
                    f"bit select [{e.msb}:{e.lsb}] outside width {base.width}", loc
                )
            return BitSelect(base, e.msb, e.lsb, e.msb - e.lsb + 1)
        if isinstance(e, Unary):
            operand = self.expr(e.operand, loc)
            width = 1 if e.op == "!" else operand.width
            return Unary(e.op, operand, width)
        if isinstance(e, Binary):
            left = self.expr(e.left, loc)
            right = self.expr(e.right, loc)
            if e.op in _COMPARE_OPS:
                width = 1
            elif e.op in ("<<", ">>"):
                width = left.width
            else:
                width = max(left.width, right.width)
            return Binary(e.op, left, right, width)
        if isinstance(e, Ternary):
            cond = self.expr(e.cond, loc)
            then = self.expr(e.then, loc)
            otherwise = self.expr(e.otherwise, loc)
            return Ternary(cond, then, otherwise, max(then.width, otherwise.width))
        if isinstance(e, Concat):
            parts = tuple(self.expr(p, loc) for p in e.parts)
            for p in parts:
                if isinstance(p, Const) and not p.sized:
                    raise WidthMismatch("unsized constant in concatenation", loc)
            width = sum(p.width for p in parts)
            if width > MAX_WIDTH:
                raise WidthMismatch(f"concatenation width {width} exceeds {MAX_WIDTH}", loc)
            return Concat(parts, width)
        raise TypeError(e)  # pragma: no cover

    def target(self, t: Target, loc) -> tuple[Target, int]:
        sig = self.signals[t.signal]
        if t.index is not None:
            index = self.expr(t.index, loc)
            if isinstance(index, Const) and index.value >= sig.depth:
                raise ElaborationError(
                    f"constant index {index.value} out of range for '{sig.name}'", loc
                )
            return dataclasses.replace(t, index=index), sig.width
        if t.is_partial:
            if t.msb < t.lsb or t.msb >= sig.width:
                raise WidthMismatch(
                    f"part select [{t.msb}:{t.lsb}] outside width {sig.width} of '{sig.name}'",
                    loc,
                )
            return t, t.msb - t.lsb + 1
        return t, sig.width

    def assign_like(self, stmt, cls):
        target, width = self.target(stmt.target, stmt.loc)
        rhs = self.expr(stmt.rhs, stmt.loc)
        if rhs.width > width:
            raise WidthMismatch(
                f"{rhs.width}-bit value assigned to {width}-bit target "
                f"'{self.sig_name(target.signal)}'",
                stmt.loc,
            )
        return cls(stmt.id, stmt.loc, target, rhs)

    def statement(self, stmt: Statement | None) -> Statement | None:
        if stmt is None:
            return None
        if isinstance(stmt, NonBlockingAssign):
            sig = self.signals[stmt.target.signal]
            if sig.kind not in (SignalKind.REG, SignalKind.MEMORY):
                raise IllegalAssignment(
                    f"'<=' to {sig.kind.value} '{sig.name}'; only regs and memories "
                    "may be assigned in always blocks",
                    stmt.loc,
                )
            out = self.assign_like(stmt, NonBlockingAssign)
        elif isinstance(stmt, ContinuousAssign):
            sig = self.signals[stmt.target.signal]
            if sig.kind not in (SignalKind.WIRE, SignalKind.OUTPUT):
                raise IllegalAssignment(
                    f"continuous assign to {sig.kind.value} '{sig.name}'", stmt.loc
                )
            if stmt.target.is_partial:
                raise IllegalAssignment(
                    f"partial continuous assign to '{sig.name}' is not supported", stmt.loc
                )
            out = self.assign_like(stmt, ContinuousAssign)
        elif isinstance(stmt, If):
            out = If(
                stmt.id,
                stmt.loc,
                self.expr(stmt.cond, stmt.loc),
                self.statement(stmt.then),
                self.statement(stmt.otherwise),
            )
        elif isinstance(stmt, Case):
            subject = self.expr(stmt.subject, stmt.loc)
            items = []
            for item in stmt.items:
                labels = []
                for lab in item.labels:
                    lab = self.expr(lab, stmt.loc)
                    if not isinstance(lab, Const):
                        raise ElaborationError("case labels must be constants", stmt.loc)
                    if lab.value >= 1 << subject.width:
                        raise WidthMismatch(
                            f"case label {lab.value} wider than {subject.width}-bit subject",
                            stmt.loc,
                        )
                    labels.append(lab)
                items.append(CaseItem(tuple(labels), self.statement(item.body)))
            out = Case(stmt.id, stmt.loc, subject, tuple(items))
        elif isinstance(stmt, Block):
            out = Block(stmt.id, stmt.loc, tuple(self.statement(s) for s in stmt.body))
        else:  # pragma: no cover
            raise TypeError(stmt)
        self.statements[out.id] = out
        return out

    def run(self) -> ElaboratedDesign:
        d = self.design
        processes = tuple(Process(self.statement(p.body), p.loc) for p in d.processes)
        assigns = tuple(self.statement(a) for a in d.assigns)
        statements = tuple(self.statements)
        defuse = tuple(def_use(s) for s in statements)

        parent: list[int | None] = [None] * len(statements)
        for s in statements:
            for child in s.children:
                parent[child] = s.id

        self.check_drivers(processes, assigns)
        comb_order = self.combinational_order(assigns, defuse)

        return ElaboratedDesign(
            name=d.name,
            ports=d.ports,
            signals=d.signals,
            processes=processes,
            assigns=assigns,
            statements=statements,
            clock=d.clock,
            defuse=defuse,
            parent=tuple(parent),
            comb_order=comb_order,
            source=d.source,
        )

    def check_drivers(self, processes, assigns) -> None:
        assign_driver: dict[int, ContinuousAssign] = {}
        for a in assigns:
            sid = a.target.signal
            if sid in assign_driver:
                raise MultipleDrivers(self.sig_name(sid), a.loc)
            assign_driver[sid] = a
        process_driver: dict[int, int] = {}
        for pi, proc in enumerate(processes):
            for stmt in walk(proc.body):
                if isinstance(stmt, NonBlockingAssign):
                    sid = stmt.target.signal
                    if process_driver.setdefault(sid, pi) != pi:
                        raise MultipleDrivers(self.sig_name(sid), stmt.loc)
        for sig in self.signals:
            if sig.port and sig.kind is not SignalKind.INPUT:
                if sig.id not in assign_driver and sig.id not in process_driver:
                    raise UndrivenOutput(f"output '{sig.name}' is never driven", sig.loc)

    def combinational_order(self, assigns, defuse) -> tuple[int, ...]:
        driver = {a.target.signal: a.id for a in assigns}
        sorter: graphlib.TopologicalSorter = graphlib.TopologicalSorter()
        for a in assigns:
            deps = [driver[u] for u in sorted(defuse[a.id].uses) if u in driver]
            sorter.add(a.id, *deps)
        try:
            sorter.prepare()
        except graphlib.CycleError as exc:
            stmt_cycle = exc.args[1]
            names = [self.sig_name(self.statements[s].target.signal) for s in stmt_cycle]
            raise CombinationalLoop(names, self.statements[stmt_cycle[0]].loc) from None
        return _source_ordered_topological(assigns, driver, defuse)


def _source_ordered_topological(assigns, driver, defuse) -> tuple[int, ...]:
    """Kahn's algorithm, always picking the lowest ready statement id."""
    deps = {a.id: {driver[u] for u in defuse[a.id].uses if u in driver} for a in assigns}
    users: dict[int, list[int]] = {a.id: [] for a in assigns}
    for sid, ds in deps.items():
        for d in ds:
            users[d].append(sid)
    pending = {sid: len(ds) for sid, ds in deps.items()}
    ready = [sid for sid, n in pending.items() if n == 0]
    heapq.heapify(ready)
    out: list[int] = []
    while ready:
        sid = heapq.heappop(ready)
        out.append(sid)
        for user in users[sid]:
            pending[user] -= 1
            if pending[user] == 0:
                heapq.heappush(ready, user)
    return tuple(out)


def elaborate(design: Design) -> ElaboratedDesign:
    """Resolve widths, check legality and build the def/use table."""
    return _Elaborator(design).run()


def load_design(source_text: str) -> ElaboratedDesign:
    """Parse and elaborate in one step."""
    from .parser import parse_design

    return elaborate(parse_design(source_text))
