"""Compile an elaborated design into Python functions for fast cycle stepping.

All signal values live in one flat list ``V`` indexed by signal id; memories
hold a list of rows. Every design gets two flavours of each function:

* golden: appends executed statement ids to ``C`` and memory reads
  ``(stmt, mem, row)`` to ``L``; out-of-range indices raise.
* fast: no bookkeeping; out-of-range reads return 0 (fault runs may compute
  wild addresses from corrupted state).

Nonblocking writes go to ``N`` (``{signal: (value, written_mask)}``) and
``W`` (``[(mem, row, value)]``) and are committed by the caller.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from ..frontend.ir import (
    Binary,
    BitSelect,
    Block,
    Case,
    Concat,
    Const,
    ContinuousAssign,
    ElaboratedDesign,
    Expr,
    If,
    Index,
    NonBlockingAssign,
    Ref,
    SignalKind,
    Statement,
    Ternary,
    Unary,
)


class OutOfRange(Exception):
    def __init__(self, mem: int, index: int):
        super().__init__(mem, index)
        self.mem = mem
        self.index = index


def _rd(L, sid, mem, rows, index):
    if index >= len(rows):
        raise OutOfRange(mem, index)
    L.append((sid, mem, index))
    return rows[index]


def _shl(value, amount, mask, width):
    return (value << amount) & mask if amount < width else 0


def _pw(N, sig, value, lsb, mask):
    value = (value << lsb) & mask
    old = N.get(sig)
    if old is None:
        N[sig] = (value, mask)
    else:
        N[sig] = ((old[0] & ~mask) | value, old[1] | mask)


_HELPERS = {"_rd": _rd, "_shl": _shl, "_pw": _pw}

_CMP = {"==", "!=", "<", "<=", ">", ">="}


class _Gen:
    def __init__(self, design: ElaboratedDesign, golden: bool):
        self.design = design
        self.golden = golden
        self.tmp = itertools.count()
        self.lines: list[str] = []

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("    " * depth + text)

    def expr(self, e: Expr, sid: int) -> str:
        if isinstance(e, Const):
            return str(e.value)
        if isinstance(e, Ref):
            return f"V[{e.signal}]"
        if isinstance(e, Index):
            depth = self.design.signals[e.signal].depth
            idx = self.expr(e.index, sid)
            if self.golden:
                return f"_rd(L, {sid}, {e.signal}, V[{e.signal}], {idx})"
            k = f"_k{next(self.tmp)}"
            return f"(V[{e.signal}][{k}] if ({k} := {idx}) < {depth} else 0)"
        if isinstance(e, BitSelect):
            base = self.expr(e.base, sid)
            mask = (1 << e.width) - 1
            if e.lsb == 0:
                return f"({base} & {mask})"
            return f"(({base} >> {e.lsb}) & {mask})"
        if isinstance(e, Unary):
            operand = self.expr(e.operand, sid)
            mask = (1 << e.width) - 1
            if e.op == "~":
                return f"({operand} ^ {mask})"
            if e.op == "!":
                return f"(0 if {operand} else 1)"
            return f"(-{operand} & {mask})"
        if isinstance(e, Binary):
            a = self.expr(e.left, sid)
            b = self.expr(e.right, sid)
            mask = (1 << e.width) - 1
            if e.op in ("&", "|", "^"):
                return f"({a} {e.op} {b})"
            if e.op in ("+", "-"):
                return f"(({a} {e.op} {b}) & {mask})"
            if e.op in _CMP:
                return f"(1 if {a} {e.op} {b} else 0)"
            if e.op == "&&":
                return f"(1 if ({a} and {b}) else 0)"
            if e.op == "||":
                return f"(1 if ({a} or {b}) else 0)"
            if e.op == "<<":
                return f"_shl({a}, {b}, {mask}, {e.width})"
            if e.op == ">>":
                return f"({a} >> {b})"
        if isinstance(e, Ternary):
            return f"({self.expr(e.then, sid)} if {self.expr(e.cond, sid)} else {self.expr(e.otherwise, sid)})"
        if isinstance(e, Concat):
            terms = []
            shift = e.width
            for part in e.parts:
                shift -= part.width
                text = self.expr(part, sid)
                terms.append(f"({text} << {shift})" if shift else text)
            return "(" + " | ".join(terms) + ")"
        raise TypeError(e)  # pragma: no cover

    def mark(self, depth: int, sid: int) -> None:
        if self.golden:
            self.emit(depth, f"C.append({sid})")

    def statement(self, s: Statement | None, depth: int) -> None:
        if s is None:
            self.emit(depth, "pass")
            return
        if isinstance(s, Block):
            if not s.body:
                self.emit(depth, "pass")
            for child in s.body:
                self.statement(child, depth)
            return
        self.mark(depth, s.id)
        if isinstance(s, NonBlockingAssign):
            t = s.target
            sig = self.design.signals[t.signal]
            rhs = self.expr(s.rhs, s.id)
            if t.index is not None:
                self.emit(depth, f"W.append(({t.signal}, {self.expr(t.index, s.id)}, {rhs}))")
            elif t.is_partial:
                mask = ((1 << (t.msb - t.lsb + 1)) - 1) << t.lsb
                self.emit(depth, f"_pw(N, {t.signal}, {rhs}, {t.lsb}, {mask})")
            else:
                self.emit(depth, f"N[{t.signal}] = ({rhs}, {sig.mask})")
        elif isinstance(s, If):
            self.emit(depth, f"if {self.expr(s.cond, s.id)}:")
            self.statement(s.then, depth + 1)
            if s.otherwise is not None:
                self.emit(depth, "else:")
                self.statement(s.otherwise, depth + 1)
        elif isinstance(s, Case):
            var = f"_c{s.id}"
            self.emit(depth, f"{var} = {self.expr(s.subject, s.id)}")
            keyword = "if"
            default = None
            for item in s.items:
                if item.is_default:
                    default = item
                    continue
                test = " or ".join(f"{var} == {lab.value}" for lab in item.labels)
                self.emit(depth, f"{keyword} {test}:")
                self.statement(item.body, depth + 1)
                keyword = "elif"
            if default is not None:
                if keyword == "if":
                    self.statement(default.body, depth)
                else:
                    self.emit(depth, "else:")
                    self.statement(default.body, depth + 1)
        else:  # pragma: no cover
            raise TypeError(s)

    def function(self, name: str, args: str, body: Callable[[], None]) -> str:
        self.lines = [f"def {name}({args}):"]
        start = len(self.lines)
        body()
        if len(self.lines) == start:
            self.emit(1, "pass")
        return "\n".join(self.lines)

    def comb(self, name: str, assigns: list[ContinuousAssign]) -> str:
        args = "V, L" if self.golden else "V"

        def body():
            for a in assigns:
                self.emit(1, f"V[{a.target.signal}] = {self.expr(a.rhs, a.id)}")

        return self.function(name, args, body)

    def seq(self, name: str) -> str:
        args = "V, N, W, C, L" if self.golden else "V, N, W"

        def body():
            for p in self.design.processes:
                self.statement(p.body, 1)

        return self.function(name, args, body)


def observation_cone(design: ElaboratedDesign, observation) -> list[ContinuousAssign]:
    """Continuous assigns needed to recompute the observed wires, in order."""
    by_target = {a.target.signal: a for a in design.assigns}
    needed: set[int] = set()
    stack = [sig for sig in observation if sig in by_target]
    while stack:
        sig = stack.pop()
        a = by_target[sig]
        if a.id in needed:
            continue
        needed.add(a.id)
        stack.extend(u for u in design.defuse[a.id].uses if u in by_target)
    return [design.statements[i] for i in design.comb_order if i in needed]


@dataclass
class CompiledDesign:
    """Generated step functions plus the source they were built from."""

    comb: Callable
    comb_golden: Callable
    seq: Callable
    seq_golden: Callable
    source: str
    _cones: dict

    def cone(self, design: ElaboratedDesign, observation: tuple[int, ...]):
        """``(fast, golden)`` functions recomputing the observed wires."""
        key = tuple(sorted(observation))
        if key not in self._cones:
            assigns = observation_cone(design, key)
            namespace = dict(_HELPERS)
            src = "\n\n".join(
                [_Gen(design, False).comb("cone", assigns), _Gen(design, True).comb("cone_g", assigns)]
            )
            exec(compile(src, f"<{design.name}:cone>", "exec"), namespace)
            self._cones[key] = (namespace["cone"], namespace["cone_g"], [a.id for a in assigns])
        return self._cones[key]


def compile_design(design: ElaboratedDesign) -> CompiledDesign:
    """Generate (and cache on the design) the step functions."""
    if design._engine is not None:
        return design._engine
    assigns = [design.statements[i] for i in design.comb_order]
    fast = _Gen(design, golden=False)
    golden = _Gen(design, golden=True)
    src = "\n\n".join(
        [
            fast.comb("comb", assigns),
            golden.comb("comb_g", assigns),
            fast.seq("seq"),
            golden.seq("seq_g"),
        ]
    )
    namespace = dict(_HELPERS)
    exec(compile(src, f"<{design.name}>", "exec"), namespace)
    engine = CompiledDesign(
        comb=namespace["comb"],
        comb_golden=namespace["comb_g"],
        seq=namespace["seq"],
        seq_golden=namespace["seq_g"],
        source=src,
        _cones={},
    )
    design._engine = engine
    return engine


def initial_values(design: ElaboratedDesign) -> list:
    return [
        [0] * s.depth if s.kind is SignalKind.MEMORY else 0 for s in design.signals
    ]
