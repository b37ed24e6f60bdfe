"""Canonical MiniRTL pretty-printer.

``pretty(parse(pretty(d)))`` is a fixed point for every design.
"""

from __future__ import annotations

from .ir import (
    Binary,
    BitSelect,
    Block,
    Case,
    Concat,
    Const,
    ContinuousAssign,
    Design,
    ElaboratedDesign,
    Expr,
    If,
    Index,
    NonBlockingAssign,
    Ref,
    SignalKind,
    Statement,
    Target,
    Ternary,
    Unary,
)
from .parser import _BINARY_LEVELS

_PREC = {op: level for level, ops in enumerate(_BINARY_LEVELS) for op in ops}
_TERNARY_PREC = -1
_UNARY_PREC = len(_BINARY_LEVELS)
_INDENT = "  "


class _Printer:
    def __init__(self, design: Design | ElaboratedDesign):
        self.design = design
        self.names = [s.name for s in design.signals]

    def const(self, c: Const) -> str:
        if not c.sized:
            return str(c.value)
        return f"{c.width}'h{c.value:x}"

    def expr(self, e: Expr, context: int = _TERNARY_PREC) -> str:
        if isinstance(e, Const):
            return self.const(e)
        if isinstance(e, Ref):
            return self.names[e.signal]
        if isinstance(e, Index):
            return f"{self.names[e.signal]}[{self.expr(e.index)}]"
        if isinstance(e, BitSelect):
            sel = f"{e.msb}" if e.msb == e.lsb else f"{e.msb}:{e.lsb}"
            return f"{self.expr(e.base, _UNARY_PREC + 1)}[{sel}]"
        if isinstance(e, Concat):
            return "{" + ", ".join(self.expr(p) for p in e.parts) + "}"
        if isinstance(e, Unary):
            text = e.op + self.expr(e.operand, _UNARY_PREC)
            return f"({text})" if context > _UNARY_PREC else text
        if isinstance(e, Binary):
            prec = _PREC[e.op]
            # left-associative: the right operand binds one level tighter
            text = f"{self.expr(e.left, prec)} {e.op} {self.expr(e.right, prec + 1)}"
            return f"({text})" if context > prec else text
        if isinstance(e, Ternary):
            text = (
                f"{self.expr(e.cond, 0)} ? {self.expr(e.then)} : {self.expr(e.otherwise)}"
            )
            return f"({text})" if context > _TERNARY_PREC else text
        raise TypeError(e)  # pragma: no cover

    def target(self, t: Target) -> str:
        name = self.names[t.signal]
        if t.index is not None:
            return f"{name}[{self.expr(t.index)}]"
        if t.is_partial:
            sel = f"{t.msb}" if t.msb == t.lsb else f"{t.msb}:{t.lsb}"
            return f"{name}[{sel}]"
        return name

    def statement(self, s: Statement | None, depth: int) -> list[str]:
        pad = _INDENT * depth
        if s is None:
            return [pad + ";"]
        if isinstance(s, NonBlockingAssign):
            return [f"{pad}{self.target(s.target)} <= {self.expr(s.rhs)};"]
        if isinstance(s, Block):
            lines = [pad + "begin"]
            for child in s.body:
                lines += self.statement(child, depth + 1)
            return lines + [pad + "end"]
        if isinstance(s, If):
            lines = [f"{pad}if ({self.expr(s.cond)})"]
            lines += self.statement(s.then, depth + 1)
            if s.otherwise is not None:
                lines.append(pad + "else")
                lines += self.statement(s.otherwise, depth + 1)
            return lines
        if isinstance(s, Case):
            lines = [f"{pad}case ({self.expr(s.subject)})"]
            for item in s.items:
                if item.is_default:
                    head = "default:"
                else:
                    head = ", ".join(self.expr(lab) for lab in item.labels) + ":"
                lines.append(_INDENT * (depth + 1) + head)
                lines += self.statement(item.body, depth + 2)
            return lines + [pad + "endcase"]
        raise TypeError(s)  # pragma: no cover

    def declaration(self, sig) -> str:
        rng = f" [{sig.width - 1}:0]" if sig.width > 1 else ""
        if sig.kind is SignalKind.INPUT:
            return f"input{rng} {sig.name};"
        if sig.kind is SignalKind.OUTPUT:
            return f"output{rng} {sig.name};"
        if sig.kind is SignalKind.WIRE:
            return f"wire{rng} {sig.name};"
        if sig.kind is SignalKind.MEMORY:
            return f"reg{rng} {sig.name} [0:{sig.depth - 1}];"
        prefix = "output reg" if sig.port else "reg"
        return f"{prefix}{rng} {sig.name};"

    def design_text(self) -> str:
        d = self.design
        lines = [f"module {d.name}({', '.join(d.ports)});"]
        for sig in d.signals:
            lines.append(_INDENT + self.declaration(sig))
        clock = self.names[d.clock] if d.clock is not None else "clk"
        items: list[tuple[int, list[str]]] = []
        for a in d.assigns:
            items.append((a.id, [f"{_INDENT}assign {self.target(a.target)} = {self.expr(a.rhs)};"]))
        for p in d.processes:
            body = self.statement(p.body, 2)
            items.append((p.body.id, [f"{_INDENT}always @(posedge {clock})"] + body))
        for _, block in sorted(items, key=lambda item: item[0]):
            lines += block
        lines.append("endmodule")
        return "\n".join(lines) + "\n"


def pretty(design: Design | ElaboratedDesign) -> str:
    """Render a design as canonical MiniRTL text (statement order preserved)."""
    return _Printer(design).design_text()


def pretty_statement(design: Design | ElaboratedDesign, stmt: Statement) -> str:
    """One-line rendering of a statement's own text (header only for if/case)."""
    p = _Printer(design)
    if isinstance(stmt, ContinuousAssign):
        return f"assign {p.target(stmt.target)} = {p.expr(stmt.rhs)};"
    if isinstance(stmt, NonBlockingAssign):
        return f"{p.target(stmt.target)} <= {p.expr(stmt.rhs)};"
    if isinstance(stmt, If):
        return f"if ({p.expr(stmt.cond)})"
    if isinstance(stmt, Case):
        return f"case ({p.expr(stmt.subject)})"
    return "begin ... end"


def pretty_expr(design: Design | ElaboratedDesign, expr: Expr) -> str:
    return _Printer(design).expr(expr)
