"""Recursive-descent parser for MiniRTL.

Names must be declared before they are used. The grammar is documented in
``docs/minirtl.md``.
"""

from __future__ import annotations

from ..errors import DuplicateName, HdlSyntaxError, SourceLoc, UnknownSignal
from .ir import (
    Binary,
    BitSelect,
    Block,
    Case,
    CaseItem,
    Concat,
    Const,
    ContinuousAssign,
    Design,
    Expr,
    If,
    Index,
    NonBlockingAssign,
    Process,
    Ref,
    SignalDecl,
    SignalKind,
    Statement,
    Target,
    Ternary,
    Unary,
)
from .lexer import Token, parse_number, tokenize

# Binary operator precedence, loosest first.
_BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
)
_UNARY_OPS = ("~", "!", "-")
MAX_WIDTH = 64


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.signals: list[SignalDecl] = []
        self.by_name: dict[str, SignalDecl] = {}
        self.statements: list[Statement | None] = []
        self.processes: list[Process] = []
        self.assigns: list[ContinuousAssign] = []
        self.clock: int | None = None

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "keyword")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected '{text}'")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        return self.advance()

    def expect_int(self) -> int:
        tok = self.tok
        if tok.kind != "number":
            self.error("expected integer constant")
        self.advance()
        value, _, _ = parse_number(tok.text, tok.loc)
        return value

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise HdlSyntaxError(f"{message}, found {found}", tok.loc)

    def lookup(self, tok: Token) -> SignalDecl:
        sig = self.by_name.get(tok.text)
        if sig is None:
            raise UnknownSignal(f"unknown signal '{tok.text}'", tok.loc)
        return sig

    def new_statement_id(self) -> int:
        self.statements.append(None)
        return len(self.statements) - 1

    def finish(self, stmt: Statement) -> Statement:
        self.statements[stmt.id] = stmt
        return stmt

    # -- module -------------------------------------------------------------

    def parse(self) -> Design:
        self.expect("module")
        name = self.expect_ident().text
        ports: list[Token] = []
        self.expect("(")
        if not self.at(")"):
            ports.append(self.expect_ident())
            while self.accept(","):
                ports.append(self.expect_ident())
        self.expect(")")
        self.expect(";")
        port_names = [p.text for p in ports]
        seen: set[str] = set()
        for p in ports:
            if p.text in seen:
                raise DuplicateName(f"duplicate port '{p.text}'", p.loc)
            seen.add(p.text)

        while not self.at("endmodule"):
            if self.tok.kind == "eof":
                self.error("expected 'endmodule'")
            self.parse_item(seen)
        self.expect("endmodule")
        if self.tok.kind != "eof":
            self.error("unexpected text after 'endmodule'")

        for p in ports:
            sig = self.by_name.get(p.text)
            if sig is None or not sig.port:
                raise UnknownSignal(f"port '{p.text}' is not declared input or output", p.loc)

        if self.clock is None:
            clk = self.by_name.get("clk")
            if clk is not None and clk.kind is SignalKind.INPUT and clk.width == 1:
                self.clock = clk.id

        return Design(
            name=name,
            ports=tuple(port_names),
            signals=tuple(self.signals),
            processes=tuple(self.processes),
            assigns=tuple(self.assigns),
            statements=tuple(self.statements),  # type: ignore[arg-type]
            clock=self.clock,
            source=self.text,
        )

    def parse_item(self, ports: set[str]) -> None:
        tok = self.tok
        if tok.text in ("input", "output", "wire", "reg") and tok.kind == "keyword":
            self.parse_declaration(ports)
        elif self.at("assign"):
            self.parse_continuous_assign()
        elif self.at("always"):
            self.parse_always()
        else:
            self.error("expected declaration, 'assign' or 'always'")

    def parse_range(self) -> int:
        """``[msb:0]`` -> width."""
        start = self.expect("[")
        msb = self.expect_int()
        self.expect(":")
        lsb = self.expect_int()
        self.expect("]")
        if lsb != 0:
            raise HdlSyntaxError("only [N:0] vector ranges are supported", start.loc)
        width = msb + 1
        if width > MAX_WIDTH:
            raise HdlSyntaxError(f"width {width} exceeds {MAX_WIDTH} bits", start.loc)
        return width

    def parse_declaration(self, ports: set[str]) -> None:
        head = self.advance()
        direction = head.text
        kind = {
            "input": SignalKind.INPUT,
            "output": SignalKind.OUTPUT,
            "wire": SignalKind.WIRE,
            "reg": SignalKind.REG,
        }[direction]
        if direction == "output" and self.accept("reg"):
            kind = SignalKind.REG
        elif direction in ("input", "output"):
            self.accept("wire")
        width = self.parse_range() if self.at("[") else 1
        while True:
            ident = self.expect_ident()
            depth = 0
            sig_kind = kind
            if self.at("["):
                if kind is not SignalKind.REG or direction == "output":
                    self.error("only plain 'reg' declarations may be memories")
                start = self.advance()
                a = self.expect_int()
                self.expect(":")
                b = self.expect_int()
                self.expect("]")
                if min(a, b) != 0:
                    raise HdlSyntaxError("memory ranges must be [0:DEPTH-1]", start.loc)
                depth = max(a, b) + 1
                sig_kind = SignalKind.MEMORY
            is_port = direction in ("input", "output")
            if is_port and ident.text not in ports:
                raise HdlSyntaxError(f"'{ident.text}' is not in the port list", ident.loc)
            if not is_port and ident.text in ports:
                raise DuplicateName(
                    f"port '{ident.text}' must be declared input or output", ident.loc
                )
            if ident.text in self.by_name:
                raise DuplicateName(f"duplicate declaration of '{ident.text}'", ident.loc)
            sig = SignalDecl(
                id=len(self.signals),
                name=ident.text,
                kind=sig_kind,
                width=width,
                depth=depth,
                loc=ident.loc,
                port=is_port,
            )
            self.signals.append(sig)
            self.by_name[sig.name] = sig
            if not self.accept(","):
                break
        self.expect(";")

    def parse_continuous_assign(self) -> None:
        start = self.expect("assign")
        sid = self.new_statement_id()
        target = self.parse_target()
        self.expect("=")
        rhs = self.parse_expr()
        self.expect(";")
        stmt = ContinuousAssign(sid, start.loc, target, rhs)
        self.finish(stmt)
        self.assigns.append(stmt)

    def parse_always(self) -> None:
        start = self.expect("always")
        self.expect("@")
        self.expect("(")
        self.expect("posedge")
        clk_tok = self.expect_ident()
        clk = self.lookup(clk_tok)
        if clk.kind is not SignalKind.INPUT or clk.width != 1:
            raise HdlSyntaxError("clock must be a 1-bit input", clk_tok.loc)
        if self.clock is not None and self.clock != clk.id:
            raise HdlSyntaxError("only a single clock is supported", clk_tok.loc)
        self.clock = clk.id
        self.expect(")")
        body = self.parse_statement()
        self.processes.append(Process(body, start.loc))

    # -- statements ---------------------------------------------------------

    def parse_statement(self) -> Statement:
        tok = self.tok
        sid = self.new_statement_id()
        if self.accept("begin"):
            body = []
            while not self.at("end"):
                if self.tok.kind == "eof":
                    self.error("expected 'end'")
                body.append(self.parse_statement())
            self.expect("end")
            return self.finish(Block(sid, tok.loc, tuple(body)))
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_optional_statement()
            otherwise = None
            if self.accept("else"):
                otherwise = self.parse_optional_statement()
            return self.finish(If(sid, tok.loc, cond, then, otherwise))
        if self.accept("case"):
            self.expect("(")
            subject = self.parse_expr()
            self.expect(")")
            items = []
            seen_default = False
            while not self.at("endcase"):
                if self.tok.kind == "eof":
                    self.error("expected 'endcase'")
                item_tok = self.tok
                if self.accept("default"):
                    if seen_default:
                        raise HdlSyntaxError("duplicate default item", item_tok.loc)
                    seen_default = True
                    labels: tuple[Expr, ...] = ()
                    self.accept(":")
                else:
                    labels = (self.parse_expr(),)
                    while self.accept(","):
                        labels += (self.parse_expr(),)
                    self.expect(":")
                items.append(CaseItem(labels, self.parse_optional_statement()))
            self.expect("endcase")
            return self.finish(Case(sid, tok.loc, subject, tuple(items)))
        if tok.kind == "ident":
            target = self.parse_target()
            if self.at("="):
                self.error("blocking assignments are not supported; use '<='")
            self.expect("<=")
            rhs = self.parse_expr()
            self.expect(";")
            return self.finish(NonBlockingAssign(sid, tok.loc, target, rhs))
        self.statements.pop()
        self.error("expected statement")

    def parse_optional_statement(self) -> Statement | None:
        if self.accept(";"):
            return None
        return self.parse_statement()

    def parse_target(self) -> Target:
        tok = self.expect_ident()
        sig = self.lookup(tok)
        if sig.kind is SignalKind.MEMORY:
            if not self.at("["):
                self.error("memory writes need a row index")
            self.advance()
            index = self.parse_expr()
            self.expect("]")
            return Target(sig.id, index=index)
        if self.accept("["):
            msb = self.expect_int()
            lsb = msb
            if self.accept(":"):
                lsb = self.expect_int()
            self.expect("]")
            return Target(sig.id, msb=msb, lsb=lsb)
        return Target(sig.id)

    # -- expressions --------------------------------------------------------

    def parse_expr(self) -> Expr:
        cond = self.parse_binary(0)
        if self.accept("?"):
            then = self.parse_expr()
            self.expect(":")
            otherwise = self.parse_expr()
            return Ternary(cond, then, otherwise)
        return cond

    def parse_binary(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance().text
            right = self.parse_binary(level + 1)
            left = Binary(op, left, right)
        return left

    def parse_unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text in _UNARY_OPS:
            op = self.advance().text
            return Unary(op, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value, width, sized = parse_number(tok.text, tok.loc)
            return Const(value, width, sized)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if self.accept("{"):
            parts = [self.parse_expr()]
            while self.accept(","):
                parts.append(self.parse_expr())
            self.expect("}")
            return Concat(tuple(parts))
        if tok.kind == "ident":
            self.advance()
            sig = self.lookup(tok)
            expr: Expr
            if sig.kind is SignalKind.MEMORY and self.at("["):
                self.advance()
                index = self.parse_expr()
                self.expect("]")
                expr = Index(sig.id, index)
            else:
                expr = Ref(sig.id)
            if self.at("["):
                self.advance()
                msb = self.expect_int()
                lsb = msb
                if self.accept(":"):
                    lsb = self.expect_int()
                self.expect("]")
                expr = BitSelect(expr, msb, lsb)
            return expr
        self.error("expected expression")


def parse_design(source_text: str) -> Design:
    """Parse MiniRTL text into a name-resolved :class:`Design`.

    Raises :class:`HdlSyntaxError`, :class:`DuplicateName` or
    :class:`UnknownSignal`, each carrying a line/column location.
    """
    return _Parser(source_text).parse()
