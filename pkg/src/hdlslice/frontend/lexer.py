from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import HdlSyntaxError, SourceLoc

KEYWORDS = frozenset(
    {
        "module", "endmodule", "input", "output", "wire", "reg", "assign",
        "always", "posedge", "begin", "end", "if", "else", "case", "endcase",
        "default",
    }
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<number>(?:[0-9][0-9_]*)?'[bBdDhH][0-9a-fA-F_]+|[0-9][0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<op><=|>=|==|!=|&&|\|\||<<|>>|[()\[\]{};:,@=<>+\-&|^~!?])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'keyword', 'number', 'op', 'eof'
    text: str
    loc: SourceLoc


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise HdlSyntaxError(f"unexpected character {text[pos]!r}", SourceLoc(line, col))
        kind = m.lastgroup
        value = m.group()
        loc = SourceLoc(line, pos - line_start + 1)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "block_comment":
            newlines = value.count("\n")
            if newlines:
                line += newlines
                line_start = pos + value.rfind("\n") + 1
        elif kind == "ident":
            tokens.append(Token("keyword" if value in KEYWORDS else "ident", value, loc))
        elif kind in ("number", "op"):
            tokens.append(Token(kind, value, loc))
        pos = m.end()
    tokens.append(Token("eof", "", SourceLoc(line, pos - line_start + 1)))
    return tokens


def parse_number(text: str, loc: SourceLoc) -> tuple[int, int, bool]:
    """Return ``(value, width, sized)`` for a Verilog-style integer literal."""
    text = text.replace("_", "")
    if "'" not in text:
        value = int(text)
        return value, max(1, value.bit_length()), False
    size_text, rest = text.split("'", 1)
    base = {"b": 2, "d": 10, "h": 16}[rest[0].lower()]
    try:
        value = int(rest[1:], base)
    except ValueError:
        raise HdlSyntaxError(f"malformed number {text!r}", loc) from None
    if not size_text:
        return value, max(1, value.bit_length()), False
    width = int(size_text)
    if not 1 <= width <= 64:
        raise HdlSyntaxError(f"literal width {width} outside 1..64", loc)
    if value >= 1 << width:
        raise HdlSyntaxError(f"literal {text!r} does not fit in {width} bits", loc)
    return value, width, True
