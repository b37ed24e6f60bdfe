"""MiniRTL frontend: lexer, parser, elaboration and pretty-printing."""

from .elaborate import def_use, elaborate, load_design
from .ir import (
    Block,
    Case,
    ContinuousAssign,
    DefUse,
    Design,
    ElaboratedDesign,
    If,
    NonBlockingAssign,
    SignalDecl,
    SignalKind,
    Statement,
    StatementKind,
)
from .parser import parse_design
from .printer import pretty, pretty_statement

__all__ = [
    "Block",
    "Case",
    "ContinuousAssign",
    "DefUse",
    "Design",
    "ElaboratedDesign",
    "If",
    "NonBlockingAssign",
    "SignalDecl",
    "SignalKind",
    "Statement",
    "StatementKind",
    "def_use",
    "elaborate",
    "load_design",
    "parse_design",
    "pretty",
    "pretty_statement",
]
