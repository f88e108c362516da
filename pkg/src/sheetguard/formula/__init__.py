"""Formula language: parser, printer, evaluator and reference tooling."""

from .ast import (
    FUNCTIONS,
    Binary,
    BoolLit,
    Call,
    CellRef,
    ErrorLit,
    Node,
    NumberLit,
    RangeRef,
    TextLit,
    Unary,
    walk,
)
from .evaluator import Resolver, evaluate
from .parser import parse
from .printer import to_text
from .refs import (
    adjust_references,
    direct_refs,
    ranges_in,
    references,
    relative_form,
    shift_address,
)

__all__ = [
    "FUNCTIONS",
    "Binary",
    "BoolLit",
    "Call",
    "CellRef",
    "ErrorLit",
    "Node",
    "NumberLit",
    "RangeRef",
    "TextLit",
    "Unary",
    "walk",
    "Resolver",
    "evaluate",
    "parse",
    "to_text",
    "adjust_references",
    "direct_refs",
    "ranges_in",
    "references",
    "relative_form",
    "shift_address",
]
