"""Arithmetic expression trees for quantitative frame rules.

Expressions are built from numeric constants, named physical constants
(R = 8.314 J/(mol*K) by default), feature variables, and the four binary
operators. Division is only legal when a guard protects the divisor; the
structural check lives in `divisors` / `is_nonzero_literal`, the runtime
check in `evaluate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import GuardError, Unbound

# Built-in physical constants. Knowledge bases may extend this table.
CONSTANTS: dict[str, float] = {
    "R": 8.314,  # molar gas constant, J/(mol*K)
}

Expression = Union["Const", "NamedConst", "Var", "BinOp"]

_OPS = ("+", "-", "*", "/")


@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self) -> str:
        if self.value == int(self.value):
            return str(int(self.value))
        return repr(self.value)


@dataclass(frozen=True)
class NamedConst:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        if any(ch in self.name for ch in " ()+-*/,"):
            return f'"{self.name}"'
        return self.name


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expression
    right: Expression

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown operator {self.op!r}")

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


def evaluate(expr: Expression,
             bindings: Mapping[str, float],
             constants: Mapping[str, float] | None = None) -> float:
    """Evaluate an expression tree against variable bindings.

    Raises Unbound for a variable without a value and GuardError when a
    division hits a zero divisor (guards are supposed to rule this out
    before evaluation, so reaching it is still reported loudly).
    """
    consts = CONSTANTS if constants is None else constants
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, NamedConst):
        try:
            return consts[expr.name]
        except KeyError:
            raise Unbound(f"unknown constant {expr.name!r}") from None
    if isinstance(expr, Var):
        try:
            return float(bindings[expr.name])
        except KeyError:
            raise Unbound(f"variable {expr.name!r} has no value") from None
    left = evaluate(expr.left, bindings, consts)
    right = evaluate(expr.right, bindings, consts)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if right == 0.0:
        raise GuardError(f"division by zero: {expr.right} = 0")
    return left / right


def variables(expr: Expression) -> set[str]:
    """All variable names appearing in the tree."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, BinOp):
        return variables(expr.left) | variables(expr.right)
    return set()


def divisors(expr: Expression) -> list[Expression]:
    """Right-hand sides of every division node, in evaluation order."""
    if not isinstance(expr, BinOp):
        return []
    found = divisors(expr.left) + divisors(expr.right)
    if expr.op == "/":
        found.append(expr.right)
    return found


def factors(expr: Expression) -> list[Expression]:
    """Multiplicative factors of an expression (the expression itself if it
    is not a product). A product divisor is guarded when each factor is."""
    if isinstance(expr, BinOp) and expr.op == "*":
        return factors(expr.left) + factors(expr.right)
    return [expr]


def is_nonzero_literal(expr: Expression,
                       constants: Mapping[str, float] | None = None) -> bool:
    """True for constants that are statically known to be nonzero."""
    consts = CONSTANTS if constants is None else constants
    if isinstance(expr, Const):
        return expr.value != 0.0
    if isinstance(expr, NamedConst):
        return consts.get(expr.name, 0.0) != 0.0
    return False


def render(expr: Expression) -> str:
    """Parseable infix form; inverse of the DSL expression grammar."""
    return _render(expr, parent_prec=0)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _render(expr: Expression, parent_prec: int) -> str:
    if not isinstance(expr, BinOp):
        return str(expr)
    prec = _PREC[expr.op]
    left = _render(expr.left, prec)
    # Force parentheses on same-precedence right operands so that
    # a - (b - c) and a / (b * c) survive a round trip.
    right = _render(expr.right, prec + 1)
    text = f"{left} {expr.op} {right}"
    if prec < parent_prec:
        return f"({text})"
    return text


def to_obj(expr: Expression) -> object:
    """JSON-friendly form used by the persistence layer."""
    if isinstance(expr, Const):
        return {"const": expr.value}
    if isinstance(expr, NamedConst):
        return {"named": expr.name}
    if isinstance(expr, Var):
        return {"var": expr.name}
    return {"op": expr.op, "left": to_obj(expr.left), "right": to_obj(expr.right)}


def from_obj(obj: object) -> Expression:
    if not isinstance(obj, dict):
        raise ValueError(f"bad expression node: {obj!r}")
    if "const" in obj:
        return Const(float(obj["const"]))
    if "named" in obj:
        return NamedConst(str(obj["named"]))
    if "var" in obj:
        return Var(str(obj["var"]))
    if "op" in obj:
        return BinOp(str(obj["op"]), from_obj(obj["left"]), from_obj(obj["right"]))
    raise ValueError(f"bad expression node: {obj!r}")
