"""Arithmetic expression language for value functions over the allocation (s1, s2).

Grammar (whitespace between tokens is ignored)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" integer)?
    base   := number | "s1" | "s2" | "(" expr ")" | "-" base
            | ident "(" expr ("," expr)* ")"        ident in {min, max, abs}

Trees are immutable and hashable, so they can be shared freely and used as
cache keys.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

VARIABLES = ("s1", "s2")
FUNCTION_ARITY = {"min": 2, "max": 2, "abs": 1}
BINARY_OPS = ("+", "-", "*", "/")


class ExprError(ValueError):
    """Raised for malformed expression text."""

    code = "unparseable_expression"

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class ArityError(ExprError):
    pass


class EvaluationError(ArithmeticError):
    """Division by zero (or another undefined operation) at a specific point."""

    def __init__(self, message: str, point=None):
        self.point = point
        super().__init__(message)


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if self.name not in VARIABLES:
            raise UnknownIdentifierError(f'unknown identifier "{self.name}"')


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple

    def __post_init__(self):
        if self.func not in FUNCTION_ARITY:
            raise UnknownIdentifierError(f'unknown identifier "{self.func}"')
        if len(self.args) != FUNCTION_ARITY[self.func]:
            raise ArityError(
                f"{self.func}() takes {FUNCTION_ARITY[self.func]} argument(s), got {len(self.args)}"
            )


Expr = Union[Const, Var, Neg, BinOp, Pow, Call]

# Convenience constructors, mostly for tests and programmatic use.
def Add(a, b):
    return BinOp("+", _lift(a), _lift(b))


def Sub(a, b):
    return BinOp("-", _lift(a), _lift(b))


def Mul(a, b):
    return BinOp("*", _lift(a), _lift(b))


def Div(a, b):
    return BinOp("/", _lift(a), _lift(b))


def _lift(x):
    if isinstance(x, (int, float)):
        return Const(float(x))
    return x


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.tok
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        kind, text, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.tok[1] == "^":
            self.advance()
            kind, text, pos = self.tok
            if kind != "number" or not text.isdigit():
                raise ExprSyntaxError("exponent must be a non-negative integer literal", pos)
            self.advance()
            node = Pow(node, int(text))
        return node

    def base(self):
        kind, text, pos = self.tok
        if kind == "number":
            self.advance()
            return Const(float(text))
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.base())
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            self.advance()
            if text in VARIABLES:
                return Var(text)
            if text not in FUNCTION_ARITY:
                raise UnknownIdentifierError(f'unknown identifier "{text}"', pos)
            self.expect("(")
            args = [self.expr()]
            while self.tok[1] == ",":
                self.advance()
                args.append(self.expr())
            self.expect(")")
            if len(args) != FUNCTION_ARITY[text]:
                raise ArityError(
                    f"{text}() takes {FUNCTION_ARITY[text]} argument(s), got {len(args)}", pos
                )
            return Call(text, tuple(args))
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", pos)


def parse_value_expr(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises ExprSyntaxError (with ``offset``), UnknownIdentifierError or
    ArityError.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def as_expr(value) -> Expr:
    """Accept either an already-built tree or expression text."""
    if isinstance(value, (Const, Var, Neg, BinOp, Pow, Call)):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Const(float(value))
    return parse_value_expr(value)


def unparse(expr: Expr) -> str:
    """Render a tree as text that parses back to the same tree.

    Binary nodes are fully parenthesised so no precedence reasoning is needed
    on the way back in.
    """
    if isinstance(expr, Const):
        return repr(float(expr.value))
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return "-" + _unparse_base(expr.operand)
    if isinstance(expr, BinOp):
        return f"({unparse(expr.left)} {expr.op} {unparse(expr.right)})"
    if isinstance(expr, Pow):
        return f"{_unparse_base(expr.base)}^{expr.exponent}"
    if isinstance(expr, Call):
        return f"{expr.func}({', '.join(unparse(a) for a in expr.args)})"
    raise TypeError(f"not an expression node: {expr!r}")


def _unparse_base(expr: Expr) -> str:
    text = unparse(expr)
    if isinstance(expr, (Pow,)):
        return f"({text})"
    return text


# ---------------------------------------------------------------- evaluation


def eval_value_expr(expr: Expr, s1: float, s2: float) -> float:
    """Evaluate ``expr`` at the point (s1, s2)."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return s1 if expr.name == "s1" else s2
    if isinstance(expr, Neg):
        return -eval_value_expr(expr.operand, s1, s2)
    if isinstance(expr, BinOp):
        a = eval_value_expr(expr.left, s1, s2)
        b = eval_value_expr(expr.right, s1, s2)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if b == 0:
            raise EvaluationError(f"division by zero at (s1={s1!r}, s2={s2!r})", (s1, s2))
        return a / b
    if isinstance(expr, Pow):
        base = eval_value_expr(expr.base, s1, s2)
        if base == 0 and expr.exponent == 0:
            return 1.0
        return base**expr.exponent
    if isinstance(expr, Call):
        vals = [eval_value_expr(a, s1, s2) for a in expr.args]
        if expr.func == "min":
            return min(vals)
        if expr.func == "max":
            return max(vals)
        return abs(vals[0])
    raise TypeError(f"not an expression node: {expr!r}")


def eval_array(expr: Expr, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Vectorised evaluation over arrays of points (same shape)."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    return np.broadcast_to(_eval_array(expr, s1, s2), np.broadcast(s1, s2).shape).astype(float)


def _eval_array(expr, s1, s2):
    if isinstance(expr, Const):
        return np.float64(expr.value)
    if isinstance(expr, Var):
        return s1 if expr.name == "s1" else s2
    if isinstance(expr, Neg):
        return -_eval_array(expr.operand, s1, s2)
    if isinstance(expr, BinOp):
        a = _eval_array(expr.left, s1, s2)
        b = _eval_array(expr.right, s1, s2)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        zero = np.broadcast_to(b, np.broadcast(s1, s2).shape) == 0
        if np.any(zero):
            k = int(np.flatnonzero(zero)[0])
            p1 = float(np.broadcast_to(s1, zero.shape).flat[k])
            p2 = float(np.broadcast_to(s2, zero.shape).flat[k])
            raise EvaluationError(f"division by zero at (s1={p1!r}, s2={p2!r})", (p1, p2))
        return a / b
    if isinstance(expr, Pow):
        return _eval_array(expr.base, s1, s2) ** expr.exponent
    if isinstance(expr, Call):
        vals = [_eval_array(a, s1, s2) for a in expr.args]
        if expr.func == "min":
            return np.minimum(*vals)
        if expr.func == "max":
            return np.maximum(*vals)
        return np.abs(vals[0])
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------- structure


def variables_in(expr: Expr) -> frozenset:
    if isinstance(expr, Var):
        return frozenset([expr.name])
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, Neg):
        return variables_in(expr.operand)
    if isinstance(expr, BinOp):
        return variables_in(expr.left) | variables_in(expr.right)
    if isinstance(expr, Pow):
        return variables_in(expr.base)
    return frozenset().union(*(variables_in(a) for a in expr.args))


@lru_cache(maxsize=4096)
def affine_coefficients(expr: Expr):
    """Return (c0, c1, c2) with expr == c0 + c1*s1 + c2*s2, or None.

    Purely structural: any division, power, min/max/abs, or product of two
    variable-bearing factors disqualifies the expression.
    """
    if isinstance(expr, Const):
        return (expr.value, 0.0, 0.0)
    if isinstance(expr, Var):
        return (0.0, 1.0, 0.0) if expr.name == "s1" else (0.0, 0.0, 1.0)
    if isinstance(expr, Neg):
        inner = affine_coefficients(expr.operand)
        return None if inner is None else tuple(-c for c in inner)
    if isinstance(expr, BinOp) and expr.op in ("+", "-", "*"):
        a = affine_coefficients(expr.left)
        b = affine_coefficients(expr.right)
        if a is None or b is None:
            return None
        if expr.op == "+":
            return tuple(x + y for x, y in zip(a, b))
        if expr.op == "-":
            return tuple(x - y for x, y in zip(a, b))
        if a[1] == 0 and a[2] == 0 and not variables_in(expr.left):
            return tuple(a[0] * y for y in b)
        if b[1] == 0 and b[2] == 0 and not variables_in(expr.right):
            return tuple(b[0] * x for x in a)
        return None
    return None


def structurally_equal(a: Expr, b: Expr) -> bool:
    """Tree equality, treating constants equal when their floats are equal."""
    return a == b


def swap_variables(expr: Expr) -> Expr:
    """Exchange s1 and s2 throughout the tree."""
    if isinstance(expr, Var):
        return Var("s2" if expr.name == "s1" else "s1")
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Neg):
        return Neg(swap_variables(expr.operand))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, swap_variables(expr.left), swap_variables(expr.right))
    if isinstance(expr, Pow):
        return Pow(swap_variables(expr.base), expr.exponent)
    return Call(expr.func, tuple(swap_variables(a) for a in expr.args))


def is_finite_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)
