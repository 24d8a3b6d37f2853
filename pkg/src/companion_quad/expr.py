"""Arithmetic expressions in one variable ``t`` with second-order forward AD.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right-associative
    primary := NUMBER | 't' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

``FUNC`` is one of sin, cos, exp, log, sqrt, abs. Unary minus binds looser
than ``^``, so ``-t^2`` is ``-(t^2)`` and ``2^-1`` is ``2^(-1)``.

Evaluation works on Python floats and on numpy arrays alike; :func:`eval_jet`
returns a :class:`Jet2` carrying value, first and second derivative.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationDomainError, ExpressionSyntaxError, UnknownIdentifierError

__all__ = [
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "Jet2",
    "parse",
    "unparse",
    "evaluate",
    "eval_jet",
    "compile_expr",
    "depends_on_t",
    "FUNCTIONS",
    "CONSTANTS",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "t"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")

# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, offset=None):
        if offset is None:
            offset = self.tok[2]
        return ExpressionSyntaxError(message, offset, self.source)

    def take(self, text):
        if self.tok[1] == text and self.tok[0] == "op":
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.take(text):
            found = self.tok[1] or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok[0] != "end":
            raise self.error(f"unexpected token {self.tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.take("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.take("^"):
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, text, offset = self.tok
        if kind == "num":
            self.i += 1
            return Num(float(text))
        if kind == "ident":
            self.i += 1
            if text == "t":
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", offset, self.source)
        if self.take("("):
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {text!r}")


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises
    ------
    ExpressionSyntaxError
        With the byte offset of the offending token.
    UnknownIdentifierError
        For names other than ``t``, the constants and the functions.
    """
    if not source or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0, source)
    return _Parser(source).parse()


def unparse(node: Expr) -> str:
    """Fully parenthesised text that parses back to ``node``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        return f"(-{unparse(node.operand)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def depends_on_t(node: Expr) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, Neg):
        return depends_on_t(node.operand)
    if isinstance(node, BinOp):
        return depends_on_t(node.left) or depends_on_t(node.right)
    return depends_on_t(node.arg)


# ---------------------------------------------------------------------------
# jets


class Jet2:
    """Truncated Taylor jet ``(f, f', f'')``; fields may be floats or arrays."""

    __slots__ = ("value", "d1", "d2")

    def __init__(self, value, d1=0.0, d2=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def variable(cls, t):
        return cls(t, 1.0, 0.0)

    def __repr__(self):
        return f"Jet2(value={self.value!r}, d1={self.d1!r}, d2={self.d2!r})"

    def __iter__(self):
        return iter((self.value, self.d1, self.d2))

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.d1 + other.d1, self.d2 + other.d2)
        return Jet2(self.value + other, self.d1, self.d2)

    def __radd__(self, other):
        return Jet2(other + self.value, self.d1, self.d2)

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.d1 - other.d1, self.d2 - other.d2)
        return Jet2(self.value - other, self.d1, self.d2)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.d1, -self.d2)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.value * other.value,
                self.d1 * other.value + self.value * other.d1,
                self.d2 * other.value + 2.0 * self.d1 * other.d1 + self.value * other.d2,
            )
        return Jet2(self.value * other, self.d1 * other, self.d2 * other)

    def __rmul__(self, other):
        return Jet2(other * self.value, other * self.d1, other * self.d2)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            q = self.value / other.value
            q1 = (self.d1 - q * other.d1) / other.value
            q2 = (self.d2 - 2.0 * q1 * other.d1 - q * other.d2) / other.value
            return Jet2(q, q1, q2)
        return Jet2(self.value / other, self.d1 / other, self.d2 / other)

    def __rtruediv__(self, other):
        return Jet2(other, 0.0, 0.0) / self

    def chain(self, g, g1, g2):
        """Compose with a scalar function given ``g(u)``, ``g'(u)``, ``g''(u)``."""
        return Jet2(g, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)


# ---------------------------------------------------------------------------
# evaluation

_INT_TOL = 1e-12


def _any(mask) -> bool:
    return bool(np.any(mask))


def _value(u):
    return u.value if isinstance(u, Jet2) else u


def _int_pow(base, n: int):
    """``base**n`` by binary exponentiation; same float ops for jets and plain values."""
    if n == 0:
        return 1.0
    m = abs(n)
    result = None
    square = base
    while m:
        if m & 1:
            result = square if result is None else result * square
        m >>= 1
        if m:
            square = square * square
    return result


def _apply(func: str, u, node):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return _apply_raw(func, u, node)


def _apply_raw(func: str, u, node):
    x = _value(u)
    is_jet = isinstance(u, Jet2)
    if func == "sin":
        g = np.sin(x)
        return u.chain(g, np.cos(x), -g) if is_jet else g
    if func == "cos":
        g = np.cos(x)
        return u.chain(g, -np.sin(x), -g) if is_jet else g
    if func == "exp":
        g = np.exp(x)
        return u.chain(g, g, g) if is_jet else g
    if func == "log":
        if _any(x <= 0):
            raise EvaluationDomainError("log of non-positive value", unparse(node))
        g = np.log(x)
        return u.chain(g, 1.0 / x, -1.0 / (x * x)) if is_jet else g
    if func == "sqrt":
        if _any(x < 0):
            raise EvaluationDomainError("sqrt of negative value", unparse(node))
        g = np.sqrt(x)
        return u.chain(g, 0.5 / g, -0.25 / (g * x)) if is_jet else g
    if func == "abs":
        g = np.abs(x)
        if not is_jet:
            return g
        # subgradient: the right-hand derivative at a kink
        sign = np.where(x >= 0, 1.0, -1.0)
        return u.chain(g, sign, 0.0)
    raise ValueError(f"unknown function {func!r}")


def _power(node: BinOp, base, expo):
    if not depends_on_t(node.right):
        c = float(_value(expo))
        n = round(c)
        if abs(c - n) < _INT_TOL:
            p = _int_pow(base, int(n))
            if n < 0:
                if _any(_value(p) == 0):
                    raise EvaluationDomainError("division by zero", unparse(node))
                p = 1.0 / p
            return p
        x = _value(base)
        if _any(x <= 0):
            raise EvaluationDomainError("non-integer power of non-positive base", unparse(node))
        g = x**c
        if isinstance(base, Jet2):
            return base.chain(g, c * x ** (c - 1.0), c * (c - 1.0) * x ** (c - 2.0))
        return g
    if _any(_value(base) <= 0):
        raise EvaluationDomainError("variable power of non-positive base", unparse(node))
    return _apply("exp", expo * _apply("log", base, node), node)


def _eval(node: Expr, t):
    if isinstance(node, Var):
        return t
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, t)
    if isinstance(node, Call):
        return _apply(node.func, _eval(node.arg, t), node)
    left = _eval(node.left, t)
    right = _eval(node.right, t)
    op = node.op
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if _any(_value(right) == 0):
            raise EvaluationDomainError("division by zero", unparse(node))
        return left / right
    return _power(node, left, right)


def evaluate(e: Expr, t):
    """Plain value of ``e`` at ``t`` (float or array)."""
    return _eval(e, t)


def eval_jet(e: Expr, t) -> Jet2:
    """Value, first and second derivative of ``e`` at ``t``, seeded with ``(t, 1, 0)``.

    ``t`` may be an array, in which case every field has ``t``'s shape.
    """
    out = _eval(e, Jet2.variable(t))
    if not isinstance(out, Jet2):
        out = Jet2(out, 0.0, 0.0)
    if np.ndim(t):
        shape = np.shape(t)
        out = Jet2(*(np.broadcast_to(np.asarray(v, dtype=float), shape) for v in out))
    return out


# ---------------------------------------------------------------------------
# compiled evaluation


def _raiser(exc):
    def fail(t):
        raise exc

    return fail


def _after(left, exc):
    # the tree walk evaluates the left operand first, so its errors win
    def fail(t):
        left(t)
        raise exc

    return fail


def _compile(node: Expr):
    """Closure computing ``_eval(node, t)`` with the same float operations.

    Subtrees free of ``t`` are folded to constants up front.
    """
    if not depends_on_t(node):
        try:
            c = _eval(node, 0.0)
        except EvaluationDomainError as exc:
            return _raiser(exc)
        return lambda t: c
    if isinstance(node, Var):
        return lambda t: t
    if isinstance(node, Neg):
        g = _compile(node.operand)
        return lambda t: -g(t)
    if isinstance(node, Call):
        g = _compile(node.arg)
        func = node.func
        return lambda t: _apply_raw(func, g(t), node)
    left = _compile(node.left)
    op = node.op
    if depends_on_t(node.right):
        right = _compile(node.right)
        if op == "+":
            return lambda t: left(t) + right(t)
        if op == "-":
            return lambda t: left(t) - right(t)
        if op == "*":
            return lambda t: left(t) * right(t)
        if op == "/":

            def divide(t):
                r = right(t)
                if _any(_value(r) == 0):
                    raise EvaluationDomainError("division by zero", unparse(node))
                return left(t) / r

            return divide
        return lambda t: _power(node, left(t), right(t))
    try:
        c = _eval(node.right, 0.0)
    except EvaluationDomainError as exc:
        return _after(left, exc)
    if op == "+":
        return lambda t: left(t) + c
    if op == "-":
        return lambda t: left(t) - c
    if op == "*":
        return lambda t: left(t) * c
    if op == "/":
        if c == 0:
            return _after(left, EvaluationDomainError("division by zero", unparse(node)))
        return lambda t: left(t) / c
    n = round(float(c))
    if abs(float(c) - n) < _INT_TOL and n > 0:
        n = int(n)
        return lambda t: _int_pow(left(t), n)
    return lambda t: _power(node, left(t), c)


def _fill(v, shape):
    if np.shape(v) == shape:
        return v
    return np.broadcast_to(np.asarray(v, dtype=float), shape)


def compile_expr(e: Expr, jet: bool = False):
    """Compile ``e`` into a function of ``t`` equivalent to :func:`evaluate`
    (or :func:`eval_jet` when ``jet`` is true), bit for bit.
    """
    g = _compile(e)
    if not jet:

        def run_value(t):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return g(t)

        return run_value

    def run(t):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = g(Jet2.variable(t))
        if not isinstance(out, Jet2):
            out = Jet2(out, 0.0, 0.0)
        if np.ndim(t):
            shape = np.shape(t)
            out = Jet2(_fill(out.value, shape), _fill(out.d1, shape), _fill(out.d2, shape))
        return out

    return run
