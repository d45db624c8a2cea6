"""Symbolic scalar fields in the plane variables ``x`` and ``y``.

Expressions are small immutable trees built by :func:`parse` or by Python
operators on existing nodes. They can be evaluated at a point and
differentiated exactly with :func:`diff`.

Grammar (standard precedence, ``^`` binds tighter than unary minus)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := atom ("^" exponent)?
    exponent := ["-"] INTEGER | "(" ["-"] INTEGER ")"
    atom     := NUMBER | "x" | "y" | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC     := "sin" | "cos" | "exp" | "sqrt" | "ln"
"""
from __future__ import annotations

import math
import re
from typing import Union

__all__ = [
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "ArityError",
    "ExprDomainError",
    "parse",
    "diff",
    "evaluate",
    "const",
    "X",
    "Y",
]

VARIABLES = ("x", "y")
FUNCTIONS = ("sin", "cos", "exp", "sqrt", "ln")
CONSTANTS = {"pi": math.pi}


class ExprError(ValueError):
    """Base class for parse errors; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class ArityError(ExprError):
    pass


class ExprDomainError(ArithmeticError):
    """Raised when an expression is evaluated outside its natural domain."""


Number = Union[int, float]


class Expr:
    __slots__ = ()
    prec = 100

    def eval(self, x: float, y: float) -> float:
        raise NotImplementedError

    def __call__(self, x: float, y: float) -> float:
        return self.eval(x, y)

    def diff(self, v: str) -> "Expr":
        raise NotImplementedError

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer exponents are supported")
        return power(self, n)

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"

    @property
    def is_const(self) -> bool:
        return False


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        self.value = float(value)

    def eval(self, x, y):
        return self.value

    def diff(self, v):
        return ZERO

    @property
    def is_const(self):
        return True

    def __str__(self):
        v = self.value
        text = repr(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
        return f"({text})" if v < 0 else text


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def eval(self, x, y):
        return x if self.name == "x" else y

    def diff(self, v):
        return ONE if v == self.name else ZERO

    def __str__(self):
        return self.name


class Neg(Expr):
    __slots__ = ("arg",)
    prec = 3

    def __init__(self, arg: Expr):
        self.arg = arg

    def eval(self, x, y):
        return -self.arg.eval(x, y)

    def diff(self, v):
        return neg(self.arg.diff(v))

    def __str__(self):
        return "-" + _wrap(self.arg, self.prec + 1)


class Binary(Expr):
    __slots__ = ("op", "left", "right")
    _prec = {"+": 1, "-": 1, "*": 2, "/": 2}

    def __init__(self, op: str, left: Expr, right: Expr):
        self.op = op
        self.left = left
        self.right = right

    @property
    def prec(self):
        return self._prec[self.op]

    def eval(self, x, y):
        a = self.left.eval(x, y)
        b = self.right.eval(x, y)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0.0:
            raise ExprDomainError(f"division by zero in {self}")
        return a / b

    def diff(self, v):
        f, g = self.left, self.right
        df, dg = f.diff(v), g.diff(v)
        op = self.op
        if op == "+":
            return add(df, dg)
        if op == "-":
            return sub(df, dg)
        if op == "*":
            return add(mul(df, g), mul(f, dg))
        # (f/g)' = f'/g - f g'/g^2
        return sub(div(df, g), div(mul(f, dg), power(g, 2)))

    def __str__(self):
        p = self.prec
        left = _wrap(self.left, p)
        # right operand of - and / needs strictly higher precedence
        right = _wrap(self.right, p + (1 if self.op in "-/" else 0))
        return f"{left} {self.op} {right}"


class Pow(Expr):
    __slots__ = ("base", "n")
    prec = 4

    def __init__(self, base: Expr, n: int):
        self.base = base
        self.n = n

    def eval(self, x, y):
        b = self.base.eval(x, y)
        if self.n < 0 and b == 0.0:
            raise ExprDomainError(f"zero raised to negative power in {self}")
        return b**self.n

    def diff(self, v):
        return mul(mul(const(self.n), power(self.base, self.n - 1)), self.base.diff(v))

    def __str__(self):
        n = str(self.n) if self.n >= 0 else f"({self.n})"
        return f"{_wrap(self.base, self.prec + 1)}^{n}"


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        self.name = name
        self.arg = arg

    def eval(self, x, y):
        u = self.arg.eval(x, y)
        name = self.name
        if name == "sin":
            return math.sin(u)
        if name == "cos":
            return math.cos(u)
        if name == "exp":
            return math.exp(u)
        if name == "sqrt":
            if u < 0.0:
                raise ExprDomainError(f"sqrt of negative value {u!r}")
            return math.sqrt(u)
        if u <= 0.0:
            raise ExprDomainError(f"ln of non-positive value {u!r}")
        return math.log(u)

    def diff(self, v):
        u = self.arg
        du = u.diff(v)
        if du.is_const and du.value == 0.0:
            return ZERO
        name = self.name
        if name == "sin":
            outer = func("cos", u)
        elif name == "cos":
            outer = neg(func("sin", u))
        elif name == "exp":
            outer = self
        elif name == "sqrt":
            outer = div(ONE, mul(TWO, self))
        else:
            outer = div(ONE, u)
        return mul(outer, du)

    def __str__(self):
        return f"{self.name}({self.arg})"


ZERO = Const(0.0)
ONE = Const(1.0)
TWO = Const(2.0)
X = Var("x")
Y = Var("y")


def const(value: Number) -> Const:
    return Const(value)


def _lift(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float)):
        return Const(v)
    raise TypeError(f"cannot combine Expr with {type(v).__name__}")


def _wrap(e: Expr, prec: int) -> str:
    s = str(e)
    return f"({s})" if e.prec < prec else s


def _is(e: Expr, value: float) -> bool:
    return e.is_const and e.value == value


# Constructors with constant folding. Folding only removes exact identities, so
# evaluation is unchanged; it keeps second-order derivative trees small.

def add(a: Expr, b: Expr) -> Expr:
    if a.is_const and b.is_const:
        return Const(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return Binary("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if a.is_const and b.is_const:
        return Const(a.value - b.value)
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return Binary("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if a.is_const and b.is_const:
        return Const(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if _is(a, -1.0):
        return neg(b)
    if _is(b, -1.0):
        return neg(a)
    return Binary("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) and not _is(b, 0.0):
        return ZERO
    if _is(b, 1.0):
        return a
    if a.is_const and b.is_const and b.value != 0.0:
        return Const(a.value / b.value)
    return Binary("/", a, b)


def neg(a: Expr) -> Expr:
    if a.is_const:
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if a.is_const and not (a.value == 0.0 and n < 0):
        return Const(a.value**n)
    return Pow(a, n)


def func(name: str, a: Expr) -> Expr:
    return Func(name, a)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        n = len(text)
        while pos < n:
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ExprSyntaxError(f"unexpected character {text[start]!r}", self._byte(start))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def _byte(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.take()
        if text != value:
            what = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", self._byte(off))

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", self._byte(off))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = Binary(op, e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            e = Binary(op, e, rhs)
        return e

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, text, off = self.take()
        if kind != "num" or not text.isdigit():
            raise ExprSyntaxError("integer exponent required", self._byte(off))
        if paren:
            self.expect(")")
        return sign * int(text)

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            if text in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ArityError(f"function {text!r} expects 1 argument", self._byte(off))
                self.take()
                if self.peek()[1] == ")":
                    raise ArityError(f"function {text!r} expects 1 argument, got 0", self._byte(off))
                arg = self.expr()
                if self.peek()[1] == ",":
                    raise ArityError(f"function {text!r} expects 1 argument", self._byte(off))
                self.expect(")")
                return Func(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", self._byte(off))
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", self._byte(off))


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    >>> parse("-y").eval(2.0, 3.0)
    -3.0
    """
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text).parse()


def diff(e: Expr | str, v: str) -> Expr:
    if isinstance(e, str):
        e = parse(e)
    if v not in VARIABLES:
        raise ValueError(f"cannot differentiate with respect to {v!r}")
    return e.diff(v)


def evaluate(e: Expr | str, x: float, y: float) -> float:
    if isinstance(e, str):
        e = parse(e)
    return e.eval(float(x), float(y))


def as_expr(e: Expr | str | Number) -> Expr:
    if isinstance(e, str):
        return parse(e)
    return _lift(e)
