"""Expression language for the functions ``f(t)`` fed to the transforms.

Grammar (standard precedence, left associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INTEGER)?
    atom    := NUMBER | VARIABLE | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := exp | sin | cos | sqrt | ln

Exponents are integer literals only.  Numbers are read exactly (``0.25``
becomes the fraction 1/4).
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import EvaluationError, ExpressionSyntaxError
from .series import FormalPowerSeries

FUNCTIONS = ("exp", "sin", "cos", "sqrt", "ln")


@dataclass(frozen=True)
class Const:
    value: Fraction
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str = "t"
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    name: str
    arg: object
    pos: int = field(default=0, compare=False, repr=False)


# tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?|\.\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variable):
        self.text = text
        self.variable = variable
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, expected):
        raise ExpressionSyntaxError(message, self.tok[2], expected)

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self.fail(f"unexpected {self.tok[1]!r}", ["operator", "end of input"])
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            _, op, pos = self.advance()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            _, op, pos = self.advance()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            pos = self.advance()[2]
            return Neg(self.unary(), pos)
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            pos = self.advance()[2]
            sign = 1
            if self.tok[0] == "op" and self.tok[1] == "-":
                self.advance()
                sign = -1
            if self.tok[0] != "num" or not self.tok[1].isdigit():
                self.fail("missing exponent", ["integer exponent"])
            base = Pow(base, sign * int(self.advance()[1]), pos)
            if self.tok[0] == "op" and self.tok[1] == "^":
                self.fail("chained exponents need parentheses", ["operator", "end of input"])
        return base

    def atom(self):
        kind, value, pos = self.tok
        if kind == "num":
            self.advance()
            return Const(Fraction(value), pos)
        if kind == "name":
            self.advance()
            if value == self.variable:
                return Var(value, pos)
            if value in FUNCTIONS:
                if self.tok[1] != "(":
                    self.fail(f"function {value} needs an argument", ["'('"])
                self.advance()
                arg = self.expr()
                if self.tok[1] != ")":
                    self.fail("unbalanced parenthesis", ["')'"])
                self.advance()
                return Call(value, arg, pos)
            raise ExpressionSyntaxError(f"unknown name {value!r}", pos,
                                        [self.variable, *FUNCTIONS])
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            if self.tok[1] != ")":
                self.fail("unbalanced parenthesis", ["')'"])
            self.advance()
            return node
        self.fail("unexpected end of input" if kind == "end" else f"unexpected {value!r}",
                  ["number", self.variable, "function", "'('", "'-'"])


def parse_function(text: str, variable: str = "t"):
    """Parse ``text`` into an expression tree over ``variable``.

    >>> parse_function("exp(-t)")
    Call(name='exp', arg=Neg(arg=Var(name='t')))
    """
    return _Parser(text, variable).parse()


# printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _format_const(value: Fraction) -> str:
    if value.denominator == 1:
        text = str(value.numerator)
    else:
        d = value.denominator
        twos = fives = 0
        while d % 2 == 0:
            d //= 2
            twos += 1
        while d % 5 == 0:
            d //= 5
            fives += 1
        if d != 1:
            return f"({value.numerator}/{value.denominator})"
        places = max(twos, fives)
        scaled = abs(value) * 10 ** places
        digits = str(scaled.numerator).rjust(places + 1, "0")
        text = ("-" if value < 0 else "") + digits[:-places] + "." + digits[-places:]
    return f"({text})" if value < 0 else text


def to_text(node) -> str:
    """Canonical text; reparsing it gives back an identical tree."""
    if isinstance(node, Const):
        return _format_const(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        return "-" + (f"({inner})" if _prec(node.arg) < 3 else inner)
    if isinstance(node, Pow):
        inner = to_text(node.base)
        if _prec(node.base) < 5:
            inner = f"({inner})"
        return f"{inner}^{node.exponent}"
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    sep = " " if p == 1 else ""
    return f"{left}{sep}{node.op}{sep}{right}"


# evaluation ------------------------------------------------------------

def _compile(node):
    if isinstance(node, Const):
        c = float(node.value)
        return lambda t: c
    if isinstance(node, Var):
        return lambda t: t
    if isinstance(node, Neg):
        f = _compile(node.arg)
        return lambda t: -f(t)
    if isinstance(node, BinOp):
        f, g = _compile(node.left), _compile(node.right)
        if node.op == "+":
            return lambda t: f(t) + g(t)
        if node.op == "-":
            return lambda t: f(t) - g(t)
        if node.op == "*":
            return lambda t: f(t) * g(t)
        pos = node.pos

        def div(t):
            den = g(t)
            if den == 0:
                raise EvaluationError(f"division by zero at {t}", pos)
            return f(t) / den
        return div
    if isinstance(node, Pow):
        f, n, pos = _compile(node.base), node.exponent, node.pos

        def power(t):
            b = f(t)
            if b == 0 and n < 0:
                raise EvaluationError(f"zero to a negative power at {t}", pos)
            try:
                return b ** n
            except OverflowError:
                return math.copysign(math.inf, b) if n % 2 else math.inf
        return power
    return _compile_call(node)


def _compile_call(node):
    f, name, pos = _compile(node.arg), node.name, node.pos

    def call(t):
        x = f(t)
        cplx = isinstance(x, complex)
        lib = cmath if cplx else math
        if name == "exp":
            try:
                return lib.exp(x)
            except OverflowError:
                return math.inf
        if name == "sin":
            return lib.sin(x)
        if name == "cos":
            return lib.cos(x)
        if name == "sqrt":
            if not cplx and x < 0:
                raise EvaluationError(f"sqrt of negative value at {t}", pos)
            return lib.sqrt(x)
        if x == 0 or (not cplx and x < 0):
            raise EvaluationError(f"ln of non-positive value at {t}", pos)
        return lib.log(x)
    return call


# symbolic helpers --------------------------------------------------------

def _is_const(node, value=None):
    return isinstance(node, Const) and (value is None or node.value == value)


def _add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return BinOp("+", a, b)


def _sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is_const(a, 0) or _is_const(b, 0):
        return Const(Fraction(0))
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return BinOp("*", a, b)


def differentiate(node, variable="t"):
    """Symbolic derivative of an expression tree."""
    d = lambda n: differentiate(n, variable)  # noqa: E731
    if isinstance(node, Const):
        return Const(Fraction(0))
    if isinstance(node, Var):
        return Const(Fraction(1 if node.name == variable else 0))
    if isinstance(node, Neg):
        inner = d(node.arg)
        return Const(Fraction(0)) if _is_const(inner, 0) else Neg(inner)
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        if node.op == "+":
            return _add(d(u), d(v))
        if node.op == "-":
            return _sub(d(u), d(v))
        if node.op == "*":
            return _add(_mul(d(u), v), _mul(u, d(v)))
        num = _sub(_mul(d(u), v), _mul(u, d(v)))
        return Const(Fraction(0)) if _is_const(num, 0) else BinOp("/", num, Pow(v, 2))
    if isinstance(node, Pow):
        n = node.exponent
        if n == 0:
            return Const(Fraction(0))
        inner = Const(Fraction(1)) if n == 1 else Pow(node.base, n - 1)
        return _mul(_mul(Const(Fraction(n)), inner), d(node.base))
    u = node.arg
    du = d(u)
    if node.name == "exp":
        outer = node
    elif node.name == "sin":
        outer = Call("cos", u)
    elif node.name == "cos":
        outer = Neg(Call("sin", u))
    elif node.name == "sqrt":
        return Const(Fraction(0)) if _is_const(du, 0) else \
            BinOp("/", du, _mul(Const(Fraction(2)), node))
    else:
        return Const(Fraction(0)) if _is_const(du, 0) else BinOp("/", du, u)
    return _mul(outer, du)


def substitute(node, replacement, variable="t"):
    """Replace every occurrence of ``variable`` by the tree ``replacement``."""
    sub = lambda n: substitute(n, replacement, variable)  # noqa: E731
    if isinstance(node, Var):
        return replacement if node.name == variable else node
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(sub(node.arg), node.pos)
    if isinstance(node, BinOp):
        return BinOp(node.op, sub(node.left), sub(node.right), node.pos)
    if isinstance(node, Pow):
        return Pow(sub(node.base), node.exponent, node.pos)
    return Call(node.name, sub(node.arg), node.pos)


def _exact_sqrt(q: Fraction):
    if q <= 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        return None
    return Fraction(rn, rd)


def _series(node, order):
    """Plain power series of the tree at 0, or None when not exactly rational."""
    zero = FormalPowerSeries((0,) * (order + 1))
    if isinstance(node, Const):
        return zero + node.value
    if isinstance(node, Var):
        return FormalPowerSeries.monomial(1, order) if order >= 1 else zero
    parts = [_series(c, order) for c in _children(node)]
    if any(p is None for p in parts):
        return None
    if isinstance(node, Neg):
        return -parts[0]
    if isinstance(node, BinOp):
        u, v = parts
        if node.op == "+":
            return u + v
        if node.op == "-":
            return u - v
        if node.op == "*":
            return u * v
        if v[0] == 0:
            return None
        return u * v.reciprocal()
    if isinstance(node, Pow):
        u, n = parts[0], node.exponent
        if n < 0:
            if u[0] == 0:
                return None
            u, n = u.reciprocal(), -n
        out = zero + 1
        for _ in range(n):
            out = out * u
        return out
    u = parts[0]
    c0 = u[0]
    w = u - c0  # zero constant term, so w^j starts at order j
    if node.name in ("exp", "sin", "cos"):
        if c0 != 0:
            return None
        terms = []
        power = zero + 1
        for j in range(order + 1):
            terms.append(power * Fraction(1, factorial(j)))
            power = power * w
        keep = {"exp": lambda j: 1, "sin": lambda j: (0, 1, 0, -1)[j % 4],
                "cos": lambda j: (1, 0, -1, 0)[j % 4]}[node.name]
        out = zero
        for j, term in enumerate(terms):
            out = out + term * keep(j)
        return out
    if node.name == "ln":
        if c0 != 1:
            return None
        out, power = zero, zero + 1
        for j in range(1, order + 1):
            power = power * w
            out = out + power * Fraction((-1) ** (j + 1), j)
        return out
    root = _exact_sqrt(c0)
    if root is None:
        return None
    w = w * (1 / c0)
    out, power, coef = zero + 1, zero + 1, Fraction(1)
    for j in range(1, order + 1):
        coef = coef * (Fraction(1, 2) - (j - 1)) / j
        power = power * w
        out = out + power * coef
    return out * root


def _children(node):
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, (Neg, Call)):
        return (node.arg,)
    if isinstance(node, Pow):
        return (node.base,)
    return ()


class FunctionExpr:
    """A parsed function of one variable, callable on floats and complex numbers."""

    def __init__(self, ast, variable: str = "t"):
        self.ast = ast
        self.variable = variable
        self._fn = _compile(ast)

    @classmethod
    def parse(cls, text: str, variable: str = "t") -> "FunctionExpr":
        return cls(parse_function(text, variable), variable)

    def __call__(self, t):
        try:
            return self._fn(t)
        except ZeroDivisionError:
            raise EvaluationError(f"division by zero at {t}") from None

    def __repr__(self):
        return f"FunctionExpr({self.text!r})"

    def __eq__(self, other):
        return isinstance(other, FunctionExpr) and self.ast == other.ast

    def __hash__(self):
        return hash(self.ast)

    @property
    def text(self) -> str:
        return to_text(self.ast)

    def derivative(self) -> "FunctionExpr":
        return FunctionExpr(differentiate(self.ast, self.variable), self.variable)

    def rescaled(self, d) -> "FunctionExpr":
        """``t -> f(d t)``."""
        factor = Const(Fraction(d))
        return FunctionExpr(substitute(self.ast, BinOp("*", factor, Var(self.variable)),
                                       self.variable), self.variable)

    def taylor_coefficients(self, order: int):
        """Exact ``c_0..c_order`` with ``f(t) = sum_k c_k t^k / k!``, or None.

        None means some coefficient is not rational (``exp(1 + t)``) or the
        function is not analytic at 0 (``ln(t)``).
        """
        series = _series(self.ast, order)
        if series is None:
            return None
        return list(series.to_egf().coeffs)

    @staticmethod
    def linear_combination(A, f: "FunctionExpr", B, g: "FunctionExpr") -> "FunctionExpr":
        ast = BinOp("+", BinOp("*", Const(Fraction(A)), f.ast),
                    BinOp("*", Const(Fraction(B)), g.ast))
        return FunctionExpr(ast, f.variable)
