"""Closed-form expressions in one variable x, evaluated by Taylor-jet arithmetic.

Grammar (whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-'? power
    power   := primary ('^' exponent)?
    exponent:= '-'? number | '(' '-'? number ')'
    primary := number | 'x' | '(' expr ')' | func '(' expr ')'
    func    := exp | log | sqrt

Exponents are literal reals.  Error positions are 0-based character offsets.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, ExpressionSyntaxError, UnknownFunction
from .precision import F64, Arith

FUNCTIONS = ("exp", "log", "sqrt")


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: float


@dataclass(frozen=True)
class Exp:
    arg: "Expr"


@dataclass(frozen=True)
class Log:
    arg: "Expr"


@dataclass(frozen=True)
class Sqrt:
    arg: "Expr"


Expr = Union[Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sqrt]

_FUNC_NODES = {"exp": Exp, "log": Log, "sqrt": Sqrt}
_BINARY_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | end
    text: str
    pos: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected {text!r}, found {found!r}", self.tok.pos)

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            if self.accept("*"):
                node = Mul(node, self.factor())
            elif self.accept("/"):
                node = Div(node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        if self.accept("-"):
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.accept("^"):
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> float:
        if self.accept("("):
            value = self.signed_number()
            self.expect(")")
            return value
        return self.signed_number()

    def signed_number(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        if self.tok.kind != "number":
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"exponent must be a number, found {found!r}", self.tok.pos)
        return sign * float(self.advance().text)

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Constant(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == "x":
                return Variable()
            if self.tok.kind == "op" and self.tok.text == "(":
                if tok.text not in _FUNC_NODES:
                    raise UnknownFunction(tok.text, tok.pos)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return _FUNC_NODES[tok.text](arg)
            raise ExpressionSyntaxError(f"unknown identifier {tok.text!r}", tok.pos)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected {found!r}", tok.pos)


def parse(src: str) -> Expr:
    return _Parser(src).parse()


def _fmt_number(v: float) -> str:
    text = repr(float(v))
    return f"({text})" if v < 0 else text


def to_string(node: Expr) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, Constant):
        return repr(float(node.value))
    if isinstance(node, Variable):
        return "x"
    if isinstance(node, Neg):
        return f"(-{to_string(node.arg)})"
    if isinstance(node, Pow):
        return f"({to_string(node.base)}^{_fmt_number(node.exponent)})"
    if isinstance(node, (Exp, Log, Sqrt)):
        return f"{type(node).__name__.lower()}({to_string(node.arg)})"
    sym = _BINARY_SYMBOL[type(node)]
    return f"({to_string(node.left)} {sym} {to_string(node.right)})"


# -- Taylor coefficient arithmetic ------------------------------------------
# Series are lists a[0..N] of Taylor coefficients f^(n)(x0)/n!.


def series_mul(a: list, b: list) -> list:
    N = min(len(a), len(b))
    return [sum((a[j] * b[n - j] for j in range(1, n + 1)), a[0] * b[n]) for n in range(N)]


def series_div(a: list, b: list) -> list:
    if b[0] == 0:
        raise DomainError("division by zero")
    out: list = []
    for n in range(min(len(a), len(b))):
        acc = a[n]
        for j in range(1, n + 1):
            acc = acc - b[j] * out[n - j]
        out.append(acc / b[0])
    return out


def series_exp(arith: Arith, a: list) -> list:
    out = [arith.exp(a[0])]
    for n in range(1, len(a)):
        acc = arith.num(0)
        for j in range(1, n + 1):
            acc = acc + j * a[j] * out[n - j]
        out.append(acc / n)
    return out


def series_log(arith: Arith, a: list) -> list:
    if not a[0] > 0:
        raise DomainError(f"log of nonpositive value {arith.to_float(a[0])}")
    out = [arith.log(a[0])]
    for n in range(1, len(a)):
        acc = a[n] * n
        for j in range(1, n):
            acc = acc - j * out[j] * a[n - j]
        out.append(acc / (n * a[0]))
    return out


def series_sqrt(arith: Arith, a: list) -> list:
    if not a[0] > 0:
        raise DomainError(f"sqrt of nonpositive value {arith.to_float(a[0])}")
    out = [arith.sqrt(a[0])]
    for n in range(1, len(a)):
        acc = a[n]
        for j in range(1, n):
            acc = acc - out[j] * out[n - j]
        out.append(acc / (2 * out[0]))
    return out


def series_pow(arith: Arith, a: list, alpha) -> list:
    """Series of a^alpha.

    A positive leading coefficient uses the direct recurrence
    n a0 p_n = sum_j ((alpha+1) j - n) a_j p_{n-j}.  Integer exponents with a
    vanishing or negative leading coefficient fall back to repeated products.
    """
    alpha_f = float(alpha)
    if a[0] > 0:
        alpha = arith.num(alpha)
        out = [arith.power(a[0], alpha)]
        for n in range(1, len(a)):
            acc = arith.num(0)
            for j in range(1, n + 1):
                acc = acc + ((alpha + 1) * j - n) * a[j] * out[n - j]
            out.append(acc / (n * a[0]))
        return out
    if alpha_f.is_integer():
        e = int(alpha_f)
        one = [arith.num(1)] + [arith.num(0)] * (len(a) - 1)
        result, base, k = one, a, abs(e)
        while k:
            if k & 1:
                result = series_mul(result, base)
            k >>= 1
            if k:
                base = series_mul(base, base)
        return series_div(one, result) if e < 0 else result
    raise DomainError(f"non-integer power {alpha_f} of nonpositive value {arith.to_float(a[0])}")


def taylor(node: Expr, x0, N: int, arith: Arith = F64) -> list:
    """Taylor coefficients of the expression at x0, orders 0..N."""
    zero = arith.num(0)

    def walk(nd: Expr) -> list:
        if isinstance(nd, Constant):
            return [arith.num(nd.value)] + [zero] * N
        if isinstance(nd, Variable):
            out = [arith.num(x0)] + [zero] * N
            if N >= 1:
                out[1] = arith.num(1)
            return out
        if isinstance(nd, Add):
            return [p + q for p, q in zip(walk(nd.left), walk(nd.right))]
        if isinstance(nd, Sub):
            return [p - q for p, q in zip(walk(nd.left), walk(nd.right))]
        if isinstance(nd, Mul):
            return series_mul(walk(nd.left), walk(nd.right))
        if isinstance(nd, Div):
            return series_div(walk(nd.left), walk(nd.right))
        if isinstance(nd, Neg):
            return [-p for p in walk(nd.arg)]
        if isinstance(nd, Pow):
            return series_pow(arith, walk(nd.base), nd.exponent)
        if isinstance(nd, Exp):
            return series_exp(arith, walk(nd.arg))
        if isinstance(nd, Log):
            return series_log(arith, walk(nd.arg))
        if isinstance(nd, Sqrt):
            return series_sqrt(arith, walk(nd.arg))
        raise TypeError(f"not an expression node: {nd!r}")

    return walk(node)


@dataclass(frozen=True)
class Jet:
    """Value and derivatives f(x0), f'(x0), ..., f^(N)(x0)."""

    x0: object
    derivs: tuple

    @property
    def order(self) -> int:
        return len(self.derivs) - 1

    def __getitem__(self, n: int):
        return self.derivs[n]


def coeffs_to_derivs(arith: Arith, coeffs: list) -> list:
    out = []
    fact = arith.num(1)
    for n, c in enumerate(coeffs):
        if n:
            fact = fact * n
        out.append(c * fact)
    return out


def derivs_to_coeffs(arith: Arith, derivs) -> list:
    out = []
    fact = arith.num(1)
    for n, d in enumerate(derivs):
        if n:
            fact = fact * n
        out.append(d / fact)
    return out


def jet_eval(node: Expr, x, N: int, arith: Arith = F64) -> Jet:
    derivs = coeffs_to_derivs(arith, taylor(node, x, N, arith))
    if arith is F64 and not all(math.isfinite(d) for d in derivs):
        raise DomainError(f"non-finite derivative at x={x}")
    return Jet(x0=arith.num(x), derivs=tuple(derivs))


def eval_complex(node: Expr, z: complex) -> complex:
    """Principal-branch complex evaluation, for checks off the real axis."""

    def walk(nd: Expr) -> complex:
        if isinstance(nd, Constant):
            return complex(nd.value)
        if isinstance(nd, Variable):
            return complex(z)
        if isinstance(nd, Add):
            return walk(nd.left) + walk(nd.right)
        if isinstance(nd, Sub):
            return walk(nd.left) - walk(nd.right)
        if isinstance(nd, Mul):
            return walk(nd.left) * walk(nd.right)
        if isinstance(nd, Div):
            d = walk(nd.right)
            if d == 0:
                raise DomainError("division by zero")
            return walk(nd.left) / d
        if isinstance(nd, Neg):
            return -walk(nd.arg)
        if isinstance(nd, Pow):
            b = walk(nd.base)
            if float(nd.exponent).is_integer():
                if b == 0 and nd.exponent < 0:
                    raise DomainError("division by zero")
                return b ** int(nd.exponent)
            if b == 0:
                if nd.exponent > 0:
                    return 0j
                raise DomainError("division by zero")
            return cmath.exp(nd.exponent * cmath.log(b))
        if isinstance(nd, Exp):
            return cmath.exp(walk(nd.arg))
        if isinstance(nd, Log):
            v = walk(nd.arg)
            if v == 0:
                raise DomainError("log of zero")
            return cmath.log(v)
        if isinstance(nd, Sqrt):
            return cmath.sqrt(walk(nd.arg))
        raise TypeError(f"not an expression node: {nd!r}")

    return walk(node)
