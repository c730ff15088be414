"""Expression trees for vector fields and constraint maps.

Supports point evaluation, natural interval evaluation, vectorized numpy
evaluation, and symbolic Clarke-derivative bound computation.  Trees are
immutable; sums and products are n-ary and flattened by the parser to keep
natural-inclusion dependency pessimism deterministic.

Grammar (see parse_expr):
    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' integer)?
    base   := number | ident | '(' expr ')' | func '(' expr (',' expr)? ')'
              | '-' base
    func   in {sin, cos, exp, sqrt, arctan, abs, min, max}
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    ExprSyntaxError,
    UnboundedBothSides,
    UnknownIdentifier,
)
from .interval import Box, Interval, arith

_INF = math.inf
_FMAX = sys.float_info.max

# ---------------------------------------------------------------------------
# Node types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # neg | sin | cos | exp | sqrt | arctan | abs
    child: Expr


@dataclass(frozen=True)
class Pow(Expr):
    child: Expr
    exponent: int


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # min | max
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sum(Expr):
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class Prod(Expr):
    children: tuple[Expr, ...]


_UNARY_FUNCS = ("sin", "cos", "exp", "sqrt", "arctan", "abs")
_BINARY_FUNCS = ("min", "max")


def max_var_index(e: Expr) -> int:
    """Largest variable index referenced, or -1 for a constant tree."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Const):
        return -1
    if isinstance(e, Unary):
        return max_var_index(e.child)
    if isinstance(e, Pow):
        return max_var_index(e.child)
    if isinstance(e, Div):
        return max(max_var_index(e.num), max_var_index(e.den))
    if isinstance(e, Binary):
        return max(max_var_index(e.left), max_var_index(e.right))
    return max((max_var_index(c) for c in e.children), default=-1)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.vars = {name: i for i, name in enumerate(variables)}
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise ExprSyntaxError(f"unexpected character {stripped[0]!r}",
                                      len(text) - len(stripped))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.next()
        if tok[1] != value:
            raise ExprSyntaxError(f"expected {value!r}, found {tok[1]!r}", tok[2])

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ExprSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while (tok := self.peek()) is not None and tok[1] in "+-":
            self.next()
            t = self.term()
            terms.append(Unary("neg", t) if tok[1] == "-" else t)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Expr:
        factors = [self.factor()]
        while (tok := self.peek()) is not None and tok[1] in "*/":
            self.next()
            f = self.factor()
            if tok[1] == "/":
                left = factors[0] if len(factors) == 1 else Prod(tuple(factors))
                factors = [Div(left, f)]
            else:
                factors.append(f)
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def factor(self) -> Expr:
        b = self.base()
        if (tok := self.peek()) is not None and tok[1] == "^":
            self.next()
            sign = 1
            tok = self.next()
            if tok[1] == "-":
                sign = -1
                tok = self.next()
            if tok[0] != "num" or not tok[1].isdigit():
                raise ExprSyntaxError("exponent must be an integer", tok[2])
            return Pow(b, sign * int(tok[1]))
        return b

    def base(self) -> Expr:
        tok = self.next()
        kind, value, offset = tok
        if value == "-":
            return Unary("neg", self.base())
        if value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "num":
            return Const(float(value))
        if kind == "ident":
            if value in _UNARY_FUNCS or value in _BINARY_FUNCS:
                self.expect("(")
                first = self.expr()
                if value in _BINARY_FUNCS:
                    self.expect(",")
                    second = self.expr()
                    self.expect(")")
                    return Binary(value, first, second)
                self.expect(")")
                return Unary(value, first)
            if value not in self.vars:
                raise UnknownIdentifier(f"unknown identifier {value!r}")
            return Var(self.vars[value])
        raise ExprSyntaxError(f"unexpected token {value!r}", offset)


def parse_expr(text: str, variables: Sequence[str]) -> Expr:
    """Parse an expression over the declared variable names."""
    return _Parser(text, variables).parse()


# ---------------------------------------------------------------------------
# Pretty printer (round-trips through parse_expr)
# ---------------------------------------------------------------------------

_PREC_SUM, _PREC_PROD, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def to_string(e: Expr, variables: Sequence[str]) -> str:
    return _fmt(e, variables, 0)


def _fmt(e: Expr, names: Sequence[str], parent_prec: int) -> str:
    if isinstance(e, Const):
        s, prec = repr(e.value), _PREC_ATOM
    elif isinstance(e, Var):
        s, prec = names[e.index], _PREC_ATOM
    elif isinstance(e, Unary) and e.op == "neg":
        # a Pow child must keep its parens: "-(x^2)" and "-x^2" parse
        # differently because unary minus binds to the base
        inner = _PREC_ATOM if isinstance(e.child, Pow) else _PREC_POW
        s, prec = "-" + _fmt(e.child, names, inner), _PREC_PROD
    elif isinstance(e, Unary):
        s, prec = f"{e.op}({_fmt(e.child, names, 0)})", _PREC_ATOM
    elif isinstance(e, Binary):
        s = f"{e.op}({_fmt(e.left, names, 0)}, {_fmt(e.right, names, 0)})"
        prec = _PREC_ATOM
    elif isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"-{-e.exponent}"
        s, prec = f"{_fmt(e.child, names, _PREC_POW + 1)}^{exp}", _PREC_POW
    elif isinstance(e, Div):
        s = f"{_fmt(e.num, names, _PREC_PROD)}/{_fmt(e.den, names, _PREC_PROD + 1)}"
        prec = _PREC_PROD
    elif isinstance(e, Sum):
        parts = [_fmt(e.children[0], names, _PREC_SUM)]
        for c in e.children[1:]:
            if isinstance(c, Unary) and c.op == "neg":
                inner = _PREC_ATOM if isinstance(c.child, Pow) else _PREC_POW
                parts.append(" - " + _fmt(c.child, names, inner))
            else:
                parts.append(" + " + _fmt(c, names, _PREC_SUM + 1))
        s, prec = "".join(parts), _PREC_SUM
    elif isinstance(e, Prod):
        s = "*".join(_fmt(c, names, _PREC_PROD + 1) for c in e.children)
        prec = _PREC_PROD
    else:
        raise TypeError(f"unknown node {e!r}")
    return f"({s})" if prec < parent_prec else s


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_point(e: Expr, z: Sequence[float]) -> float:
    """Real evaluation of e at a point."""
    try:
        return _eval_point(e, z)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(str(exc)) from exc


def _eval_point(e: Expr, z: Sequence[float]) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return z[e.index]
    if isinstance(e, Unary):
        x = _eval_point(e.child, z)
        return _POINT_UNARY[e.op](x)
    if isinstance(e, Pow):
        from .interval import _pow_float

        return _pow_float(_eval_point(e.child, z), e.exponent)
    if isinstance(e, Div):
        return _eval_point(e.num, z) / _eval_point(e.den, z)
    if isinstance(e, Binary):
        a, b = _eval_point(e.left, z), _eval_point(e.right, z)
        return min(a, b) if e.op == "min" else max(a, b)
    if isinstance(e, Sum):
        terms = [_eval_point(c, z) for c in e.children]
        try:
            return math.fsum(terms)
        except (OverflowError, ValueError):
            return sum(terms)  # overflow degrades to inf/nan; callers saturate
    acc = 1.0
    for c in e.children:
        acc *= _eval_point(c, z)
    return acc


def _exp_point(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


_POINT_UNARY = {
    "neg": lambda x: -x,
    "sin": math.sin,
    "cos": math.cos,
    "exp": _exp_point,
    "sqrt": math.sqrt,
    "arctan": math.atan,
    "abs": abs,
}

_NP_UNARY = {
    "neg": np.negative,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "arctan": np.arctan,
    "abs": np.abs,
}


def eval_vec(e: Expr, cols: np.ndarray) -> np.ndarray:
    """Vectorized evaluation; cols has shape (n_vars, n_points)."""
    if isinstance(e, Const):
        return np.full(cols.shape[1], e.value)
    if isinstance(e, Var):
        return cols[e.index]
    if isinstance(e, Unary):
        return _NP_UNARY[e.op](eval_vec(e.child, cols))
    if isinstance(e, Pow):
        return eval_vec(e.child, cols) ** float(e.exponent)
    if isinstance(e, Div):
        return eval_vec(e.num, cols) / eval_vec(e.den, cols)
    if isinstance(e, Binary):
        a, b = eval_vec(e.left, cols), eval_vec(e.right, cols)
        return np.minimum(a, b) if e.op == "min" else np.maximum(a, b)
    if isinstance(e, Sum):
        acc = eval_vec(e.children[0], cols)
        for c in e.children[1:]:
            acc = acc + eval_vec(c, cols)
        return acc
    acc = eval_vec(e.children[0], cols)
    for c in e.children[1:]:
        acc = acc * eval_vec(c, cols)
    return acc


def eval_interval(e: Expr, box: Box) -> Interval:
    """Natural interval evaluation: a sound enclosure of the range over box."""
    if max_var_index(e) >= len(box):
        raise DimensionMismatch("expression references variable outside box")
    return _eval_iv(e, box)


def _eval_iv(e: Expr, box: Box) -> Interval:
    if isinstance(e, Const):
        return Interval.point(e.value)
    if isinstance(e, Var):
        return box[e.index]
    if isinstance(e, Unary):
        return arith(e.op, _eval_iv(e.child, box))
    if isinstance(e, Pow):
        return arith("pow_int", _eval_iv(e.child, box), exponent=e.exponent)
    if isinstance(e, Div):
        return arith("div", _eval_iv(e.num, box), _eval_iv(e.den, box))
    if isinstance(e, Binary):
        return arith(e.op, _eval_iv(e.left, box), _eval_iv(e.right, box))
    if isinstance(e, Sum):
        acc = _eval_iv(e.children[0], box)
        for c in e.children[1:]:
            acc = acc + _eval_iv(c, box)
        return acc
    acc = _eval_iv(e.children[0], box)
    for c in e.children[1:]:
        acc = acc * _eval_iv(c, box)
    return acc


# ---------------------------------------------------------------------------
# Clarke-derivative bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClarkeInterval:
    """Extended-real enclosure of a Clarke partial derivative over a box."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"Clarke interval lower bound exceeds upper: {self}")

    @property
    def finite_both(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def unbounded_both(self) -> bool:
        return self.lo == -_INF and self.hi == _INF

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def __repr__(self) -> str:
        return f"[{self.lo:g}, {self.hi:g}]"


def _clip_overflow(value: float, *operands: float) -> float:
    """Saturate overflow of finite inputs; keep genuinely infinite results."""
    if math.isinf(value) and all(math.isfinite(x) for x in operands):
        return math.copysign(_FMAX, value)
    return value


def _xadd(a: ClarkeInterval, b: ClarkeInterval) -> ClarkeInterval:
    lo = -_INF if (a.lo == -_INF or b.lo == -_INF) else _clip_overflow(a.lo + b.lo, a.lo, b.lo)
    hi = _INF if (a.hi == _INF or b.hi == _INF) else _clip_overflow(a.hi + b.hi, a.hi, b.hi)
    return ClarkeInterval(lo, hi)


def _xneg(a: ClarkeInterval) -> ClarkeInterval:
    return ClarkeInterval(-a.hi, -a.lo)


def _corner(a: float, b: float) -> float:
    # 0 * inf contributes 0 to corner enumeration (exact-zero endpoint)
    if a == 0.0 or b == 0.0:
        return 0.0
    return _clip_overflow(a * b, a, b)


def _xmul(a: ClarkeInterval, b: ClarkeInterval) -> ClarkeInterval:
    c = (_corner(a.lo, b.lo), _corner(a.lo, b.hi),
         _corner(a.hi, b.lo), _corner(a.hi, b.hi))
    return ClarkeInterval(min(c), max(c))


def _xfrom(iv: Interval) -> ClarkeInterval:
    return ClarkeInterval(iv.lo, iv.hi)


def _xdiv_pos(a: ClarkeInterval, den: Interval) -> ClarkeInterval:
    """a / den for den with den.lo >= 0 (den.lo == 0 yields infinite sides)."""
    if den.lo > 0.0:
        c = tuple(
            _clip_overflow(num / d, num, d) if math.isfinite(num) else num
            for num in (a.lo, a.hi)
            for d in (den.lo, den.hi)
        )
        return ClarkeInterval(min(c), max(c))
    if den.hi == 0.0:
        # derivative through a flat sqrt(0) point: unbounded wherever a != 0
        lo = -_INF if a.lo < 0.0 else 0.0
        hi = _INF if a.hi > 0.0 else 0.0
        return ClarkeInterval(lo, hi)
    lo = -_INF if a.lo < 0.0 else (0.0 if a.lo == 0.0 else a.lo / den.hi)
    hi = _INF if a.hi > 0.0 else (0.0 if a.hi == 0.0 else a.hi / den.hi)
    return ClarkeInterval(lo, hi)


_ZERO_X = ClarkeInterval(0.0, 0.0)


def _clarke(e: Expr, j: int, box: Box) -> ClarkeInterval:
    """Enclosure of the j-th Clarke partial of e over box."""
    if isinstance(e, (Const,)):
        return _ZERO_X
    if isinstance(e, Var):
        return ClarkeInterval(1.0, 1.0) if e.index == j else _ZERO_X
    if isinstance(e, Unary):
        d = _clarke(e.child, j, box)
        if e.op == "neg":
            return _xneg(d)
        u = _eval_iv(e.child, box)
        if e.op == "sin":
            return _xmul(_xfrom(arith("cos", u)), d)
        if e.op == "cos":
            return _xmul(_xneg(_xfrom(arith("sin", u))), d)
        if e.op == "exp":
            return _xmul(_xfrom(arith("exp", u)), d)
        if e.op == "arctan":
            den = Interval(1.0, 1.0) + arith("pow_int", u, exponent=2)
            return _xdiv_pos(d, den)
        if e.op == "sqrt":
            root = arith("sqrt", u)
            return _xdiv_pos(d, root.scale(2.0))
        if e.op == "abs":
            # sign(u) * u'; the kink at 0 contributes conv{+-u'}
            if u.lo > 0.0:
                return d
            if u.hi < 0.0:
                return _xneg(d)
            return _xmul(ClarkeInterval(-1.0, 1.0), d)
        raise ValueError(f"unknown unary op {e.op!r}")
    if isinstance(e, Pow):
        d = _clarke(e.child, j, box)
        u = _eval_iv(e.child, box)
        if e.exponent == 0:
            return _ZERO_X
        factor = arith("pow_int", u, exponent=e.exponent - 1).scale(float(e.exponent))
        return _xmul(_xfrom(factor), d)
    if isinstance(e, Div):
        du = _clarke(e.num, j, box)
        dv = _clarke(e.den, j, box)
        u = _eval_iv(e.num, box)
        v = _eval_iv(e.den, box)
        num = _xadd(_xmul(du, _xfrom(v)), _xneg(_xmul(_xfrom(u), dv)))
        vsq = arith("pow_int", v, exponent=2)
        return _xdiv_pos(num, vsq)
    if isinstance(e, Binary):
        da, db = _clarke(e.left, j, box), _clarke(e.right, j, box)
        a, b = _eval_iv(e.left, box), _eval_iv(e.right, box)
        if e.op == "min":
            if a.hi < b.lo:
                return da
            if b.hi < a.lo:
                return db
        else:
            if a.lo > b.hi:
                return da
            if b.lo > a.hi:
                return db
        # branches can tie: hull of both branch derivatives
        return ClarkeInterval(min(da.lo, db.lo), max(da.hi, db.hi))
    if isinstance(e, Sum):
        acc = _ZERO_X
        for c in e.children:
            acc = _xadd(acc, _clarke(c, j, box))
        return acc
    # product rule over the flattened factor list
    ivs = [_eval_iv(c, box) for c in e.children]
    acc = _ZERO_X
    for i, c in enumerate(e.children):
        term = _clarke(c, j, box)
        for k, iv in enumerate(ivs):
            if k != i:
                term = _xmul(term, _xfrom(iv))
        acc = _xadd(acc, term)
    return acc


@dataclass(frozen=True)
class JacobianBounds:
    """Per-entry extended-real bounds on Clarke partial derivatives."""

    entries: tuple[tuple[ClarkeInterval, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def row(self, i: int) -> tuple[ClarkeInterval, ...]:
        return self.entries[i]

    def __getitem__(self, ij: tuple[int, int]) -> ClarkeInterval:
        return self.entries[ij[0]][ij[1]]


def clarke_jacobian_bounds(
    exprs: Sequence[Expr],
    box: Box,
    overrides: dict[tuple[int, int], ClarkeInterval] | None = None,
) -> JacobianBounds:
    """Symbolic Clarke differentiation + natural interval evaluation.

    overrides replaces individual (row, col) entries, e.g. with tighter
    analytically-known bounds from a model file.
    """
    n_z = len(box)
    rows = []
    bad = []
    for i, e in enumerate(exprs):
        row = []
        for j in range(n_z):
            if overrides and (i, j) in overrides:
                entry = overrides[(i, j)]
            else:
                entry = _clarke(e, j, box)
            if entry.unbounded_both:
                bad.append((i, j))
            row.append(entry)
        rows.append(tuple(row))
    if bad:
        raise UnboundedBothSides(f"Clarke bounds unbounded on both sides at {bad}")
    return JacobianBounds(tuple(rows))
