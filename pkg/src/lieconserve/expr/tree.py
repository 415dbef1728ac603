"""Immutable expression trees over jet coordinates and opaque function symbols.

Every expression produced by the helper constructors (``add``, ``mul``,
``power``, ``neg``) and by the operator overloads is kept in a normal form:
sums and products are flattened, products are expanded over sums, like terms
are collected, rational constants are folded exactly, and operands are put in
a fixed canonical order.  Normalization is idempotent, so structural equality
(``==``) is reliable on normalized trees.  Quotients stay factored as
``Power(..., -1)``; there is no rational-function normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rational = Union[int, Fraction]

MAX_JET_ORDER = 3

# Expanding (x + y)^n is bounded so normalization stays cheap; exponents past
# the cap keep the power node atomic.
_EXPAND_POW_CAP = 8


class ExprError(Exception):
    """Malformed expression construction or manipulation."""


class JetDepthError(ExprError):
    """A jet symbol beyond the supported derivative order was requested."""


@dataclass(frozen=True)
class Expr:
    """Base class; all nodes are frozen dataclasses and hashable."""

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __pow__(self, exponent):
        return power(self, exponent)

    def __neg__(self):
        return neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Jet(Expr):
    """A jet-space coordinate: ``t``, ``x``, or a field derivative.

    ``field`` is one of ``t``/``x`` (base coordinates, no subscripts) or
    ``u``/``v`` with ``nx`` x-derivatives and ``nt`` t-derivatives.  Mixed
    subscripts are canonical with every ``x`` before every ``t``.
    """

    field: str
    nx: int = 0
    nt: int = 0

    def __post_init__(self):
        if self.field in ("t", "x"):
            if self.nx or self.nt:
                raise ExprError("coordinates t, x carry no jet subscripts")
        elif self.field in ("u", "v"):
            if self.nx < 0 or self.nt < 0:
                raise ExprError("negative derivative count")
            if self.nx + self.nt > MAX_JET_ORDER:
                raise JetDepthError(
                    "jet symbols are supported up to order %d, got %s"
                    % (MAX_JET_ORDER, jet_name(self.field, self.nx, self.nt))
                )
        else:
            raise ExprError("unknown field %r" % (self.field,))

    @property
    def order(self) -> int:
        return self.nx + self.nt


@dataclass(frozen=True)
class Param(Expr):
    """A named scalar parameter, independent of t, x and the fields."""

    name: str


@dataclass(frozen=True)
class Func(Expr):
    """Application of an opaque function symbol to argument expressions."""

    name: str
    args: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __post_init__(self):
        if not isinstance(self.exponent, Fraction):
            object.__setattr__(self, "exponent", Fraction(self.exponent))


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
TWO = Const(Fraction(2))

T = Jet("t")
X = Jet("x")
U = Jet("u")
U_X = Jet("u", 1, 0)
U_T = Jet("u", 0, 1)
U_XX = Jet("u", 2, 0)
U_XT = Jet("u", 1, 1)
U_TT = Jet("u", 0, 2)
V = Jet("v")
V_X = Jet("v", 1, 0)
V_T = Jet("v", 0, 1)


def jet_name(field: str, nx: int, nt: int) -> str:
    if nx == 0 and nt == 0:
        return field
    return field + "_" + "x" * nx + "t" * nt


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(Fraction(value))
    raise ExprError("cannot interpret %r as an expression" % (value,))


def fraction(num: int, den: int = 1) -> Expr:
    return Const(Fraction(num, den))


# ---------------------------------------------------------------------------
# canonical ordering


def sort_key(e: Expr):
    """Total order on normalized expressions; only determinism matters."""
    if isinstance(e, Const):
        return (0, (e.value.numerator, e.value.denominator))
    if isinstance(e, Jet):
        if e.field in ("t", "x"):
            return (1, e.field)
        return (4, e.field, e.order, e.nx, e.nt)
    if isinstance(e, Param):
        return (2, e.name)
    if isinstance(e, Func):
        return (3, e.name, len(e.args)) + tuple(sort_key(a) for a in e.args)
    if isinstance(e, Pow):
        return (5, sort_key(e.base), (e.exponent.numerator, e.exponent.denominator))
    if isinstance(e, Mul):
        return (6, len(e.factors)) + tuple(sort_key(f) for f in e.factors)
    if isinstance(e, Add):
        return (7, len(e.terms)) + tuple(sort_key(t) for t in e.terms)
    if isinstance(e, Neg):
        return (8,) + (sort_key(e.operand),)
    raise ExprError("unknown node %r" % (e,))


# ---------------------------------------------------------------------------
# term/factor decomposition helpers (on normalized nodes)


def split_coeff(e: Expr) -> tuple[Fraction, Expr | None]:
    """Split a normalized term into (rational coefficient, monomial).

    The monomial is ``None`` for pure constants.
    """
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Neg):
        c, m = split_coeff(e.operand)
        return -c, m
    if isinstance(e, Mul) and e.factors and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        mono = rest[0] if len(rest) == 1 else Mul(rest)
        return e.factors[0].value, mono
    return Fraction(1), e


def base_exponent(f: Expr) -> tuple[Expr, Fraction]:
    if isinstance(f, Pow):
        return f.base, f.exponent
    return f, Fraction(1)


def _with_coeff(c: Fraction, mono: Expr | None) -> Expr:
    if c == 0:
        return ZERO
    if mono is None:
        return Const(c)
    if c == 1:
        return mono
    if c < 0:
        return Neg(_with_coeff(-c, mono))
    factors = mono.factors if isinstance(mono, Mul) else (mono,)
    return Mul((Const(c),) + factors)


# ---------------------------------------------------------------------------
# normalizing constructors


def add(*terms) -> Expr:
    return _canon_add([as_expr(t) for t in terms])


def mul(*factors) -> Expr:
    return _canon_mul([as_expr(f) for f in factors])


def neg(e) -> Expr:
    return _canon_neg(as_expr(e))


def power(base, exponent) -> Expr:
    if isinstance(exponent, Expr):
        if not isinstance(exponent, Const):
            raise ExprError("exponents must be exact rationals")
        exponent = exponent.value
    return _canon_pow(as_expr(base), Fraction(exponent))


def _canon_add(terms: Iterable[Expr]) -> Expr:
    coeffs: dict[Expr | None, Fraction] = {}
    order: list[Expr | None] = []

    def absorb(t: Expr):
        if isinstance(t, Add):
            for s in t.terms:
                absorb(s)
            return
        c, mono = split_coeff(t)
        if mono not in coeffs:
            coeffs[mono] = Fraction(0)
            order.append(mono)
        coeffs[mono] += c

    for t in terms:
        absorb(t)

    monos = [m for m in coeffs if coeffs[m] != 0]
    monos.sort(key=lambda m: (0,) if m is None else (1, sort_key(m)))
    out = [_with_coeff(coeffs[m], m) for m in monos]
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def _canon_mul(factors: Iterable[Expr]) -> Expr:
    coeff = Fraction(1)
    plain: list[Expr] = []
    sums: list[Add] = []

    def absorb(f: Expr):
        nonlocal coeff
        if isinstance(f, Mul):
            for g in f.factors:
                absorb(g)
            return
        if isinstance(f, Neg):
            coeff = -coeff
            absorb(f.operand)
            return
        if isinstance(f, Const):
            coeff *= f.value
            return
        if isinstance(f, Add):
            sums.append(f)
            return
        plain.append(f)

    for f in factors:
        absorb(f)

    if coeff == 0:
        return ZERO

    if sums:
        # expand products over sums one sum at a time
        first, rest = sums[0], sums[1:]
        pieces = [
            _canon_mul([Const(coeff), term] + plain + list(rest))
            for term in first.terms
        ]
        return _canon_add(pieces)

    powers: dict[Expr, Fraction] = {}
    seen: list[Expr] = []
    for f in plain:
        b, q = base_exponent(f)
        if b not in powers:
            powers[b] = Fraction(0)
            seen.append(b)
        powers[b] += q

    out: list[Expr] = []
    for b in seen:
        q = powers[b]
        if q == 0:
            continue
        out.append(b if q == 1 else _canon_pow(b, q))

    if any(isinstance(f, (Add, Mul, Neg, Const)) for f in out):
        # exponent collection re-expanded something; run the product again
        return _canon_mul([Const(coeff)] + out)
    out.sort(key=sort_key)

    if not out:
        return Const(coeff)
    mono = out[0] if len(out) == 1 else Mul(tuple(out))
    return _with_coeff(coeff, mono)


def _canon_pow(base: Expr, q: Fraction) -> Expr:
    if q == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0:
            if q < 0:
                raise ExprError("zero raised to a negative power")
            return ZERO if q > 0 else ONE
        if q == 0:
            return ONE
        if q.denominator == 1:
            return Const(base.value ** q.numerator)
        return Pow(base, q)
    if q == 0:
        return ONE
    if isinstance(base, Neg):
        if q.denominator == 1:
            inner = _canon_pow(base.operand, q)
            return inner if q.numerator % 2 == 0 else _canon_neg(inner)
        return Pow(base, q)
    if isinstance(base, Pow):
        if q.denominator == 1:
            return _canon_pow(base.base, base.exponent * q)
        return Pow(base, q)
    if isinstance(base, Mul):
        return _canon_mul([_canon_pow(f, q) for f in base.factors])
    if isinstance(base, Add):
        if q.denominator == 1 and 2 <= q <= _EXPAND_POW_CAP:
            return _canon_mul([base] * int(q))
        return Pow(base, q)
    return Pow(base, q)


def _canon_neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.operand
    if isinstance(e, Add):
        return _canon_add([_canon_neg(t) for t in e.terms])
    c, mono = split_coeff(e)
    return _with_coeff(-c, mono)


def normalize(e: Expr) -> Expr:
    """Fully normalize an arbitrary tree (children first)."""
    if isinstance(e, (Const, Jet, Param)):
        return e
    if isinstance(e, Func):
        return Func(e.name, tuple(normalize(a) for a in e.args))
    if isinstance(e, Pow):
        return _canon_pow(normalize(e.base), e.exponent)
    if isinstance(e, Neg):
        return _canon_neg(normalize(e.operand))
    if isinstance(e, Mul):
        return _canon_mul([normalize(f) for f in e.factors])
    if isinstance(e, Add):
        return _canon_add([normalize(t) for t in e.terms])
    raise ExprError("unknown node %r" % (e,))


# ---------------------------------------------------------------------------
# traversal and queries


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, Func):
        for a in e.args:
            yield from walk(a)
    elif isinstance(e, Pow):
        yield from walk(e.base)
    elif isinstance(e, Neg):
        yield from walk(e.operand)
    elif isinstance(e, Mul):
        for f in e.factors:
            yield from walk(f)
    elif isinstance(e, Add):
        for t in e.terms:
            yield from walk(t)


def free_symbols(e: Expr) -> set[Expr]:
    """All Jet and Param leaves occurring in e."""
    return {n for n in walk(e) if isinstance(n, (Jet, Param))}


def function_names(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Func)}


def max_jet_order(e: Expr) -> int:
    orders = [n.order for n in walk(e) if isinstance(n, Jet) and n.field in ("u", "v")]
    return max(orders, default=0)


def contains(e: Expr, sym: Expr) -> bool:
    return any(n == sym for n in walk(e))


def substitute(e: Expr, bindings: Mapping[Expr, Expr]) -> Expr:
    """Simultaneous substitution of Jet/Param symbols; result is normalized."""
    for target in bindings:
        if not isinstance(target, (Jet, Param)):
            raise ExprError("substitution targets must be symbols, got %r" % (target,))

    def go(n: Expr) -> Expr:
        if isinstance(n, (Jet, Param)):
            return bindings.get(n, n)
        if isinstance(n, Const):
            return n
        if isinstance(n, Func):
            return Func(n.name, tuple(go(a) for a in n.args))
        if isinstance(n, Pow):
            return Pow(go(n.base), n.exponent)
        if isinstance(n, Neg):
            return Neg(go(n.operand))
        if isinstance(n, Mul):
            return Mul(tuple(go(f) for f in n.factors))
        if isinstance(n, Add):
            return Add(tuple(go(t) for t in n.terms))
        raise ExprError("unknown node %r" % (n,))

    return normalize(go(e))


# ---------------------------------------------------------------------------
# printing

_PREC_ADD = 10
_PREC_MUL = 20
_PREC_NEG = 25
_PREC_POW = 30
_PREC_ATOM = 100


def _frac_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def _render(e: Expr, prec: int) -> str:
    text, p = _render_prec(e)
    if p < prec:
        return "(" + text + ")"
    return text


def _render_term(e: Expr) -> tuple[bool, str]:
    """Render a term as (is_negative, unsigned text)."""
    c, mono = split_coeff(e)
    negative = c < 0
    c = abs(c)
    if mono is None:
        return negative, _frac_text(c)
    factors = list(mono.factors) if isinstance(mono, Mul) else [mono]
    nums: list[str] = []
    dens: list[str] = []
    if c.numerator != 1:
        nums.append(str(c.numerator))
    if c.denominator != 1:
        dens.append(str(c.denominator))
    for f in factors:
        b, q = base_exponent(f)
        if q < 0:
            target = dens
            q = -q
        else:
            target = nums
        if q == 1:
            target.append(_render(b, _PREC_MUL + 1))
        else:
            target.append(_render(_canon_pow_node(b, q), _PREC_MUL + 1))
    if not nums:
        nums.append("1")
    text = "*".join(nums)
    if dens:
        if len(dens) == 1:
            text += "/" + dens[0]
        else:
            text += "/(" + "*".join(dens) + ")"
    return negative, text


def _canon_pow_node(b: Expr, q: Fraction) -> Expr:
    # plain node for printing only; q is positive and not 1
    return Pow(b, q)


def _render_prec(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        if e.value < 0:
            return "-" + _frac_text(-e.value), _PREC_NEG
        if e.value.denominator != 1:
            return _frac_text(e.value), _PREC_MUL
        return _frac_text(e.value), _PREC_ATOM
    if isinstance(e, Jet):
        return jet_name(e.field, e.nx, e.nt), _PREC_ATOM
    if isinstance(e, Param):
        return e.name, _PREC_ATOM
    if isinstance(e, Func):
        return e.name + "(" + ", ".join(_render(a, 0) for a in e.args) + ")", _PREC_ATOM
    if isinstance(e, Pow):
        q = e.exponent
        base = _render(e.base, _PREC_POW + 1)
        if q.denominator == 1 and q >= 0:
            return base + "^" + str(q.numerator), _PREC_POW
        if q < 0 and q.denominator == 1:
            # lone reciprocal power reads better as a quotient
            return "1/" + base + ("" if q == -1 else "^" + str(-q.numerator)), _PREC_MUL
        return base + "^(" + _frac_text(q) + ")", _PREC_POW
    if isinstance(e, (Neg, Mul)):
        negative, text = _render_term(e)
        if negative:
            return "-" + text, _PREC_NEG
        return text, _PREC_MUL
    if isinstance(e, Add):
        negative, text = _render_term(e.terms[0])
        parts = [("-" if negative else "") + text]
        for t in e.terms[1:]:
            negative, text = _render_term(t)
            parts.append((" - " if negative else " + ") + text)
        return "".join(parts), _PREC_ADD
    raise ExprError("unknown node %r" % (e,))


def to_text(e: Expr) -> str:
    """Render e in the input grammar; parsing the result recovers e."""
    return _render(e, 0)
