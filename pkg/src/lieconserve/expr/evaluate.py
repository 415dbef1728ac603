"""Floating evaluation and randomized identity testing.

Opaque function symbols are evaluated through polynomial instantiations;
primed symbols evaluate as true derivatives of the instantiated polynomial,
so identities that hold for arbitrary smooth choices can be probed by
sampling.  ``is_zero`` short-circuits on structural zeros and otherwise
samples jet points from a box that excludes a neighbourhood of zero.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .functions import DEFAULT_TABLE, FunctionDef, FunctionTable
from .tree import (Add, Const, Expr, ExprError, Func, Jet, Mul, Neg, Param,
                   Pow, ZERO, add, free_symbols, mul, normalize, power,
                   to_text, walk)


class EvaluationError(ExprError):
    """Evaluation hit a pole or an unbound symbol; carries the subexpression."""

    def __init__(self, message: str, subexpr: Expr | None = None):
        super().__init__(message if subexpr is None
                         else "%s in %s" % (message, subexpr))
        self.subexpr = subexpr


class InconclusiveZeroTest(ExprError):
    """Every sample hit a pole; the zero test has no information."""


ENV_SEED = "LIECONSERVE_SEED"
_DEFAULT_SEED = 170824


class Poly:
    """Sparse polynomial in ``nvars`` formal arguments, exact coefficients.

    Used as the concrete instantiation of an opaque function symbol; the
    formal arguments correspond to the symbol's argument slots.
    """

    def __init__(self, coeffs: Mapping[tuple[int, ...], Fraction], nvars: int = 1):
        self.nvars = nvars
        self.coeffs = {tuple(k): Fraction(v) for k, v in coeffs.items() if v != 0}

    @classmethod
    def identity(cls) -> "Poly":
        return cls({(1,): Fraction(1)})

    @classmethod
    def constant(cls, c, nvars: int = 1) -> "Poly":
        return cls({(0,) * nvars: Fraction(c)}, nvars)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Poly(out, self.nvars)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[tuple[int, ...], Fraction] = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, Fraction(0)) + v1 * v2
        return Poly(out, self.nvars)

    def derivative(self, i: int = 0) -> "Poly":
        out = {}
        for k, v in self.coeffs.items():
            if k[i] > 0:
                kk = k[:i] + (k[i] - 1,) + k[i + 1:]
                out[kk] = out.get(kk, Fraction(0)) + v * k[i]
        return Poly(out, self.nvars)

    def integrate(self, i: int = 0) -> "Poly":
        out = {}
        for k, v in self.coeffs.items():
            kk = k[:i] + (k[i] + 1,) + k[i + 1:]
            out[kk] = v / (k[i] + 1)
        return Poly(out, self.nvars)

    def __call__(self, *vals):
        acc = 0.0
        for k, v in self.coeffs.items():
            term = float(v)
            for power_, val in zip(k, vals):
                if power_:
                    term = term * val ** power_
            acc = acc + term
        if vals and isinstance(vals[0], np.ndarray) and np.ndim(acc) == 0:
            acc = np.full_like(vals[0], acc, dtype=float)
        return acc

    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def __repr__(self):
        return "Poly(%r)" % (self.coeffs,)


def poly_from_expr(e: Expr, var_names: Sequence[str] = ("u",)) -> Poly:
    """Convert a polynomial expression over the named symbols to a Poly."""
    e = normalize(e)
    nv = len(var_names)

    def slot_of(sym: Expr) -> int:
        if isinstance(sym, Param):
            label = sym.name
        elif isinstance(sym, Jet) and sym.nx == 0 and sym.nt == 0:
            label = sym.field
        else:
            label = None
        if label is not None:
            for i, name in enumerate(var_names):
                if label == name:
                    return i
        raise ExprError("symbol %s is not a polynomial variable here" % sym)

    def go(n: Expr) -> Poly:
        if isinstance(n, Const):
            return Poly.constant(n.value, nv)
        if isinstance(n, (Jet, Param)):
            i = slot_of(n)
            key = tuple(1 if j == i else 0 for j in range(nv))
            return Poly({key: Fraction(1)}, nv)
        if isinstance(n, Neg):
            return Poly.constant(-1, nv) * go(n.operand)
        if isinstance(n, Add):
            out = Poly.constant(0, nv)
            for t in n.terms:
                out = out + go(t)
            return out
        if isinstance(n, Mul):
            out = Poly.constant(1, nv)
            for f in n.factors:
                out = out * go(f)
            return out
        if isinstance(n, Pow):
            q = n.exponent
            if q.denominator != 1 or q < 0:
                raise ExprError("non-polynomial power %s" % n)
            out = Poly.constant(1, nv)
            base = go(n.base)
            for _ in range(q.numerator):
                out = out * base
            return out
        raise ExprError("non-polynomial node %s" % n)

    return go(e)


def poly_to_expr(p: Poly, args: Sequence[Expr]) -> Expr:
    """The polynomial as an expression in the given argument expressions."""
    terms = []
    for k, v in p.coeffs.items():
        factors: list[Expr] = [Const(v)]
        for exp, arg in zip(k, args):
            if exp:
                factors.append(power(arg, exp))
        terms.append(mul(*factors))
    return add(*terms)


@dataclass
class JetPoint:
    """A concrete sample: symbol values plus function instantiations."""

    values: dict[Expr, float]
    functions: dict[str, Poly] = field(default_factory=dict)

    def describe(self) -> str:
        parts = ["%s=%.6g" % (sym, val)
                 for sym, val in sorted(self.values.items(),
                                        key=lambda kv: str(kv[0]))]
        for name in sorted(self.functions):
            body = poly_to_expr(self.functions[name], (Param("w"),))
            parts.append("%s:=%s" % (name, to_text(body)))
        return ", ".join(parts)


def default_instantiations(table: FunctionTable | None = None) -> list[Poly]:
    """The standard probe set; each has a nonvanishing derivative off zero."""
    return [
        Poly({(1,): Fraction(1)}),                      # w
        Poly({(0,): Fraction(2), (2,): Fraction(1)}),   # 2 + w^2
        Poly({(1,): Fraction(1), (3,): Fraction(1, 3)}),  # w + w^3/3
    ]


def resolve_instantiations(names: Iterable[str], given: Mapping[str, Poly],
                           table: FunctionTable) -> dict[str, Poly]:
    """Fill instantiations for the given base symbols, building derived ones
    (and their dependencies) from what is supplied."""
    out = dict(given)
    pending = list(names)
    while pending:
        name = pending.pop()
        if name in out:
            continue
        fdef = table[name]
        if fdef.derived_poly is not None:
            missing = [d for d in fdef.derived_deps if d not in out]
            if missing:
                pending.append(name)
                pending.extend(missing)
                continue
            out[name] = fdef.derived_poly(out)
        else:
            raise EvaluationError("no instantiation for function symbol %r" % name)
    return out


class _Evaluator:
    """Evaluates expressions at jet points, tracking the largest subterm."""

    def __init__(self, table: FunctionTable, functions: Mapping[str, Poly]):
        self.table = table
        self.functions = functions
        self._poly_cache: dict[str, Poly] = {}

    def _poly_for(self, fdef: FunctionDef) -> Poly:
        if fdef.name not in self._poly_cache:
            base = self.functions.get(fdef.base)
            if base is None:
                raise EvaluationError("no instantiation for function symbol %r"
                                      % fdef.base)
            p = base
            for i, k in enumerate(fdef.order):
                for _ in range(k):
                    p = p.derivative(i)
            self._poly_cache[fdef.name] = p
        return self._poly_cache[fdef.name]

    def eval(self, e: Expr, values: Mapping[Expr, float]) -> tuple[float, float]:
        """Returns (value, max |subexpression value| encountered)."""
        scale = 0.0

        def go(n: Expr) -> float:
            nonlocal scale
            if isinstance(n, Const):
                val = float(n.value)
            elif isinstance(n, (Jet, Param)):
                if n not in values:
                    raise EvaluationError("unbound symbol", n)
                val = float(values[n])
            elif isinstance(n, Neg):
                val = -go(n.operand)
            elif isinstance(n, Add):
                val = 0.0
                for t in n.terms:
                    val += go(t)
            elif isinstance(n, Mul):
                val = 1.0
                for f in n.factors:
                    val *= go(f)
            elif isinstance(n, Pow):
                b = go(n.base)
                q = n.exponent
                if b == 0.0 and q < 0:
                    raise EvaluationError("division by zero", n)
                if b < 0.0 and q.denominator != 1:
                    raise EvaluationError("negative base with fractional exponent", n)
                val = float(b) ** float(q) if q.denominator != 1 else float(b) ** q.numerator
            elif isinstance(n, Func):
                fdef = self.table[n.name]
                argvals = [go(a) for a in n.args]
                val = self._poly_for(fdef)(*argvals)
            else:
                raise ExprError("unknown node %r" % (n,))
            a = abs(val)
            if a > scale:
                scale = a
            return val

        return go(e), scale


def evaluate(e: Expr, point: JetPoint, table: FunctionTable | None = None) -> float:
    """Evaluate e at the point; raises EvaluationError on poles or unbound
    symbols."""
    table = table if table is not None else DEFAULT_TABLE
    names = {table[n].base for n in
             (f.name for f in walk(e) if isinstance(f, Func))}
    functions = resolve_instantiations(names, point.functions, table) if names else {}
    val, _ = _Evaluator(table, functions).eval(e, point.values)
    return val


@dataclass
class ZeroTestConfig:
    samples: int = 200
    box: tuple[float, float] = (0.1, 2.0)
    tolerance: float = 1e-9
    instantiations: dict[str, Sequence[Poly]] = field(default_factory=dict)
    default_set: Sequence[Poly] = field(default_factory=default_instantiations)
    seed: Optional[int] = None

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return self.seed
        env = os.environ.get(ENV_SEED)
        if env:
            try:
                return int(env)
            except ValueError:
                pass
        return _DEFAULT_SEED


@dataclass
class ZeroVerdict:
    zero: bool
    structural: bool = False
    witness: Optional[JetPoint] = None
    witness_value: Optional[float] = None
    samples_used: int = 0
    samples_skipped: int = 0

    def __bool__(self) -> bool:
        return self.zero

    def describe(self) -> str:
        if self.zero:
            how = "structurally" if self.structural else (
                "on %d samples" % self.samples_used)
            return "zero (%s)" % how
        return "nonzero: %.6g at %s" % (self.witness_value, self.witness.describe())


def is_zero(e: Expr, config: ZeroTestConfig | None = None,
            table: FunctionTable | None = None) -> ZeroVerdict:
    """Decide whether e vanishes identically.

    Structural zeros are reported without sampling.  Otherwise the expression
    is evaluated at random jet points for every combination of function
    instantiations; a value exceeding ``tol*(1 + largest subterm)`` yields a
    nonzero verdict with a witness.  If every sample hits a pole the test
    raises ``InconclusiveZeroTest``.
    """
    table = table if table is not None else DEFAULT_TABLE
    cfg = config if config is not None else ZeroTestConfig()
    e = normalize(e)
    if e == ZERO:
        return ZeroVerdict(zero=True, structural=True)

    symbols = sorted(free_symbols(e), key=str)
    base_names = {table[f.name].base for f in walk(e) if isinstance(f, Func)}
    frontier = list(base_names)
    while frontier:
        fdef = table[frontier.pop()]
        for dep in fdef.derived_deps:
            if dep not in base_names:
                base_names.add(dep)
                frontier.append(dep)
    base_names = sorted(base_names)
    independent = [n for n in base_names if table[n].derived_poly is None]
    choice_lists = [list(cfg.instantiations.get(n, cfg.default_set))
                    for n in independent]

    rng = np.random.default_rng(cfg.resolved_seed())
    lo, hi = cfg.box
    used = skipped = 0

    combos = list(itertools.product(*choice_lists)) if independent else [()]
    for combo in combos:
        given = dict(zip(independent, combo))
        functions = resolve_instantiations(base_names, given, table)
        ev = _Evaluator(table, functions)
        for _ in range(cfg.samples):
            mags = rng.uniform(lo, hi, size=len(symbols))
            signs = rng.choice((-1.0, 1.0), size=len(symbols))
            values = {s: float(m * sg) for s, m, sg in zip(symbols, mags, signs)}
            try:
                val, scale = ev.eval(e, values)
            except EvaluationError:
                skipped += 1
                continue
            used += 1
            if abs(val) > cfg.tolerance * (1.0 + scale):
                return ZeroVerdict(zero=False, witness=JetPoint(values, functions),
                                   witness_value=val, samples_used=used,
                                   samples_skipped=skipped)
    if used == 0:
        raise InconclusiveZeroTest(
            "all %d samples hit poles while testing %s" % (skipped, e))
    return ZeroVerdict(zero=True, samples_used=used, samples_skipped=skipped)


def instantiate(e: Expr, functions: Mapping[str, Poly],
                table: FunctionTable | None = None) -> Expr:
    """Replace opaque function applications by their polynomial
    instantiations, symbolically; derived symbols are built on the fly."""
    table = table if table is not None else DEFAULT_TABLE
    names = {table[f.name].base for f in walk(e) if isinstance(f, Func)}
    resolved = resolve_instantiations(names, functions, table) if names else {}
    cache: dict[str, Poly] = {}

    def poly_for(fdef: FunctionDef) -> Poly:
        if fdef.name not in cache:
            p = resolved[fdef.base]
            for i, k in enumerate(fdef.order):
                for _ in range(k):
                    p = p.derivative(i)
            cache[fdef.name] = p
        return cache[fdef.name]

    def go(n: Expr) -> Expr:
        if isinstance(n, (Const, Jet, Param)):
            return n
        if isinstance(n, Func):
            args = [go(a) for a in n.args]
            return poly_to_expr(poly_for(table[n.name]), args)
        if isinstance(n, Pow):
            return power(go(n.base), n.exponent)
        if isinstance(n, Neg):
            return Neg(go(n.operand))
        if isinstance(n, Mul):
            return Mul(tuple(go(f) for f in n.factors))
        if isinstance(n, Add):
            return Add(tuple(go(t) for t in n.terms))
        raise ExprError("unknown node %r" % (n,))

    return normalize(go(e))
