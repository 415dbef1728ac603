"""Partial differentiation treating every jet symbol as an independent
coordinate.  Opaque function applications follow the chain rule through
their argument list, using the derivative rules of the function table."""

from __future__ import annotations

from fractions import Fraction

from .functions import DEFAULT_TABLE, FunctionTable
from .tree import (Add, Const, Expr, ExprError, Func, Jet, Mul, Neg, Param,
                   Pow, ZERO, ONE, add, mul, neg, power)


def diff(e: Expr, sym: Expr, table: FunctionTable | None = None) -> Expr:
    """d e / d sym for a Jet or Param symbol; result is normalized."""
    if not isinstance(sym, (Jet, Param)):
        raise ExprError("can only differentiate with respect to a symbol")
    table = table if table is not None else DEFAULT_TABLE
    return _diff(e, sym, table)


def _diff(e: Expr, s: Expr, table: FunctionTable) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, (Jet, Param)):
        return ONE if e == s else ZERO
    if isinstance(e, Neg):
        return neg(_diff(e.operand, s, table))
    if isinstance(e, Add):
        return add(*[_diff(t, s, table) for t in e.terms])
    if isinstance(e, Mul):
        pieces = []
        for i, f in enumerate(e.factors):
            df = _diff(f, s, table)
            if df == ZERO:
                continue
            rest = e.factors[:i] + e.factors[i + 1:]
            pieces.append(mul(df, *rest))
        return add(*pieces)
    if isinstance(e, Pow):
        db = _diff(e.base, s, table)
        if db == ZERO:
            return ZERO
        return mul(Const(e.exponent), power(e.base, e.exponent - 1), db)
    if isinstance(e, Func):
        fdef = table[e.name]
        if fdef.arity != len(e.args):
            raise ExprError("arity mismatch for %s" % e.name)
        pieces = []
        for i, arg in enumerate(e.args):
            darg = _diff(arg, s, table)
            if darg == ZERO:
                continue
            pieces.append(mul(table.derivative_term(fdef, i, e.args), darg))
        return add(*pieces)
    raise ExprError("unknown node %r" % (e,))
