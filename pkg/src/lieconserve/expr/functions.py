"""Registry of opaque function symbols and their derivative behaviour.

A registered symbol either introduces primed derivative symbols on
differentiation (``a`` -> ``a'`` -> ``a''``) or carries a rewrite rule that
expresses its derivative through already-known symbols (the density
antiderivative ``A`` rewrites as ``A'(u) = u*a(u)``).  Differentiating a
registered symbol therefore never leaves the registered closure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .tree import Expr, ExprError, Func, mul


class UnknownFunctionError(ExprError):
    pass


@dataclass(frozen=True)
class FunctionDef:
    """One opaque symbol.

    ``base``/``order`` record lineage: ``a''`` has base ``a`` and order
    ``(2,)``.  ``rewrite`` maps the argument expressions to the derivative
    with respect to argument ``i`` (then the chain rule applies).
    ``derived_poly`` builds this symbol's numeric instantiation from the
    instantiations of the symbols named in ``derived_deps``.
    """

    name: str
    arity: int = 1
    base: str = ""
    order: tuple[int, ...] = ()
    rewrite: Optional[Callable[[int, tuple[Expr, ...]], Expr]] = None
    derived_poly: Optional[Callable[[Mapping[str, object]], object]] = None
    derived_deps: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.base:
            object.__setattr__(self, "base", self.name)
        if not self.order:
            object.__setattr__(self, "order", (0,) * self.arity)


def _partial_name(base: str, order: Sequence[int], arity: int) -> str:
    if arity == 1:
        return base + "'" * order[0]
    return base + "".join("_d%d" % (i + 1) * k for i, k in enumerate(order))


class FunctionTable:
    """Mutable symbol registry; copies are cheap via ``extended``."""

    def __init__(self, defs: Optional[dict[str, FunctionDef]] = None):
        self._defs: dict[str, FunctionDef] = dict(defs or {})

    def register(self, name: str, arity: int = 1, rewrite=None,
                 derived_poly=None, derived_deps: Sequence[str] = ()) -> FunctionDef:
        fdef = FunctionDef(name, arity, rewrite=rewrite,
                           derived_poly=derived_poly,
                           derived_deps=tuple(derived_deps))
        self._defs[name] = fdef
        return fdef

    def extended(self, *fdefs: FunctionDef) -> "FunctionTable":
        out = FunctionTable(self._defs)
        for fdef in fdefs:
            out._defs[fdef.name] = fdef
        return out

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def __getitem__(self, name: str) -> FunctionDef:
        try:
            return self._defs[name]
        except KeyError:
            raise UnknownFunctionError("unregistered function symbol %r" % name) from None

    def names(self) -> list[str]:
        return sorted(self._defs)

    def partial(self, fdef: FunctionDef, i: int) -> FunctionDef:
        """The symbol standing for d(fdef)/d(argument i); registered lazily."""
        order = tuple(k + (1 if j == i else 0) for j, k in enumerate(fdef.order))
        name = _partial_name(fdef.base, order, fdef.arity)
        if name not in self._defs:
            self._defs[name] = FunctionDef(name, fdef.arity, base=fdef.base, order=order)
        return self._defs[name]

    def derivative_term(self, fdef: FunctionDef, i: int, args: tuple[Expr, ...]) -> Expr:
        """d fdef(args) / d args[i], before the chain-rule factor."""
        if fdef.rewrite is not None:
            return fdef.rewrite(i, args)
        return Func(self.partial(fdef, i).name, args)


def _density_antiderivative_rewrite(i: int, args: tuple[Expr, ...]) -> Expr:
    # A'(w) = w*a(w): the flux potential used throughout the transport catalog
    (w,) = args
    return mul(w, Func("a", (w,)))


def build_default_table() -> FunctionTable:
    table = FunctionTable()
    table.register("a")            # wave speed, function of u
    table.register("A", rewrite=_density_antiderivative_rewrite,
                   derived_poly=_density_antiderivative_poly, derived_deps=("a",))
    table.register("q")            # spatial profile, function of x
    table.register("phi")          # multiplier candidates, function of u
    table.register("tau")          # generator components depending on u only
    table.register("xi")
    return table


def _density_antiderivative_poly(polys):
    from .evaluate import Poly
    return (Poly.identity() * polys["a"]).integrate()


DEFAULT_TABLE = build_default_table()
