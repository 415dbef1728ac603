"""Symbolic expression core: trees, parsing, differentiation, evaluation."""

from .tree import (Add, Const, Expr, ExprError, Func, Jet, JetDepthError,
                   Mul, Neg, Param, Pow, ONE, TWO, T, U, U_T, U_TT, U_X,
                   U_XT, U_XX, V, V_T, V_X, X, ZERO, add, as_expr,
                   free_symbols, function_names, max_jet_order, mul, neg,
                   normalize, power, substitute, to_text, walk)
from .functions import (DEFAULT_TABLE, FunctionDef, FunctionTable,
                        UnknownFunctionError, build_default_table)
from .derive import diff
from .parser import ExprSyntaxError, UnknownSymbolError, parse
from .evaluate import (EvaluationError, InconclusiveZeroTest, JetPoint, Poly,
                       ZeroTestConfig, ZeroVerdict, default_instantiations,
                       evaluate, instantiate, is_zero, poly_from_expr,
                       poly_to_expr, resolve_instantiations)

__all__ = [
    "Add", "Const", "Expr", "ExprError", "Func", "Jet", "JetDepthError",
    "Mul", "Neg", "Param", "Pow", "ONE", "TWO", "T", "U", "U_T", "U_TT",
    "U_X", "U_XT", "U_XX", "V", "V_T", "V_X", "X", "ZERO", "add", "as_expr",
    "free_symbols", "function_names", "max_jet_order", "mul", "neg",
    "normalize", "power", "substitute", "to_text", "walk",
    "DEFAULT_TABLE", "FunctionDef", "FunctionTable", "UnknownFunctionError",
    "build_default_table", "diff", "ExprSyntaxError", "UnknownSymbolError",
    "parse", "EvaluationError", "InconclusiveZeroTest", "JetPoint", "Poly",
    "ZeroTestConfig", "ZeroVerdict", "default_instantiations", "evaluate",
    "instantiate", "is_zero", "poly_from_expr", "poly_to_expr",
    "resolve_instantiations",
]
