"""Exact pre-shock solutions of u_t + a(u)u_x = 0 and law verification.

Along a characteristic the solution is constant: u(x, t) = u0(xi) where
xi + a(u0(xi))*t = x.  The map is invertible up to the shock time
t* = -1/min (a o u0)'; everything here stays strictly before t*.
Conserved integrals Q(t) = integral of C0 dx are computed by composite
Simpson quadrature on characteristic samples, and laws are verified
either through Q-constancy (periodic, x,t-free flux) or through the flux
balance dQ/dt + C1(x_hi) - C1(x_lo) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import minimize_scalar

from .expr import (Expr, Jet, Param, Poly, T, U, U_X, X, evaluate,
                   free_symbols, JetPoint, FunctionTable, DEFAULT_TABLE,
                   instantiate, normalize)

PRE_SHOCK_FRACTION = 0.95
_BISECTION_STEPS = 48
_NEWTON_STEPS = 4


class CharacteristicsError(RuntimeError):
    pass


@dataclass(frozen=True)
class InitialProfile:
    """Initial datum with an exact derivative, defined on all of R."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"

    def __call__(self, xi):
        return self.f(xi)

    def derivative(self, xi):
        return self.df(xi)


def sine_profile(amplitude: float = 1.0, shift: float = 0.0) -> InitialProfile:
    amp = float(amplitude)
    off = float(shift)
    return InitialProfile(lambda xi: off + amp * np.sin(xi),
                          lambda xi: amp * np.cos(xi), "sine")


def gaussian_profile(amplitude: float = 1.0, center: float = 0.0,
                     width: float = 1.0) -> InitialProfile:
    amp, c, w = float(amplitude), float(center), float(width)

    def f(xi):
        return amp * np.exp(-((xi - c) / w) ** 2)

    def df(xi):
        return f(xi) * (-2.0 * (xi - c) / w ** 2)

    return InitialProfile(f, df, "gaussian")


def spline_bump_profile(amplitude: float = 1.0, center: float = 0.0,
                        halfwidth: float = 1.0) -> InitialProfile:
    """Cubic B-spline kernel bump, compactly supported on
    |x - center| <= 2*halfwidth, C^2 everywhere, max slope amplitude/halfwidth."""
    amp, c, h = float(amplitude), float(center), float(halfwidth)

    def f(xi):
        q = np.abs(np.asarray(xi, dtype=float) - c) / h
        inner = (4.0 - 6.0 * q ** 2 + 3.0 * q ** 3) / 4.0
        outer = (2.0 - q) ** 3 / 4.0
        return amp * np.where(q <= 1.0, inner, np.where(q <= 2.0, outer, 0.0))

    def df(xi):
        xi = np.asarray(xi, dtype=float)
        s = np.sign(xi - c)
        q = np.abs(xi - c) / h
        inner = (-12.0 * q + 9.0 * q ** 2) / 4.0
        outer = -3.0 * (2.0 - q) ** 2 / 4.0
        return (amp / h) * s * np.where(q <= 1.0, inner,
                                        np.where(q <= 2.0, outer, 0.0))

    return InitialProfile(f, df, "spline-bump")


def polynomial_profile(p: Poly, label: str = "polynomial") -> InitialProfile:
    dp = p.derivative()
    return InitialProfile(lambda xi: p(xi), lambda xi: dp(xi), label)


BUILTIN_PROFILES = {
    "sin": sine_profile,
    "gaussian": gaussian_profile,
    "bump": spline_bump_profile,
}


def shock_time(a: Poly, u0: InitialProfile, domain: tuple[float, float],
               grid: int = 4096) -> float:
    """First crossing time t* = -1/min (a o u0)'; +inf when the slope
    never decreases.  Dense grid minimum, sharpened once by bounded local
    minimization."""
    if grid < 4096:
        grid = 4096
    lo, hi = float(domain[0]), float(domain[1])
    xs = np.linspace(lo, hi, grid)
    da = a.derivative()

    def slope(xi):
        return da(u0(xi)) * u0.derivative(xi)

    vals = np.asarray(slope(xs), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise CharacteristicsError("characteristic slope is not finite on the domain")
    i = int(np.argmin(vals))
    m = float(vals[i])
    bracket_lo = xs[max(i - 1, 0)]
    bracket_hi = xs[min(i + 1, grid - 1)]
    if bracket_hi > bracket_lo:
        res = minimize_scalar(lambda xi: float(slope(xi)),
                              bounds=(bracket_lo, bracket_hi), method="bounded")
        if res.fun < m:
            m = float(res.fun)
    if m >= 0.0:
        return math.inf
    return -1.0 / m


@dataclass
class CharacteristicSolution:
    """Exact solution of u_t + a(u)u_x = 0 for a concrete a and initial
    profile; valid for t below PRE_SHOCK_FRACTION times the shock time."""

    a: Poly
    u0: InitialProfile
    domain: tuple[float, float]
    boundary: str = "periodic"
    inversion_tol: float = 1e-12
    grid: int = 4096
    shock_time: float = field(init=False)

    def __post_init__(self):
        if self.boundary not in ("periodic", "compact"):
            raise ValueError("boundary must be 'periodic' or 'compact'")
        lo, hi = self.domain
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("domain bounds must be finite with x_lo < x_hi")
        self.shock_time = shock_time(self.a, self.u0, self.domain, self.grid)
        xs = np.linspace(lo, hi, self.grid)
        speeds = np.asarray(self.a(self.u0(xs)), dtype=float)
        pad = 0.05 * (speeds.max() - speeds.min()) + 1e-6
        self._c_lo = float(speeds.min()) - pad
        self._c_hi = float(speeds.max()) + pad
        self._da = self.a.derivative()

    def horizon(self) -> float:
        return PRE_SHOCK_FRACTION * self.shock_time

    def _check_time(self, t: float) -> None:
        if t < 0.0:
            raise CharacteristicsError("negative time %g" % t)
        if t > self.horizon():
            raise CharacteristicsError(
                "t = %g is past the pre-shock horizon %g" % (t, self.horizon()))

    def _feet(self, xs: np.ndarray, t: float) -> np.ndarray:
        """Characteristic feet: solve xi + a(u0(xi))*t = x componentwise by
        bisection on a guaranteed bracket, then Newton polish."""
        if t == 0.0:
            return xs.copy()

        def g(xi):
            return xi + self.a(self.u0(xi)) * t - xs

        lo = xs - self._c_hi * t
        hi = xs - self._c_lo * t
        glo, ghi = g(lo), g(hi)
        for _ in range(8):
            bad = glo > 0.0
            if not bad.any():
                break
            lo = np.where(bad, lo - (hi - lo), lo)
            glo = g(lo)
        for _ in range(8):
            bad = ghi < 0.0
            if not bad.any():
                break
            hi = np.where(bad, hi + (hi - lo), hi)
            ghi = g(hi)
        if (glo > 0.0).any() or (ghi < 0.0).any():
            raise CharacteristicsError(
                "characteristic bracket failed at t = %g (pre-shock "
                "inversion should always bracket)" % t)
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            gm = g(mid)
            take_hi = gm > 0.0
            hi = np.where(take_hi, mid, hi)
            lo = np.where(take_hi, lo, mid)
        xi = 0.5 * (lo + hi)
        for _ in range(_NEWTON_STEPS):
            residual = g(xi)
            deriv = 1.0 + t * self._da(self.u0(xi)) * self.u0.derivative(xi)
            xi = xi - residual / deriv
        if np.max(np.abs(g(xi))) > self.inversion_tol * (1.0 + np.max(np.abs(xs))):
            raise CharacteristicsError(
                "characteristic inversion stalled above tolerance %g"
                % self.inversion_tol)
        return xi

    def solve_many(self, xs: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(u, u_x) arrays at fixed time along the given x samples."""
        self._check_time(t)
        xs = np.asarray(xs, dtype=float)
        xi = self._feet(xs, t)
        u = self.u0(xi)
        du = self.u0.derivative(xi)
        denom = 1.0 + t * self._da(self.u0(xi)) * du
        return u, du / denom

    def solve_at(self, x: float, t: float) -> tuple[float, float]:
        u, ux = self.solve_many(np.asarray([float(x)]), t)
        return float(u[0]), float(ux[0])


def _jet_callable(e: Expr, table: FunctionTable):
    """Pointwise evaluator for an expression over t, x, u, u_x with every
    opaque function already instantiated."""
    e = normalize(e)
    allowed = {T, X, U, U_X}
    for sym in free_symbols(e):
        if isinstance(sym, Param) or sym in allowed:
            continue
        raise CharacteristicsError(
            "numeric densities may depend on t, x, u, u_x only; found %s" % sym)

    def call(t: float, x: float, u: float, ux: float) -> float:
        return evaluate(e, JetPoint({T: t, X: x, U: u, U_X: ux}), table)

    return call


def conserved_integral(sol: CharacteristicSolution, density, t: float,
                       nodes: int = 1024,
                       table: FunctionTable = DEFAULT_TABLE) -> float:
    """Composite Simpson integral of the density over the domain at fixed
    t.  The density is an Expr over (t, x, u, u_x) or a callable of the
    same four arguments; nodes counts subintervals, even and >= 64."""
    if nodes < 64 or nodes % 2:
        raise ValueError("nodes must be even and at least 64")
    fn = _jet_callable(density, table) if isinstance(density, Expr) else density
    lo, hi = sol.domain
    xs = np.linspace(lo, hi, nodes + 1)
    u, ux = sol.solve_many(xs, t)
    ys = np.array([fn(t, x_, u_, ux_) for x_, u_, ux_ in zip(xs, u, ux)])
    return float(simpson(ys, x=xs))


@dataclass(frozen=True)
class ConservationReport:
    mode: str                      # "q-drift" or "flux-balance"
    times: tuple[float, ...]
    q_values: tuple[float, ...]
    q_reference: float
    deviation: float
    tolerance: float
    passed: bool

    def describe(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return "%s: %s, max deviation %.3e (tol %.1e)" % (
            self.mode, status, self.deviation, self.tolerance)


_FLUX_STEP = 1e-4


def verify_law(sol: CharacteristicSolution, c0: Expr, c1: Expr,
               times: Sequence[float], nodes: int = 1024,
               tol: float = 1e-6,
               table: FunctionTable = DEFAULT_TABLE) -> ConservationReport:
    """Numerically certify D_t C0 + D_x C1 = 0 along the exact solution.

    Both components must already be instantiated (no opaque symbols) and
    free of u_t.  Periodic domain with a flux free of explicit t, x uses
    Q-constancy; anything else uses the flux balance with a centered
    dQ/dt.  Times past the pre-shock horizon are rejected.
    """
    times = tuple(float(t) for t in times)
    horizon = sol.horizon()
    for t in times:
        if t > horizon:
            raise CharacteristicsError(
                "time %g is past the pre-shock horizon %g" % (t, horizon))
    flux_autonomous = not any(
        sym in (T, X) for sym in free_symbols(normalize(c1)))
    c0_fn = _jet_callable(c0, table)
    c1_fn = _jet_callable(c1, table)

    def q_at(t: float) -> float:
        return conserved_integral(sol, c0_fn, t, nodes, table)

    if sol.boundary == "periodic" and flux_autonomous:
        q0 = q_at(0.0)
        qs = tuple(q_at(t) for t in times)
        deviation = max(abs(q - q0) for q in qs) if qs else 0.0
        passed = deviation <= tol * (1.0 + abs(q0))
        return ConservationReport("q-drift", times, qs, q0, deviation,
                                  tol, passed)

    lo, hi = sol.domain
    worst = 0.0
    qs = []
    for t in times:
        if t - _FLUX_STEP < 0.0:
            raise CharacteristicsError(
                "flux balance needs interior times; %g is too close to 0" % t)
        qs.append(q_at(t))
        dq = (q_at(t + _FLUX_STEP) - q_at(t - _FLUX_STEP)) / (2.0 * _FLUX_STEP)
        u_hi, ux_hi = sol.solve_at(hi, t)
        u_lo, ux_lo = sol.solve_at(lo, t)
        balance = dq + c1_fn(t, hi, u_hi, ux_hi) - c1_fn(t, lo, u_lo, ux_lo)
        worst = max(worst, abs(balance))
    passed = worst <= tol
    return ConservationReport("flux-balance", times, tuple(qs),
                              qs[0] if qs else 0.0, worst, tol, passed)
