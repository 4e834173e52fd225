"""Comparison profiles and distance-function test constructions.

The comparison function

    h(t) = cos(sqrt(k) t) - (gamma/sqrt(k)) sin(sqrt(k) t)     (k > 0)
           1 - gamma t                                          (k = 0)
           cosh(sqrt(-k) t) - (gamma/sqrt(-k)) sinh(sqrt(-k) t) (k < 0)

solves h'' + k h = 0 with h(0) = 1, h'(0) = -gamma.  Its logarithmic
derivative bounds the Laplacian of the distance-to-boundary function rho:
with (k1, gamma1) lower curvature data and (k2, gamma2) upper data,

    (d-1) h2'/h2(rho)  <=  Delta rho  <=  (d-1) h1'/h1(rho)

on the validity ranges [0, first zero of h_i).  The module also evaluates
the two radial test-function quantities built from rho: the tube integrals
of the cutoff profile (1 - rho/t0)^+ (gradient mass and the drift-term
bound) and the damped negative-part supremum used by the boundary-variance
and trace constants.

All sups and infs here are grid scans with golden-section refinement.  Any
grid point produces a valid (if slightly suboptimal) constant, so the grids
affect tightness only, never correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import BenchmarkGeometry, CurvatureBounds, GeometryError, WeightPair, sup_on_interval, tube_integral

__all__ = [
    "ComparisonProfile",
    "CutoffProfile",
    "NegpartResult",
    "h_eval",
    "h_deriv",
    "h_log_deriv",
    "h_first_zero",
    "first_zero_bisect",
    "laplace_comp_bounds",
    "phi_tube_integrals",
    "rho_negpart_sup",
    "optimize_rho_negpart",
]


def h_eval(k: float, gamma: float, t):
    """Evaluate h(t); total in (k, gamma, t >= 0), analytic limit at k = 0."""
    t = np.asarray(t, dtype=float) if not np.isscalar(t) else float(t)
    if k > 0.0:
        s = math.sqrt(k)
        return np.cos(s * t) - (gamma / s) * np.sin(s * t)
    if k < 0.0:
        s = math.sqrt(-k)
        return np.cosh(s * t) - (gamma / s) * np.sinh(s * t)
    return 1.0 - gamma * t


def h_deriv(k: float, gamma: float, t):
    """h'(t); h'(0) = -gamma on every branch."""
    t = np.asarray(t, dtype=float) if not np.isscalar(t) else float(t)
    if k > 0.0:
        s = math.sqrt(k)
        return -s * np.sin(s * t) - gamma * np.cos(s * t)
    if k < 0.0:
        s = math.sqrt(-k)
        return s * np.sinh(s * t) - gamma * np.cosh(s * t)
    return -gamma * np.ones_like(t) if not np.isscalar(t) else -gamma


def h_log_deriv(k: float, gamma: float, t):
    """h'(t)/h(t), valid for t below the first zero of h."""
    return h_deriv(k, gamma, t) / h_eval(k, gamma, t)


def h_first_zero(k: float, gamma: float) -> float:
    """Smallest positive zero of t -> h(t), or +inf if h stays positive.

    Closed forms: for k > 0 the zero solves tan(sqrt(k) t) = sqrt(k)/gamma,
    smallest positive branch atan2(sqrt(k), gamma)/sqrt(k); for k = 0 it is
    1/gamma when gamma > 0; for k < 0 it is atanh(sqrt(-k)/gamma)/sqrt(-k)
    when gamma > sqrt(-k), since cosh - (gamma/s) sinh vanishes only when
    tanh(s t) = s/gamma has a solution in (0, 1).
    """
    if k > 0.0:
        s = math.sqrt(k)
        return math.atan2(s, gamma) / s
    if k == 0.0:
        return 1.0 / gamma if gamma > 0.0 else math.inf
    s = math.sqrt(-k)
    if gamma > s:
        return math.atanh(s / gamma) / s
    return math.inf


def _h_positive(k: float, gamma: float, t: float) -> bool:
    # sign of h; for k < 0 use h scaled by 2 exp(-s t) so huge arguments
    # cannot overflow cosh during the scan
    if k < 0.0:
        s = math.sqrt(-k)
        return (1.0 - gamma / s) + (1.0 + gamma / s) * math.exp(-2.0 * s * t) > 0.0
    return h_eval(k, gamma, t) > 0.0


def first_zero_bisect(k: float, gamma: float, tol: float = 1e-12, t_max: float = 1e6) -> float:
    """First zero of h by scan-and-bisect; independent check of the closed forms."""
    if not _h_positive(k, gamma, 0.0):
        return 0.0
    # expanding scan for a sign change
    lo, hi = 0.0, None
    step = 1e-3
    t = step
    while t <= t_max:
        if not _h_positive(k, gamma, t):
            hi = t
            break
        lo = t
        t = t * 1.25 if t > 1.0 else t + step
    if hi is None:
        return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _h_positive(k, gamma, mid):
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ComparisonProfile:
    """The pair (k, gamma) with its cached first zero."""

    k: float
    gamma: float

    @cached_property
    def first_zero(self) -> float:
        return h_first_zero(self.k, self.gamma)

    def h(self, t):
        return h_eval(self.k, self.gamma, t)

    def log_deriv(self, t):
        return h_log_deriv(self.k, self.gamma, t)


@dataclass(frozen=True)
class CutoffProfile:
    """Radial cutoff profile phi = int_0^rho (1 - s/t_cut)^+ ds.

    Its gradient is (1 - rho/t_cut)^+ times the (unit) gradient of rho, so
    the damping vanishes for rho >= t_cut, and the outward normal derivative
    on the boundary (rho = 0, where grad rho = -N) is exactly -1.
    """

    t_cut: float

    @property
    def normal_derivative(self) -> float:
        return -1.0

    def damping(self, rho):
        rho = np.asarray(rho, dtype=float) if not np.isscalar(rho) else rho
        return np.maximum(1.0 - rho / self.t_cut, 0.0)

    def phi(self, rho):
        rho = np.minimum(np.asarray(rho, dtype=float), self.t_cut)
        return rho - rho * rho / (2.0 * self.t_cut)


def laplace_comp_bounds(curv: CurvatureBounds, rho: float):
    """Two-sided Laplacian comparison for the distance to the boundary.

    Returns (lower, upper) = ((d-1) h2'/h2(rho), (d-1) h1'/h1(rho)); valid
    while rho stays below the first zero of both profiles.
    """
    z1 = h_first_zero(curv.k1, curv.gamma1)
    z2 = h_first_zero(curv.k2, curv.gamma2)
    if not 0.0 <= rho < min(z1, z2):
        raise GeometryError(
            f"rho = {rho} outside the comparison validity range [0, {min(z1, z2)})"
        )
    dm1 = curv.d - 1
    lower = dm1 * h_log_deriv(curv.k2, curv.gamma2, rho)
    upper = dm1 * h_log_deriv(curv.k1, curv.gamma1, rho)
    return lower, upper


# =====================================================================
# Tube integrals of the phi construction
# =====================================================================


def _sign_change_breakpoints(g, a: float, b: float, samples: int = 2049):
    """Roots of a scalar function on [a, b], located by scan + bisection.

    Used to split quadrature panels at the kinks of the positive/negative
    parts in the drift integrand.
    """
    xs = np.linspace(a, b, samples)
    vals = np.asarray(g(xs), dtype=float)
    roots = []
    for i in range(samples - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            roots.append(float(xs[i]))
        elif v0 * v1 < 0.0:
            lo, hi = float(xs[i]), float(xs[i + 1])
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if np.sign(g(mid)) == np.sign(v0):
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return roots


def phi_tube_integrals(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    t0: float,
):
    """Gradient mass and drift bound of the cutoff test function at depth t0.

    Returns (grad_sq, drift_sq_bound) with

        grad_sq        = int_{rho<=t0} (1 - rho/t0)^2 beta dlambda,
        drift_sq_bound = tube integral of the comparison bracket
                         [neg^2 + pos^2 + 2(neg+pos)|nabla beta|/beta
                          + (|nabla beta|/beta)^2] (1 - rho/t0)^2 beta dlambda,

    where neg/pos are the negative/positive parts of
    (d-1) h_i'/h_i(rho) - 1/(t0 - rho).  The integrand is evaluated in the
    damped form N = ((1-rho/t0)(d-1)h2'/h2 - 1/t0)^-,
    P = ((1-rho/t0)(d-1)h1'/h1 - 1/t0)^+, which is algebraically identical
    and bounded, so the 1/(t0 - rho) singularity never appears numerically.
    Quadrature panels split at the sign changes of the two arguments and at
    rho = t0 (1 - 1e-3).
    """
    z2 = h_first_zero(curv.k2, curv.gamma2)
    t0 = float(t0)
    if not 0.0 < t0 < z2:
        raise GeometryError(f"need 0 < t0 < h2 first zero = {z2}, got t0 = {t0}")
    dm1 = curv.d - 1
    t_end = min(t0, geometry.inradius)

    profile = CutoffProfile(t0)
    grad_sq = tube_integral(geometry, weights, t0, lambda rho: profile.damping(rho) ** 2)

    def arg2(rho):
        u = profile.damping(rho)
        return u * dm1 * h_log_deriv(curv.k2, curv.gamma2, rho) - 1.0 / t0

    def arg1(rho):
        u = profile.damping(rho)
        return u * dm1 * h_log_deriv(curv.k1, curv.gamma1, rho) - 1.0 / t0

    def integrand(rho):
        u = profile.damping(rho)
        nb = weights.grad_beta_over_beta(geometry.inradius - np.asarray(rho))
        neg = np.maximum(-arg2(rho), 0.0)
        pos = np.maximum(arg1(rho), 0.0)
        return neg**2 + pos**2 + 2.0 * (neg + pos) * nb * u + (nb * u) ** 2

    breaks = set(_sign_change_breakpoints(arg2, 0.0, t_end))
    breaks.update(_sign_change_breakpoints(arg1, 0.0, t_end))
    breaks.add(t0 * (1.0 - 1e-3))
    drift_sq = tube_integral(
        geometry, weights, t0, integrand, breakpoints_rho=sorted(breaks)
    )
    return grad_sq, drift_sq


# =====================================================================
# Negative-part supremum of the rho construction
# =====================================================================


def rho_negpart_sup(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    t1: float,
    samples: int = 10_001,
) -> float:
    """sup over the tube {rho <= t1} of the damped drift negative part.

    The quantity is (1 - rho/t1) ((d-1) h2'/h2(rho) - 1/(t1-rho)
    - |nabla beta|/beta)^-, evaluated in the equivalent bounded form
    ((1-rho/t1)((d-1)h2'/h2 - |nabla beta|/beta) - 1/t1)^-.
    """
    z2 = h_first_zero(curv.k2, curv.gamma2)
    t1 = float(t1)
    if not 0.0 < t1 < z2:
        raise GeometryError(f"need 0 < t1 < h2 first zero = {z2}, got t1 = {t1}")
    dm1 = curv.d - 1
    t_end = min(t1, geometry.inradius)
    profile = CutoffProfile(t1)

    def negpart(rho):
        rho = np.asarray(rho, dtype=float)
        u = profile.damping(rho)
        X = dm1 * h_log_deriv(curv.k2, curv.gamma2, rho)
        nb = weights.grad_beta_over_beta(geometry.inradius - rho)
        return np.maximum(-(u * (X - nb) - 1.0 / t1), 0.0)

    return sup_on_interval(negpart, 0.0, t_end, samples=samples)[0]


@dataclass(frozen=True)
class NegpartResult:
    """Infimum over t1 of rho_negpart_sup, with the raw grid infimum."""

    t1: float
    value: float
    grid_t1: float
    grid_value: float
    grid_size: int


def optimize_rho_negpart(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    grid_size: int = 64,
) -> NegpartResult:
    """Minimize rho_negpart_sup over t1 in (0, h2 first zero).

    Log-spaced grid plus golden-section polish around the best grid point.
    Every t1 yields a valid constant, so the result is safe regardless of
    grid resolution; when the first zero is +inf the range is capped at ten
    inradii (the sup saturates once the tube covers Omega).
    """
    z2 = h_first_zero(curv.k2, curv.gamma2)
    hi = min(z2 * (1.0 - 1e-9), 10.0 * geometry.inradius)
    grid = np.geomspace(hi * 1e-3, hi, grid_size)

    def value(t1):
        return rho_negpart_sup(geometry, weights, curv, t1)

    vals = [value(t) for t in grid]
    i = int(np.argmin(vals))
    grid_t1, grid_value = float(grid[i]), float(vals[i])

    lo = grid[max(i - 1, 0)]
    hi_b = grid[min(i + 1, grid_size - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi_b - phi * (hi_b - lo)
    x2 = lo + phi * (hi_b - lo)
    f1, f2 = value(x1), value(x2)
    for _ in range(60):
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi_b - lo)
            f2 = value(x2)
        else:
            hi_b, x2, f2 = x2, x1, f1
            x1 = hi_b - phi * (hi_b - lo)
            f1 = value(x1)
        if hi_b - lo < 1e-12 * max(1.0, abs(hi_b)):
            break
    best_t, best_v = grid_t1, grid_value
    for t, v in ((x1, f1), (x2, f2)):
        if v < best_v:
            best_t, best_v = float(t), float(v)
    return NegpartResult(
        t1=best_t, value=best_v, grid_t1=grid_t1, grid_value=grid_value, grid_size=grid_size
    )
