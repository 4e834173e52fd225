"""Closed-form constants and interpolation bounds for the sticky-reflecting forms.

Everything here is a pure formula layer on top of the comparison module: the
mixed-term constant K1, the boundary-variance constant K_boundary (equal to
the reciprocal Steklov lower bound up to the A/B factor), the Sobolev trace
bound, the weighted Sobolev-Poincare transfer, the boundary-interior entropy
constant, and the two variance/entropy interpolation formulas that produce
the final Poincare and log-Sobolev bounds.

Optimizer grids (t0, t1, eps, s, t, p) are safety-preserving throughout: the
underlying inequalities hold for every admissible grid point, so grid
resolution affects only how tight the returned constant is, never whether it
is a valid bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .comparison import (
    NegpartResult,
    h_first_zero,
    optimize_rho_negpart,
    phi_tube_integrals,
    rho_negpart_sup,
)
from .geometry import BenchmarkGeometry, CurvatureBounds, WeightPair

__all__ = [
    "BoundsError",
    "InterpolationInputs",
    "PoincareInterp",
    "K1Result",
    "LogSobInterp",
    "inf_max_affine",
    "interpolate_poincare",
    "poincare_no_bd",
    "coinciding_K1",
    "coinciding_direct",
    "K1_general",
    "K1_general_constant_weights",
    "K_boundary",
    "K_boundary_constant_weights",
    "steklov_lower",
    "K_from_steklov",
    "K1_alt",
    "trace_norm_bound",
    "weighted_sobolev_const",
    "boundary_interior_sobolev",
    "entropy_from_trace",
    "L_boundary_interior",
    "bernoulli_logfactor",
    "interpolate_logsob",
    "logsob_no_bd",
]


class BoundsError(ValueError):
    """Invalid inputs to a bound formula."""


# =====================================================================
# Interpolation inputs
# =====================================================================


@dataclass(frozen=True)
class InterpolationInputs:
    """Constants feeding the variance/entropy interpolation formulas.

    C_la / L_la are the Poincare / log-Sobolev constants of the weighted
    Neumann Laplacian on the interior, C_sib / L_sib the analogues on the
    boundary, K1 the mixed-term constant, K_boundary the boundary-variance
    constant, L_boundary the boundary-entropy constant.  The L slots may be
    None when no log-Sobolev data is available.
    """

    A: float
    B: float
    C_la: float
    C_sib: float
    K1: float = 0.0
    K2: float = 0.0
    K_boundary: float = 0.0
    L_la: float | None = None
    L_sib: float | None = None
    L_boundary: float | None = None

    def __post_init__(self):
        if not (0.0 < self.A < 1.0 and 0.0 < self.B < 1.0):
            raise BoundsError(f"A = {self.A}, B = {self.B} must lie in (0, 1)")
        if abs(self.A + self.B - 1.0) > 1e-9:
            raise BoundsError(f"A + B = {self.A + self.B} must equal 1")
        for name in ("C_la", "C_sib", "K1", "K2", "K_boundary"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise BoundsError(f"{name} = {v} must be finite and >= 0")
        for name in ("L_la", "L_sib", "L_boundary"):
            v = getattr(self, name)
            if v is not None and (v < 0.0 or not math.isfinite(v)):
                raise BoundsError(f"{name} = {v} must be finite and >= 0")


# =====================================================================
# inf-max of two affine functions on [0, 1]
# =====================================================================


def inf_max_affine(a: float, b: float, c: float, d: float):
    """Minimize max(a + b t, c - d t) over t in [0, 1], for b, d > 0.

    Closed form: the increasing and decreasing lines cross at
    t = (c - a)/(b + d); clamping to [0, 1] gives value a (crossing left of
    0), c - d (crossing right of 1), or (bc + ad)/(b + d) at the crossing.
    Returns (t_star, value).
    """
    if b <= 0.0 or d <= 0.0:
        raise BoundsError(f"need b, d > 0, got b = {b}, d = {d}")
    if a < 0.0 or c < 0.0:
        raise BoundsError(f"need a, c >= 0, got a = {a}, c = {c}")
    return _inf_max_affine_relaxed(a, b, c, d)


def _inf_max_affine_relaxed(a, b, c, d):
    # case analysis extended by continuity to b = 0 and/or d = 0
    gap = c - a
    if gap < 0.0:
        return 0.0, a
    if gap > b + d:
        return 1.0, c - d
    if b + d == 0.0:
        return 0.0, a  # both slopes vanish and a = c
    t = gap / (b + d)
    return t, (b * c + a * d) / (b + d)


@dataclass(frozen=True)
class PoincareInterp:
    value: float
    t_star: float
    a: float
    b: float
    c: float
    d: float


def interpolate_poincare(inputs: InterpolationInputs) -> PoincareInterp:
    """Variance interpolation bound on the Poincare constant.

    Decomposing Var_mu along the mixture mu = A la + B si gives
    inf_t max(C_la + B K1 + t (B/A) K_boundary, C_sib + A K2 - t C_sib),
    minimized exactly by the affine closed form.  C_sib = 0 only removes
    the decreasing slope; the relaxed case analysis covers it.
    """
    a = inputs.C_la + inputs.B * inputs.K1
    b = (inputs.B / inputs.A) * inputs.K_boundary
    c = inputs.C_sib + inputs.A * inputs.K2
    d = inputs.C_sib
    t, value = _inf_max_affine_relaxed(a, b, c, d)
    return PoincareInterp(value=value, t_star=t, a=a, b=b, c=c, d=d)


def poincare_no_bd(C_la: float, K1: float, K_boundary: float, A: float, B: float) -> float:
    """Poincare bound for sticky reflection without boundary diffusion."""
    if not (A > 0.0 and B > 0.0):
        raise BoundsError(f"masses must be positive, got A = {A}, B = {B}")
    for name, v in (("C_la", C_la), ("K1", K1), ("K_boundary", K_boundary)):
        if v < 0.0:
            raise BoundsError(f"{name} = {v} must be >= 0")
    return C_la + B * K_boundary / A + B * K1


# =====================================================================
# Coinciding-weight bounds
# =====================================================================


def _require_flag(curv: CurvatureBounds, flag: str, what: str):
    if not getattr(curv, flag):
        raise BoundsError(f"{what} requires the assumption flag {flag!r} to be set")


def coinciding_K1(n: float, k_alpha_n: float, curv: CurvatureBounds) -> float:
    """Mixed-term constant K1 = (n-1)/(n k_{alpha,n}) for coinciding weights.

    Needs beta = alpha on the boundary, nonnegative II, the integral
    condition on the weighted mean curvature, and Ric_{alpha,n} >= k > 0.
    n = inf uses the analytic limit (n-1)/n -> 1.
    """
    _require_flag(curv, "beta_equals_alpha_on_boundary", "coinciding_K1")
    _require_flag(curv, "h_alpha_integral_nonneg", "coinciding_K1")
    if curv.gamma1 < 0.0:
        raise BoundsError("coinciding_K1 requires II >= 0 (gamma1 >= 0)")
    if not k_alpha_n > 0.0:
        raise BoundsError(f"coinciding_K1 requires k_alpha_n > 0, got {k_alpha_n}")
    if n != math.inf and n < curv.d:
        raise BoundsError(f"n = {n} must be >= d = {curv.d} or inf")
    frac = 1.0 if n == math.inf else (n - 1.0) / n
    return frac / k_alpha_n


def coinciding_direct(n: float, k_alpha_n: float, ii_lower: float, curv: CurvatureBounds) -> float:
    """Direct eigenvalue bound max((3n-1)/(n ii_lower), (n-1)/(n k_{alpha,n})).

    The strict variant: beta = alpha on the boundary, II >= ii_lower > 0,
    pointwise nonnegative weighted mean curvature.  n = inf limits are 3 and 1.
    """
    _require_flag(curv, "beta_equals_alpha_on_boundary", "coinciding_direct")
    _require_flag(curv, "h_alpha_pointwise_nonneg", "coinciding_direct")
    _require_flag(curv, "ii_lower_positive", "coinciding_direct")
    if not ii_lower > 0.0:
        raise BoundsError(f"coinciding_direct requires ii_lower > 0, got {ii_lower}")
    if not k_alpha_n > 0.0:
        raise BoundsError(f"coinciding_direct requires k_alpha_n > 0, got {k_alpha_n}")
    if n != math.inf and n < curv.d:
        raise BoundsError(f"n = {n} must be >= d = {curv.d} or inf")
    frac1 = 1.0 if n == math.inf else (n - 1.0) / n
    frac3 = 3.0 if n == math.inf else (3.0 * n - 1.0) / n
    return max(frac3 / ii_lower, frac1 / k_alpha_n)


# =====================================================================
# The explicit mixed-term constant K1 (tube-integral route)
# =====================================================================


@dataclass(frozen=True)
class K1Result:
    value: float
    t0: float
    eps: float | None  # None when one of the two terms vanishes (analytic eps limit)
    grad_sq: float
    drift_sq: float
    grid_size: int


def _t0_bracket(geometry: BenchmarkGeometry, curv: CurvatureBounds):
    z2 = h_first_zero(curv.k2, curv.gamma2)
    return min(z2 * (1.0 - 1e-9), 10.0 * geometry.inradius)


def _k1_objective(geometry, weights, curv, C_la, t0):
    grad_sq, drift_sq = phi_tube_integrals(geometry, weights, curv, t0)
    X = C_la * drift_sq
    val = (math.sqrt(X) + math.sqrt(grad_sq)) ** 2
    eps = math.sqrt(grad_sq / X) if X > 0.0 and grad_sq > 0.0 else None
    return val, eps, grad_sq, drift_sq


def K1_general(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    C_la: float,
    t0_grid=None,
) -> K1Result:
    """Explicit mixed-term constant from the cutoff test function.

    K1 = (A/B^2) |beta/alpha|_inf inf_{t0, eps} [(1+eps) C_la drift_sq(t0)
    + (1+1/eps) grad_sq(t0)].  For fixed t0 the eps-infimum has the closed
    form (sqrt(C_la drift_sq) + sqrt(grad_sq))^2 at eps = sqrt(grad/(C drift)),
    which also covers C_la = 0 as the eps -> inf limit.  t0 runs over a
    log-spaced grid below the first zero of h2, plus golden polish.
    """
    if C_la < 0.0:
        raise BoundsError(f"C_la = {C_la} must be >= 0")
    hi = _t0_bracket(geometry, curv)
    if t0_grid is None:
        grid = np.geomspace(hi * 1e-3, hi, 64)
    else:
        grid = np.asarray(sorted(t0_grid), dtype=float)
        if grid.size == 0 or grid[0] <= 0.0 or grid[-1] >= h_first_zero(curv.k2, curv.gamma2):
            raise BoundsError("t0 grid must be nonempty inside (0, h2 first zero)")

    evals = {float(t0): _k1_objective(geometry, weights, curv, C_la, t0) for t0 in grid}
    best_t0 = min(evals, key=lambda t: evals[t][0])
    i = int(np.searchsorted(grid, best_t0))
    lo = float(grid[max(i - 1, 0)])
    hi_b = float(grid[min(i + 1, grid.size - 1)])
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi_b - phi * (hi_b - lo)
    x2 = lo + phi * (hi_b - lo)
    e1 = _k1_objective(geometry, weights, curv, C_la, x1)
    e2 = _k1_objective(geometry, weights, curv, C_la, x2)
    for _ in range(40):
        if e1[0] > e2[0]:
            lo, x1, e1 = x1, x2, e2
            x2 = lo + phi * (hi_b - lo)
            e2 = _k1_objective(geometry, weights, curv, C_la, x2)
        else:
            hi_b, x2, e2 = x2, x1, e1
            x1 = hi_b - phi * (hi_b - lo)
            e1 = _k1_objective(geometry, weights, curv, C_la, x1)
        if hi_b - lo < 1e-10 * max(1.0, hi_b):
            break
    candidates = dict(evals)
    candidates[float(x1)] = e1
    candidates[float(x2)] = e2
    t0_star = min(candidates, key=lambda t: candidates[t][0])
    val, eps, grad_sq, drift_sq = candidates[t0_star]
    prefactor = weights.A / weights.B**2 * weights.beta_over_alpha_sup
    return K1Result(
        value=prefactor * val,
        t0=t0_star,
        eps=eps,
        grad_sq=grad_sq,
        drift_sq=drift_sq,
        grid_size=int(grid.size),
    )


def K1_general_constant_weights(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    C_la: float,
    t0_grid=None,
) -> K1Result:
    """Constant-weight reduction of K1_general with the gradient terms hardwired to zero.

    Independent code path for the reduction check: the |nabla beta|/beta
    cross and square terms are absent from the integrand rather than
    evaluated as zeros.
    """
    stripped = _strip_beta_gradient(weights)
    return K1_general(geometry, stripped, curv, C_la, t0_grid=t0_grid)


def _strip_beta_gradient(weights: WeightPair) -> WeightPair:
    """A view of the weights whose log-gradient profile is identically zero."""

    class _Stripped(WeightPair):
        def grad_beta_over_beta(self, r):
            r = np.asarray(r, dtype=float)
            return np.zeros_like(r) if r.ndim else 0.0

    return _Stripped(
        geometry=weights.geometry,
        alpha_raw=weights.alpha_raw,
        beta_raw=weights.beta_raw,
        scale=weights.scale,
        A=weights.A,
        B=weights.B,
        quadrature=weights.quadrature,
    )


# =====================================================================
# Boundary-variance constant, Steklov, trace
# =====================================================================


def _negpart(geometry, weights, curv, negpart=None) -> NegpartResult:
    return negpart if negpart is not None else optimize_rho_negpart(geometry, weights, curv)


def K_boundary(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    C_la: float,
    negpart: NegpartResult | None = None,
) -> float:
    """Boundary-variance constant (A/B)|beta/alpha|_inf (C_la negpart + 2 sqrt(C_la)).

    negpart is the optimized damped negative-part supremum; |grad rho|_inf <= 1
    is used for the square-root term.
    """
    if C_la < 0.0:
        raise BoundsError(f"C_la = {C_la} must be >= 0")
    np_res = _negpart(geometry, weights, curv, negpart)
    factor = weights.beta_over_alpha_sup * (C_la * np_res.value + 2.0 * math.sqrt(C_la))
    return (weights.A / weights.B) * factor


def K_boundary_constant_weights(geometry, weights, curv, C_la, negpart=None) -> float:
    """Constant-weight reduction of K_boundary (gradient term absent)."""
    stripped = _strip_beta_gradient(weights)
    np_res = negpart if negpart is not None else optimize_rho_negpart(geometry, stripped, curv)
    factor = stripped.beta_over_alpha_sup * (C_la * np_res.value + 2.0 * math.sqrt(C_la))
    return (stripped.A / stripped.B) * factor


def steklov_lower(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    C_la: float,
    negpart: NegpartResult | None = None,
) -> float:
    """Lower bound on the first nontrivial doubly weighted Steklov eigenvalue.

    Reciprocal of |beta/alpha|_inf (C_la negpart + 2 sqrt(C_la)); equals
    (A/B)/K_boundary.  Returns +inf (vacuous) when the denominator is zero,
    which happens only at C_la = 0.
    """
    if C_la < 0.0:
        raise BoundsError(f"C_la = {C_la} must be >= 0")
    np_res = _negpart(geometry, weights, curv, negpart)
    denom = weights.beta_over_alpha_sup * (C_la * np_res.value + 2.0 * math.sqrt(C_la))
    return 1.0 / denom if denom > 0.0 else math.inf


def K_from_steklov(sigma: float, A: float, B: float) -> float:
    """Boundary-variance constant from a Steklov eigenvalue: (A/B)/sigma."""
    if sigma <= 0.0:
        raise BoundsError(f"Steklov eigenvalue must be positive, got {sigma}")
    return (A / B) / sigma


def K1_alt(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    C_la: float,
    negpart: NegpartResult | None = None,
) -> float:
    """Alternative mixed-term constant; same expression as K_boundary.

    The mixed-difference inequality holds with this constant too, so the
    pipeline reports both K1 candidates and takes their minimum.
    """
    return K_boundary(geometry, weights, curv, C_la, negpart=negpart)


def trace_norm_bound(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    curv: CurvatureBounds,
    negpart: NegpartResult | None = None,
) -> float:
    """Upper bound sqrt(|beta/alpha|_inf (negpart + 1)) on the Sobolev trace norm."""
    np_res = _negpart(geometry, weights, curv, negpart)
    return math.sqrt(weights.beta_over_alpha_sup * (np_res.value + 1.0))


# =====================================================================
# Weighted Sobolev transfer, boundary-interior entropy route
# =====================================================================


def weighted_sobolev_const(
    p: float,
    q: float,
    C_pq: float,
    *,
    beta_sup: float,
    B: float,
    A_over_alpha_sup: float,
) -> float:
    """Weighted Sobolev-Poincare constant (|beta|_inf/B)^{1/p} |A/alpha|_inf^{1/q} C_pq."""
    if p < 1.0 or q < 1.0:
        raise BoundsError(f"need p, q >= 1, got p = {p}, q = {q}")
    if C_pq < 0.0:
        raise BoundsError(f"C_pq = {C_pq} must be >= 0")
    return (beta_sup / B) ** (1.0 / p) * A_over_alpha_sup ** (1.0 / q) * C_pq


def _check_p_range(p: float, d: int, strict_low=False):
    if d < 3:
        raise BoundsError(f"boundary-interior route requires d >= 3, got d = {d}")
    p_max = (2.0 * d - 2.0) / (d - 2.0)
    lo_ok = p > 2.0 if strict_low else p >= 2.0
    if not (lo_ok and p <= p_max):
        lo = "(2" if strict_low else "[2"
        raise BoundsError(f"p = {p} outside {lo}, {p_max}] for d = {d}")
    return p_max


def boundary_interior_sobolev(
    p: float,
    d: int,
    *,
    beta_over_alpha_sup: float,
    A: float,
    B: float,
    negpart_sup: float,
    C_w_2pm1: float,
    C_w_p2: float,
    grad_rho_sup: float = 1.0,
) -> float:
    """Boundary-interior Sobolev constant C~_{p,2}.

    ((p |grad rho|_inf)^2 |beta/alpha|_inf (A/B) C_{2(p-1),2}^{2(p-1)})^{1/p}
    + negpart^{2/p} C_{p,2}^2, with the weighted constants passed in.
    """
    _check_p_range(p, d)
    for name, v in (
        ("negpart_sup", negpart_sup),
        ("C_w_2pm1", C_w_2pm1),
        ("C_w_p2", C_w_p2),
    ):
        if v < 0.0:
            raise BoundsError(f"{name} = {v} must be >= 0")
    first = ((p * grad_rho_sup) ** 2 * beta_over_alpha_sup * (A / B) * C_w_2pm1 ** (2.0 * (p - 1.0))) ** (1.0 / p)
    second = negpart_sup ** (2.0 / p) * C_w_p2**2
    return first + second


def entropy_from_trace(p: float, d: int, C_tilde: float) -> float:
    """Boundary entropy term p/(p-2) C~_{p,2}/e from the trace-Sobolev family."""
    _check_p_range(p, d, strict_low=True)
    if C_tilde < 0.0:
        raise BoundsError(f"C_tilde = {C_tilde} must be >= 0")
    return p / (p - 2.0) * C_tilde / math.e


@dataclass(frozen=True)
class LBoundaryInteriorResult:
    value: float
    p_star: float
    entropy_term: float
    rothaus_term: float
    candidates: tuple


def L_boundary_interior(
    d: int,
    *,
    A: float,
    B: float,
    beta_over_alpha_sup: float,
    beta_sup: float,
    A_over_alpha_sup: float,
    negpart_sup: float,
    C_la: float,
    sobolev_table: dict,
    grad_rho_sup: float = 1.0,
) -> LBoundaryInteriorResult:
    """Boundary-entropy-versus-interior-energy constant L_{boundary,interior}.

    inf over admissible p of the entropy term p/(p-2) C~_{p,2}/e, plus the
    Rothaus correction (2A/B)|beta/alpha|_inf (C_la negpart + 2 sqrt(C_la)).
    sobolev_table maps p to the unweighted constant C_{p,2}; a p is a
    candidate when both p and 2(p-1) have entries and p lies strictly inside
    (2, (2d-2)/(d-2)].
    """
    if d < 3:
        raise BoundsError(f"L_boundary_interior requires d >= 3, got d = {d}")
    p_max = (2.0 * d - 2.0) / (d - 2.0)
    candidates = []
    for p in sorted(sobolev_table):
        if not (2.0 + 1e-3 <= p <= p_max):
            continue
        p2 = 2.0 * (p - 1.0)
        if p2 not in sobolev_table:
            continue
        cw_p = weighted_sobolev_const(
            p, 2.0, sobolev_table[p], beta_sup=beta_sup, B=B, A_over_alpha_sup=A_over_alpha_sup
        )
        cw_2pm1 = weighted_sobolev_const(
            p2, 2.0, sobolev_table[p2], beta_sup=beta_sup, B=B, A_over_alpha_sup=A_over_alpha_sup
        )
        c_tilde = boundary_interior_sobolev(
            p,
            d,
            beta_over_alpha_sup=beta_over_alpha_sup,
            A=A,
            B=B,
            negpart_sup=negpart_sup,
            C_w_2pm1=cw_2pm1,
            C_w_p2=cw_p,
            grad_rho_sup=grad_rho_sup,
        )
        candidates.append((p, entropy_from_trace(p, d, c_tilde)))
    if not candidates:
        raise BoundsError(
            "no admissible p: the Sobolev table needs entries at both p and 2(p-1) "
            f"for some p in (2, {p_max}]"
        )
    p_star, entropy_term = min(candidates, key=lambda pc: pc[1])
    rothaus_term = (
        2.0 * A / B * beta_over_alpha_sup
        * (C_la * negpart_sup + 2.0 * math.sqrt(C_la) * grad_rho_sup)
    )
    return LBoundaryInteriorResult(
        value=entropy_term + rothaus_term,
        p_star=p_star,
        entropy_term=entropy_term,
        rothaus_term=rothaus_term,
        candidates=tuple(candidates),
    )


# =====================================================================
# Log-Sobolev interpolation
# =====================================================================


def bernoulli_logfactor(A: float, B: float) -> float:
    """The Bernoulli log-Sobolev factor (log B - log A)/(B - A).

    Symmetric in (A, B), minimized at A = B = 1/2 where the analytic limit
    is 1/A = 2.
    """
    if not (0.0 < A < 1.0 and 0.0 < B < 1.0):
        raise BoundsError(f"A = {A}, B = {B} must lie in (0, 1)")
    if abs(B - A) < 1e-9:
        return 1.0 / A
    return (math.log(B) - math.log(A)) / (B - A)


@dataclass(frozen=True)
class LogSobInterp:
    value: float
    s_star: float
    t_star: float


def interpolate_logsob(inputs: InterpolationInputs) -> LogSobInterp:
    """Entropy interpolation bound on the log-Sobolev constant.

    inf over (s, t) in [0,1]^2 of max(F1, F2) with
    F1 = L_la + s (B/A) L_boundary + B lf (C_la + t K_boundary + K1) and
    F2 = (1-s) L_sib + A lf ((1-t) C_sib + K2), lf the Bernoulli factor.
    F1 is affine increasing and F2 affine decreasing in each variable, so
    max(F1, F2) is jointly convex: for each t the s-problem has the affine
    closed form, and the resulting profile in t is convex, minimized by scan
    plus golden refinement.  A missing L_boundary pins s = 0 (still an upper
    bound for the infimum).
    """
    if inputs.L_la is None or inputs.L_sib is None:
        raise BoundsError("interpolate_logsob needs L_la and L_sib")
    lf = bernoulli_logfactor(inputs.A, inputs.B)
    b_s = (inputs.B / inputs.A) * inputs.L_boundary if inputs.L_boundary is not None else None
    d_s = inputs.L_sib

    def solve_s(t: float):
        a_s = inputs.L_la + inputs.B * lf * (inputs.C_la + t * inputs.K_boundary + inputs.K1)
        c_s = inputs.L_sib + inputs.A * lf * ((1.0 - t) * inputs.C_sib + inputs.K2)
        if b_s is None:
            return 0.0, max(a_s, c_s)
        return _inf_max_affine_relaxed(a_s, b_s, c_s, d_s)

    ts = np.linspace(0.0, 1.0, 2049)
    vals = [solve_s(t)[1] for t in ts]
    i = int(np.argmin(vals))
    lo = float(ts[max(i - 1, 0)])
    hi = float(ts[min(i + 1, ts.size - 1)])
    best_t = float(ts[i])
    best_v = float(vals[i])
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = solve_s(x1)[1], solve_s(x2)[1]
    for _ in range(60):
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = solve_s(x2)[1]
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = solve_s(x1)[1]
        if hi - lo < 1e-14:
            break
    for t, v in ((x1, f1), (x2, f2)):
        if v < best_v:
            best_t, best_v = float(t), float(v)
    s_star = solve_s(best_t)[0]
    return LogSobInterp(value=best_v, s_star=float(s_star), t_star=best_t)


def logsob_no_bd(
    L_la: float,
    L_boundary: float,
    C_la: float,
    K_boundary: float,
    K1: float,
    A: float,
    B: float,
) -> float:
    """Log-Sobolev bound without boundary diffusion.

    L_la + (B/A) L_boundary + B lf (C_la + K_boundary + K1); unlike the
    interpolated bound, L_boundary enters additively and is required.
    """
    for name, v in (
        ("L_la", L_la),
        ("L_boundary", L_boundary),
        ("C_la", C_la),
        ("K_boundary", K_boundary),
        ("K1", K1),
    ):
        if v < 0.0:
            raise BoundsError(f"{name} = {v} must be >= 0")
    lf = bernoulli_logfactor(A, B)
    return L_la + (B / A) * L_boundary + B * lf * (C_la + K_boundary + K1)
