"""Rotationally symmetric benchmark geometries, weights, and radial quadrature.

The benchmarks are geodesic disks on the three constant-curvature surfaces:

* flat disk of radius R        (Jacobian r,      sect = 0,  II = (1/R) id)
* spherical cap of radius t0   (Jacobian sin r,  sect = 1,  II = cot(t0) id)
* hyperbolic disk of radius R  (Jacobian sinh r, sect = -1, II = coth(R) id)

All measures are rotationally symmetric: the interior volume element in
geodesic polar coordinates is J(r) dr dtheta and the boundary circle has
intrinsic length 2 pi J(inradius).  The distance to the boundary is
rho(r) = inradius - r, so every tube integral over {rho <= t} collapses to a
1D radial quadrature.

Weights are strictly positive radial C^1 profiles.  ``normalize_weights``
rescales a pair (alpha, beta) by the common factor 1/(int alpha dlambda +
int beta dsigma) so that mu = alpha lambda + beta sigma is a probability
measure; the logarithmic gradient |beta'|/beta is computed from the raw
profile so it is exactly scale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import expressions

__all__ = [
    "GeometryError",
    "BenchmarkGeometry",
    "CurvatureBounds",
    "RadialProfile",
    "WeightPair",
    "RadialQuadrature",
    "make_geometry",
    "normalize_weights",
    "tube_integral",
    "sup_on_interval",
]


class GeometryError(ValueError):
    """Invalid geometry or weight data."""


# =====================================================================
# Geometries
# =====================================================================

FLAT_DISK = "flat_disk"
SPHERICAL_CAP = "spherical_cap"
HYPERBOLIC_DISK = "hyperbolic_disk"


@dataclass(frozen=True)
class BenchmarkGeometry:
    """A geodesic disk on a constant-curvature model surface (d = 2)."""

    kind: str
    param: float  # radius R, or geodesic radius theta0 for the cap

    dim: int = 2

    @property
    def inradius(self) -> float:
        return self.param

    def jacobian(self, r):
        """Area Jacobian J(r) of geodesic polar coordinates."""
        r = np.asarray(r, dtype=float)
        if self.kind == FLAT_DISK:
            return r
        if self.kind == SPHERICAL_CAP:
            return np.sin(r)
        return np.sinh(r)

    def area(self) -> float:
        """|Omega| in closed form."""
        R = self.param
        if self.kind == FLAT_DISK:
            return math.pi * R * R
        if self.kind == SPHERICAL_CAP:
            return 2.0 * math.pi * (1.0 - math.cos(R))
        return 2.0 * math.pi * (math.cosh(R) - 1.0)

    def boundary_length(self) -> float:
        """|dOmega| = 2 pi J(inradius)."""
        return 2.0 * math.pi * float(self.jacobian(self.param))

    @property
    def sect(self) -> float:
        """Constant sectional curvature of the model surface."""
        return {FLAT_DISK: 0.0, SPHERICAL_CAP: 1.0, HYPERBOLIC_DISK: -1.0}[self.kind]

    @property
    def second_fundamental(self) -> float:
        """II = const * id on the boundary circle."""
        R = self.param
        if self.kind == FLAT_DISK:
            return 1.0 / R
        if self.kind == SPHERICAL_CAP:
            return 1.0 / math.tan(R)
        return 1.0 / math.tanh(R)

    def exact_curvature(self) -> "CurvatureBounds":
        """CurvatureBounds populated with the sharp model data."""
        ii = self.second_fundamental
        return CurvatureBounds(
            d=self.dim, k1=self.sect, k2=self.sect, gamma1=ii, gamma2=ii
        )


def make_geometry(kind: str, param: float) -> BenchmarkGeometry:
    """Build a benchmark geometry, validating the radius parameter.

    kind is one of "flat_disk", "spherical_cap", "hyperbolic_disk"; param is
    the geodesic radius (the cap lives on the unit sphere, so its boundary is
    nonempty only for param < pi).
    """
    if kind not in (FLAT_DISK, SPHERICAL_CAP, HYPERBOLIC_DISK):
        raise GeometryError(f"unknown geometry kind {kind!r}")
    param = float(param)
    if not param > 0.0:
        raise GeometryError(f"geometry radius must be positive, got {param}")
    if kind == SPHERICAL_CAP and param >= math.pi:
        raise GeometryError(f"spherical cap requires theta0 < pi, got {param}")
    return BenchmarkGeometry(kind=kind, param=param)


# =====================================================================
# Curvature data
# =====================================================================


@dataclass(frozen=True)
class CurvatureBounds:
    """Curvature and boundary data consumed by the comparison machinery.

    k1 bounds Ricci from below (Ric >= (d-1) k1 g), k2 bounds sectional
    curvature from above, and gamma1 <= II <= gamma2 bounds the second
    fundamental form.  n and k_alpha_n carry the dimension parameter and
    lower bound of the n-weighted Ricci tensor for the coinciding-weight
    bounds; the three flags record assumptions that are never evaluated from
    fields, only asserted by the user.
    """

    d: int
    k1: float
    k2: float
    gamma1: float
    gamma2: float
    n: float = math.inf
    k_alpha_n: float | None = None
    beta_equals_alpha_on_boundary: bool = False
    h_alpha_integral_nonneg: bool = False
    h_alpha_pointwise_nonneg: bool = False
    ii_lower_positive: bool = False

    def __post_init__(self):
        if self.d < 2:
            raise GeometryError(f"dimension must be >= 2, got {self.d}")
        if self.gamma1 > self.gamma2:
            raise GeometryError(
                f"gamma1 = {self.gamma1} exceeds gamma2 = {self.gamma2}"
            )
        if not self.k2 > -self.gamma2**2:
            raise GeometryError(
                f"need k2 > -gamma2^2 for the comparison profile; "
                f"got k2 = {self.k2}, gamma2 = {self.gamma2}"
            )
        if math.isfinite(self.n) and self.n < self.d:
            raise GeometryError(f"n = {self.n} must be >= d = {self.d} (or inf)")


# =====================================================================
# Radial profiles and weights
# =====================================================================


@dataclass(frozen=True)
class RadialProfile:
    """A scalar C^1 profile of the radial coordinate with its derivative.

    Built-ins come from closed-form expressions (symbolically differentiated,
    so constants have derivative exactly 0.0).  Callable-backed profiles may
    supply their own derivative; otherwise central differences with the given
    step are used, which is accurate but not exactly zero for constants.
    """

    fn: Callable
    dfn: Callable
    label: str = ""

    @staticmethod
    def constant(c: float, label: str = "") -> "RadialProfile":
        c = float(c)
        return RadialProfile(
            fn=lambda r: c if np.isscalar(r) else np.full(np.shape(r), c),
            dfn=lambda r: 0.0 if np.isscalar(r) else np.zeros(np.shape(r)),
            label=label or repr(c),
        )

    @staticmethod
    def from_expression(source: str) -> "RadialProfile":
        tree = expressions.parse(source)
        dtree = expressions.derivative(tree)
        return RadialProfile(
            fn=expressions.compile_expr(tree),
            dfn=expressions.compile_expr(dtree),
            label=source,
        )

    @staticmethod
    def from_callable(fn, dfn=None, label="", fd_step=1e-6) -> "RadialProfile":
        if dfn is None:
            def dfn(r, _f=fn, _h=fd_step):
                return (_f(np.asarray(r) + _h) - _f(np.asarray(r) - _h)) / (2 * _h)
        return RadialProfile(fn=fn, dfn=dfn, label=label or getattr(fn, "__name__", ""))

    def __call__(self, r):
        return self.fn(r)

    def deriv(self, r):
        return self.dfn(r)


@dataclass(frozen=True)
class RadialQuadrature:
    """Panelled Gauss-Legendre quadrature in the radial coordinate.

    ``order`` q uses q+1 Gauss nodes per panel, exact for polynomial
    integrands of degree <= 2q+1; with the flat Jacobian r folded in, radial
    polynomials of degree <= 2q are integrated exactly.
    """

    order: int = 20
    panels: int = 48

    def __post_init__(self):
        if self.order < 2:
            raise GeometryError(f"quadrature order must be >= 2, got {self.order}")
        if self.panels < 1:
            raise GeometryError("quadrature needs at least one panel")

    @cached_property
    def _rule(self):
        return np.polynomial.legendre.leggauss(self.order + 1)

    def integrate(self, f, a: float, b: float, breakpoints=()) -> float:
        """Integrate f over [a, b], splitting panels at the breakpoints."""
        if b <= a:
            return 0.0
        cuts = [a] + sorted(t for t in breakpoints if a < t < b) + [b]
        x0, w0 = self._rule
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            edges = np.linspace(lo, hi, self.panels + 1)
            mids = 0.5 * (edges[:-1] + edges[1:])
            half = 0.5 * (edges[1:] - edges[:-1])
            nodes = (mids[:, None] + half[:, None] * x0[None, :]).ravel()
            wts = (half[:, None] * w0[None, :]).ravel()
            total += float(np.dot(wts, f(nodes)))
        return total


@dataclass(frozen=True)
class WeightPair:
    """Normalized weights alpha (interior) and beta (boundary extension).

    The stored profiles are the raw user profiles; `scale` is the common
    normalization factor, so alpha(r) = scale * alpha_raw(r) etc.  A and B
    are the masses of the normalized measures (A + B = 1).
    """

    geometry: BenchmarkGeometry
    alpha_raw: RadialProfile
    beta_raw: RadialProfile
    scale: float
    A: float
    B: float
    quadrature: RadialQuadrature = field(default_factory=RadialQuadrature)

    def alpha(self, r):
        return self.scale * self.alpha_raw(r)

    def beta(self, r):
        return self.scale * self.beta_raw(r)

    def grad_beta_over_beta(self, r):
        """|nabla beta|/beta along the radius; exactly scale-free."""
        return np.abs(self.beta_raw.deriv(r)) / self.beta_raw(r)

    @cached_property
    def beta_over_alpha_sup(self) -> float:
        """|beta/alpha|_infty over Omega (radial 1D sup)."""
        return sup_on_interval(
            lambda r: self.beta_raw(r) / self.alpha_raw(r), 0.0, self.geometry.inradius
        )[0]

    @cached_property
    def beta_sup(self) -> float:
        """|beta|_infty over Omega (normalized profile)."""
        return self.scale * sup_on_interval(self.beta_raw, 0.0, self.geometry.inradius)[0]

    @cached_property
    def A_over_alpha_sup(self) -> float:
        """|A/alpha|_infty over Omega (normalized profile)."""
        inv_sup = sup_on_interval(
            lambda r: 1.0 / self.alpha_raw(r), 0.0, self.geometry.inradius
        )[0]
        return self.A * inv_sup / self.scale


def sup_on_interval(f, a: float, b: float, samples: int = 10_001):
    """Sup of a smooth scalar function on [a, b].

    Dense scan at `samples` points followed by golden-section refinement in
    the bracket around the best sample.  The result can undershoot a true
    sup by O((b-a)/samples)^2 between nodes; callers treat it as the
    grid-resolution value the design prescribes.
    """
    xs = np.linspace(a, b, samples)
    vals = np.asarray(f(xs), dtype=float)
    i = int(np.argmax(vals))
    best_x, best_v = float(xs[i]), float(vals[i])
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, samples - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = float(f(x1)), float(f(x2))
    for _ in range(80):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = float(f(x2))
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = float(f(x1))
        if hi - lo < 1e-13 * max(1.0, abs(hi)):
            break
    for x, v in ((x1, f1), (x2, f2)):
        if v > best_v:
            best_x, best_v = float(x), float(v)
    return best_v, best_x


def _interior_mass(geometry: BenchmarkGeometry, profile, quadrature) -> float:
    """int profile dlambda = 2 pi int_0^R profile(r) J(r) dr."""
    return 2.0 * math.pi * quadrature.integrate(
        lambda r: np.asarray(profile(r)) * geometry.jacobian(r),
        0.0,
        geometry.inradius,
    )


def normalize_weights(
    geometry: BenchmarkGeometry,
    alpha: RadialProfile,
    beta: RadialProfile,
    quadrature: RadialQuadrature | None = None,
) -> WeightPair:
    """Rescale (alpha, beta) so mu = alpha lambda + beta sigma has mass 1.

    Both profiles are scaled by the same factor 1/(int alpha dlambda +
    int beta dsigma); A and B are the resulting masses.  Positivity is
    checked on the quadrature grid.  Applying the function to an already
    normalized pair returns scale exactly 1 (idempotence).
    """
    quadrature = quadrature or RadialQuadrature()
    R = geometry.inradius
    probe = np.linspace(0.0, R, 10_001)
    for name, prof in (("alpha", alpha), ("beta", beta)):
        vals = np.asarray(prof(probe), dtype=float)
        if not np.all(vals > 0.0):
            bad = float(probe[np.argmin(vals)])
            raise GeometryError(f"{name} profile must be positive; fails near r = {bad:.6g}")
    a_mass = _interior_mass(geometry, alpha, quadrature)
    b_mass = float(beta(R)) * geometry.boundary_length()
    scale = 1.0 / (a_mass + b_mass)
    if abs(scale - 1.0) < 1e-12:
        scale = 1.0  # idempotence: re-normalizing is bitwise stable
    return WeightPair(
        geometry=geometry,
        alpha_raw=alpha,
        beta_raw=beta,
        scale=scale,
        A=a_mass * scale,
        B=b_mass * scale,
        quadrature=quadrature,
    )


def tube_integral(
    geometry: BenchmarkGeometry,
    weights: WeightPair,
    t0: float,
    integrand,
    breakpoints_rho=(),
) -> float:
    """Integral of integrand(rho) over the tube {rho_boundary <= t0} against beta dlambda.

    rho is the distance to the boundary, rho(r) = inradius - r.  t0 larger
    than the inradius clamps the tube to all of Omega.  Optional breakpoints
    (in the rho variable) split the quadrature panels at integrand kinks.
    """
    R = geometry.inradius
    t = min(float(t0), R)
    if t <= 0.0:
        raise GeometryError(f"tube depth must be positive, got {t0}")

    def g(r):
        rho = R - r
        return (
            np.asarray(integrand(rho))
            * np.asarray(weights.beta(r))
            * geometry.jacobian(r)
        )

    cuts = [R - b for b in breakpoints_rho]
    return 2.0 * math.pi * weights.quadrature.integrate(g, R - t, R, breakpoints=cuts)
