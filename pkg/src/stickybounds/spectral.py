"""P1 finite elements for the sticky-reflecting forms on the benchmark surfaces.

The chart metric of a rotationally symmetric surface with profile J is
G = e_r e_r^T + (J(r)/r)^2 th th^T, so the volume element is (J/r) dx and the
inverse metric rescales angular derivatives by (r/J)^2.  Interior stiffness
and consistent mass are assembled with the three mid-edge quadrature points
per triangle (exact for quadratics); the rim carries 1D elements with the
intrinsic arc length J(r_max) dtheta, constant weight beta(r_max), and a
lumped boundary mass.  After assembly all four matrices are rescaled by the
total discrete mass so the discrete measure is a probability measure, which
leaves every generalized eigenvalue unchanged.

Eigenvalue problems run dense below a size cutoff and as shift-inverted
Lanczos above it, with an explicit residual check either way.  The
log-Sobolev functional is not an eigenvalue problem; estimate_lsi_lower
maximizes the exact discrete entropy ratio by projected gradient ascent, so
whatever it returns is a certified lower estimate of the discrete constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from .geometry import BenchmarkGeometry, WeightPair
from .meshing import TriMesh

__all__ = [
    "SolverError",
    "DiscreteForm",
    "SpectralEstimate",
    "LsiLowerEstimate",
    "RichardsonResult",
    "assemble",
    "solve_sticky_poincare",
    "solve_no_bd_poincare",
    "solve_neumann_poincare",
    "solve_boundary_poincare",
    "solve_steklov",
    "estimate_trace_norm",
    "discrete_variance",
    "discrete_entropy",
    "estimate_lsi_lower",
    "richardson",
]

DENSE_CUTOFF = 2500
RESIDUAL_TOL = 1e-8


class SolverError(RuntimeError):
    """An eigensolve failed to converge or returned an inconsistent pair."""


@dataclass(frozen=True)
class DiscreteForm:
    """Assembled matrices of the doubly weighted form on one mesh.

    K_int/M_int act on all vertices; K_bd couples only rim vertices and
    M_bd_diag is the lumped rim mass.  A_disc + B_disc = 1 after rescaling.
    """

    mesh: TriMesh
    K_int: sp.csr_matrix
    M_int: sp.csr_matrix
    K_bd: sp.csr_matrix
    M_bd_diag: np.ndarray
    lumped_int: np.ndarray
    boundary_idx: np.ndarray
    A_disc: float
    B_disc: float

    @property
    def n(self) -> int:
        return self.mesh.n_vertices


def _metric_factors(geometry: BenchmarkGeometry, r: np.ndarray):
    """(sqrt(det G), (r/J)^2) with the smooth r -> 0 limits."""
    r = np.asarray(r, dtype=float)
    J = geometry.jacobian(r)
    small = r < 1e-12
    safe_r = np.where(small, 1.0, r)
    safe_J = np.where(small, 1.0, J)
    vol = np.where(small, 1.0, J / safe_r)
    ang = np.where(small, 1.0, (r / np.where(safe_J == 0.0, 1.0, safe_J)) ** 2)
    return vol, ang


def assemble(geometry: BenchmarkGeometry, weights: WeightPair, mesh: TriMesh) -> DiscreteForm:
    p = mesh.vertices[mesh.triangles]  # (m, 3, 2)
    m = p.shape[0]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    # P1 gradients: grad lambda_i = ((y_j - y_k), (x_k - x_j)) / (2 area), cyclic
    g = np.empty((m, 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        g[:, i, 0] = p[:, j, 1] - p[:, k, 1]
        g[:, i, 1] = p[:, k, 0] - p[:, j, 0]
    g /= (2.0 * area)[:, None, None]

    mid = 0.5 * (p + np.roll(p, -1, axis=1))  # midpoints of edges 01, 12, 20
    phi_at_mid = np.array(
        [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]
    )

    K_loc = np.zeros((m, 3, 3))
    M_loc = np.zeros((m, 3, 3))
    wq = area / 3.0
    for q in range(3):
        x = mid[:, q, :]
        r = np.hypot(x[:, 0], x[:, 1])
        vol, ang = _metric_factors(geometry, r)
        coef = weights.alpha(r) * vol * wq
        er = x / np.where(r < 1e-12, 1.0, r)[:, None]
        er[r < 1e-12] = np.array([1.0, 0.0])
        th = np.column_stack([-er[:, 1], er[:, 0]])
        gr = g @ er[:, :, None]  # (m, 3, 1) radial components
        gt = g @ th[:, :, None]
        gr = gr[:, :, 0]
        gt = gt[:, :, 0]
        K_loc += coef[:, None, None] * (
            gr[:, :, None] * gr[:, None, :] + ang[:, None, None] * gt[:, :, None] * gt[:, None, :]
        )
        phi = phi_at_mid[q]
        M_loc += coef[:, None, None] * (phi[:, None] * phi[None, :])

    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_vertices
    K_int = sp.coo_matrix((K_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M_int = sp.coo_matrix((M_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    # rim elements: 1D stiffness/lumped mass with intrinsic arc length
    r_max = mesh.radius
    beta_val = float(weights.beta(r_max))
    J_rim = float(geometry.jacobian(r_max))
    a_idx = mesh.boundary_edges[:, 0]
    b_idx = mesh.boundary_edges[:, 1]
    th_a = np.arctan2(mesh.vertices[a_idx, 1], mesh.vertices[a_idx, 0])
    th_b = np.arctan2(mesh.vertices[b_idx, 1], mesh.vertices[b_idx, 0])
    dth = np.mod(th_b - th_a, 2.0 * math.pi)
    L_e = J_rim * dth
    c = beta_val / L_e
    rows_b = np.concatenate([a_idx, b_idx, a_idx, b_idx])
    cols_b = np.concatenate([a_idx, b_idx, b_idx, a_idx])
    data_b = np.concatenate([c, c, -c, -c])
    K_bd = sp.coo_matrix((data_b, (rows_b, cols_b)), shape=(n, n)).tocsr()
    M_bd_diag = np.zeros(n)
    np.add.at(M_bd_diag, a_idx, beta_val * L_e / 2.0)
    np.add.at(M_bd_diag, b_idx, beta_val * L_e / 2.0)

    total = float(M_int.sum() + M_bd_diag.sum())
    K_int = K_int / total
    M_int = M_int / total
    K_bd = K_bd / total
    M_bd_diag = M_bd_diag / total
    lumped_int = np.asarray(M_int.sum(axis=1)).ravel()
    return DiscreteForm(
        mesh=mesh,
        K_int=K_int,
        M_int=M_int,
        K_bd=K_bd,
        M_bd_diag=M_bd_diag,
        lumped_int=lumped_int,
        boundary_idx=mesh.boundary_vertices.copy(),
        A_disc=float(M_int.sum()),
        B_disc=float(M_bd_diag.sum()),
    )


# =====================================================================
# Eigenvalue machinery
# =====================================================================


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    eigenvalue: float
    residual: float
    ndof: int
    method: str


def _kernel_tol(vals: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.max(np.abs(vals))))


def _first_nonzero(vals: np.ndarray, vecs: np.ndarray):
    tol = _kernel_tol(vals)
    for i, v in enumerate(vals):
        if v > tol:
            return float(v), vecs[:, i]
    raise SolverError("no eigenvalue above the kernel tolerance was found")

def _residual(K, M, eta: float, u: np.ndarray) -> float:
    r = K @ u - eta * (M @ u)
    denom = np.linalg.norm(M @ u)
    return float(np.linalg.norm(r) / denom) if denom > 0.0 else math.inf


def _pencil_smallest(K, M, k: int = 3, dense_cutoff: int = DENSE_CUTOFF, v0=None):
    """Smallest k eigenpairs of K u = eta M u; dense below the cutoff.

    The sparse path shift-inverts at a small negative shift so the SPD
    factorization K + delta M exists even though K is singular on constants;
    the shift scale is the Rayleigh quotient of a fixed coordinate vector,
    making the whole solve deterministic.
    """
    n = K.shape[0]
    if n <= dense_cutoff:
        vals, vecs = scipy.linalg.eigh(K.toarray(), M.toarray())
        return vals[: k + 1], vecs[:, : k + 1], "dense"
    if v0 is None:
        raise SolverError("sparse path needs a deterministic start vector")
    q = float(v0 @ (K @ v0)) / float(v0 @ (M @ v0))
    delta = max(q / 100.0, 1e-8)
    try:
        vals, vecs = spla.eigsh(
            K.tocsc(), k=k, M=M.tocsc(), sigma=-delta, which="LM", v0=v0, maxiter=2000
        )
    except Exception as exc:  # ArpackNoConvergence and factorization failures
        raise SolverError(f"sparse eigensolve failed: {exc}") from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order], "sparse"


def _solve_pencil(K, M, ndof: int, dense_cutoff: int, v0) -> SpectralEstimate:
    vals, vecs, method = _pencil_smallest(K, M, dense_cutoff=dense_cutoff, v0=v0)
    eta, u = _first_nonzero(vals, vecs)
    # project out the M-kernel component and re-evaluate as a Rayleigh quotient
    ones = np.ones(ndof)
    m1 = M @ ones
    u = u - (u @ m1) / (ones @ m1) * ones
    eta = float(u @ (K @ u)) / float(u @ (M @ u))
    res = _residual(K, M, eta, u)
    if res > RESIDUAL_TOL:
        raise SolverError(f"eigenpair residual {res:.3e} exceeds {RESIDUAL_TOL:.1e}")
    return SpectralEstimate(
        value=1.0 / eta, eigenvalue=eta, residual=res, ndof=ndof, method=method
    )


def _coordinate_start(form: DiscreteForm) -> np.ndarray:
    return form.mesh.vertices[:, 0].copy()


def solve_sticky_poincare(form: DiscreteForm, dense_cutoff: int = DENSE_CUTOFF) -> SpectralEstimate:
    """Poincare constant of the full sticky-reflecting form (interior + rim energy)."""
    K = form.K_int + form.K_bd
    M = form.M_int + sp.diags(form.M_bd_diag)
    return _solve_pencil(K.tocsr(), M.tocsr(), form.n, dense_cutoff, _coordinate_start(form))


def solve_no_bd_poincare(form: DiscreteForm, dense_cutoff: int = DENSE_CUTOFF) -> SpectralEstimate:
    """Poincare constant without boundary diffusion: interior energy, full measure."""
    M = form.M_int + sp.diags(form.M_bd_diag)
    return _solve_pencil(form.K_int, M.tocsr(), form.n, dense_cutoff, _coordinate_start(form))


def solve_neumann_poincare(form: DiscreteForm, dense_cutoff: int = DENSE_CUTOFF) -> SpectralEstimate:
    """Interior weighted Neumann Poincare constant (no boundary terms at all)."""
    return _solve_pencil(form.K_int, form.M_int, form.n, dense_cutoff, _coordinate_start(form))


def solve_boundary_poincare(form: DiscreteForm) -> SpectralEstimate:
    """Poincare constant of the rim circle with weight beta; always dense."""
    b = form.boundary_idx
    K = form.K_bd[np.ix_(b, b)].toarray()
    M = np.diag(form.M_bd_diag[b])
    vals, vecs = scipy.linalg.eigh(K, M)
    eta, u = _first_nonzero(vals, vecs)
    res = _residual(K, M, eta, u)
    if res > RESIDUAL_TOL:
        raise SolverError(f"boundary eigenpair residual {res:.3e}")
    return SpectralEstimate(
        value=1.0 / eta, eigenvalue=eta, residual=res, ndof=b.size, method="dense"
    )


def _interior_split(form: DiscreteForm):
    b = form.boundary_idx
    mask = np.ones(form.n, dtype=bool)
    mask[b] = False
    i = np.nonzero(mask)[0]
    return i, b


def _schur_onto_boundary(P: sp.csr_matrix, form: DiscreteForm) -> np.ndarray:
    """Dense Schur complement of the SPD matrix P onto the rim vertices."""
    i, b = _interior_split(form)
    P_ii = P[np.ix_(i, i)].tocsc()
    P_ib = P[np.ix_(i, b)].toarray()
    P_bb = P[np.ix_(b, b)].toarray()
    try:
        lu = spla.splu(P_ii)
    except RuntimeError as exc:
        raise SolverError(f"interior factorization failed: {exc}") from exc
    X = lu.solve(P_ib)
    return P_bb - P_ib.T @ X


def solve_steklov(form: DiscreteForm) -> SpectralEstimate:
    """First nontrivial doubly weighted Steklov eigenvalue via the Schur complement.

    The Schur complement of the interior stiffness onto the rim is the
    discrete Dirichlet-to-Neumann form; its first nonzero eigenvalue against
    the lumped rim mass is the Steklov value itself (not a reciprocal).
    """
    S = _schur_onto_boundary(form.K_int, form)
    b = form.boundary_idx
    M = np.diag(form.M_bd_diag[b])
    vals, vecs = scipy.linalg.eigh(S, M)
    eta, u = _first_nonzero(vals, vecs)
    res = _residual(S, M, eta, u)
    if res > RESIDUAL_TOL:
        raise SolverError(f"Steklov eigenpair residual {res:.3e}")
    return SpectralEstimate(
        value=eta, eigenvalue=eta, residual=res, ndof=b.size, method="dense"
    )


def estimate_trace_norm(form: DiscreteForm) -> SpectralEstimate:
    """Operator norm of the trace into L2(boundary) against the H1 norm.

    nu = sup f^T M_bd f / f^T (K_int + M_int) f is reduced to the rim by a
    Schur complement of the SPD denominator; the norm is sqrt(nu_max).
    """
    P = (form.K_int + form.M_int).tocsr()
    S = _schur_onto_boundary(P, form)
    b = form.boundary_idx
    Mb = np.diag(form.M_bd_diag[b])
    vals = scipy.linalg.eigh(Mb, S, eigvals_only=True)
    nu = float(vals[-1])
    return SpectralEstimate(
        value=math.sqrt(nu), eigenvalue=nu, residual=0.0, ndof=b.size, method="dense"
    )


# =====================================================================
# Entropy functionals
# =====================================================================


def discrete_variance(w: np.ndarray, f: np.ndarray) -> float:
    """Variance of f under the probability measure proportional to w."""
    p = w / np.sum(w)
    mean = float(p @ f)
    return float(p @ (f - mean) ** 2)


def discrete_entropy(w: np.ndarray, g: np.ndarray) -> float:
    """Entropy of g >= 0 under the probability measure proportional to w."""
    if np.any(g < 0.0):
        raise ValueError("entropy argument must be nonnegative")
    p = w / np.sum(w)
    S = float(p @ g)
    if S <= 0.0:
        return 0.0
    nz = g > 0.0
    return float(np.sum(p[nz] * g[nz] * np.log(g[nz] / S)))


def _entropy_and_grad(p: np.ndarray, f: np.ndarray):
    g = f * f
    S = float(p @ g)
    if S <= 0.0:
        return 0.0, np.zeros_like(f)
    nz = g > 0.0
    ln = np.zeros_like(f)
    ln[nz] = np.log(g[nz] / S)
    ent = float(np.sum(p[nz] * g[nz] * ln[nz]))
    return ent, 2.0 * p * f * ln


@dataclass(frozen=True)
class LsiLowerEstimate:
    value: float
    which: str
    ndof: int
    restarts: int
    iters: int


def _lsi_ratio(p, K, f):
    ent, _ = _entropy_and_grad(p, f)
    en = float(f @ (K @ f))
    return ent / en if en > 0.0 else -math.inf


def _ascend(p, K, f0, iters):
    f = f0.copy()
    best = _lsi_ratio(p, K, f)
    best_f = f.copy()
    step = 0.1
    for _ in range(iters):
        ent, gent = _entropy_and_grad(p, f)
        Kf = K @ f
        en = float(f @ Kf)
        if en <= 0.0:
            break
        grad = (gent * en - ent * 2.0 * Kf) / en**2
        gn = np.linalg.norm(grad)
        if gn == 0.0 or step < 1e-12:
            break
        cand = f + (step / gn) * grad
        r = _lsi_ratio(p, K, cand)
        if r > best:
            best, best_f, f = r, cand.copy(), cand
            step *= 1.2
        else:
            step *= 0.5
    return best, best_f


def estimate_lsi_lower(
    form: DiscreteForm,
    which: str = "sticky",
    seed: int = 0,
    restarts: int = 32,
    iters: int = 400,
    dense_cutoff: int = DENSE_CUTOFF,
) -> LsiLowerEstimate:
    """Lower estimate of a discrete log-Sobolev constant sup Ent(f^2)/E(f).

    which selects the energy/measure pair: 'sticky' (full energy, full
    measure), 'no_bd' (interior energy, full measure), 'interior' (interior
    pair), 'boundary' (rim pair), 'boundary_interior' (rim entropy against
    interior energy).  For the sub-measure pairs the assembled energy still
    carries the global weight scale, so the ratio is multiplied by the mass
    of the measure the energy is normalized against.  Starts are low eigenvectors of the matching Poincare pencil,
    whose vanishing-perturbation limit of the ratio is twice the Poincare
    constant, plus seeded random vectors.  Every reported value is the exact
    ratio at an explicit vector, so the result never overstates the discrete
    constant.
    """
    if which == "sticky":
        K = (form.K_int + form.K_bd).tocsr()
        M = (form.M_int + sp.diags(form.M_bd_diag)).tocsr()
        w = form.lumped_int + form.M_bd_diag
        sub = None
        energy_mass = 1.0
    elif which == "no_bd":
        K = form.K_int
        M = (form.M_int + sp.diags(form.M_bd_diag)).tocsr()
        w = form.lumped_int + form.M_bd_diag
        sub = None
        energy_mass = 1.0
    elif which == "interior":
        K = form.K_int
        M = form.M_int
        w = form.lumped_int
        sub = None
        energy_mass = form.A_disc
    elif which == "boundary":
        b = form.boundary_idx
        K = form.K_bd[np.ix_(b, b)].tocsr()
        M = sp.diags(form.M_bd_diag[b]).tocsr()
        w = form.M_bd_diag[b]
        sub = b
        energy_mass = form.B_disc
    elif which == "boundary_interior":
        # rim entropy against the interior energy, both normalized
        K = form.K_int
        M = form.M_int + sp.diags(form.M_bd_diag)
        w = form.M_bd_diag.copy()
        sub = None
        energy_mass = form.A_disc
    else:
        raise ValueError(f"unknown functional {which!r}")

    n = K.shape[0]
    mass = float(np.sum(w))
    p = w / mass
    v0 = form.mesh.vertices[:, 0][sub] if sub is not None else form.mesh.vertices[:, 0]
    vals, vecs, _ = _pencil_smallest(K, M, k=4, dense_cutoff=dense_cutoff, v0=v0.copy())
    tol = _kernel_tol(vals)
    starts = []
    for i in range(vals.size):
        if vals[i] <= tol:
            continue
        u = vecs[:, i]
        scale = np.max(np.abs(u))
        for eps in (1e-4, 1e-3, 1e-1, 0.5):
            starts.append(1.0 + (eps / scale) * u)
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        starts.append(1.0 + rng.standard_normal(n))

    best = -math.inf
    for f0 in starts:
        r, _ = _ascend(p, K, f0, iters)
        if r > best:
            best = r
    if not math.isfinite(best) or best <= 0.0:
        raise SolverError("entropy ascent found no positive ratio")
    return LsiLowerEstimate(
        value=best * energy_mass, which=which, ndof=n, restarts=restarts, iters=iters
    )


# =====================================================================
# Richardson extrapolation
# =====================================================================


@dataclass(frozen=True)
class RichardsonResult:
    value: float
    order: float
    monotone: bool
    hs: tuple
    values: tuple


def richardson(hs, values) -> RichardsonResult:
    """Extrapolate a mesh ladder under the model v(h) = v* + C h^q.

    Three points determine q by a scalar root solve; four or more fit
    (v*, C) per candidate q by least squares and scan q.  A ladder whose
    successive differences change sign or fail to shrink is flagged
    non-monotone and the finest value is returned with order NaN.
    """
    hs = tuple(float(h) for h in hs)
    values = tuple(float(v) for v in values)
    if len(hs) != len(values) or len(hs) < 3:
        raise ValueError("need at least three (h, value) pairs")
    if any(hs[i] <= hs[i + 1] for i in range(len(hs) - 1)):
        raise ValueError("mesh sizes must be strictly decreasing")
    diffs = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    monotone = all(d1 * d2 > 0.0 for d1, d2 in zip(diffs, diffs[1:])) and all(
        abs(d2) < abs(d1) for d1, d2 in zip(diffs, diffs[1:])
    )
    if not monotone:
        return RichardsonResult(
            value=values[-1], order=math.nan, monotone=False, hs=hs, values=values
        )
    if len(hs) == 3:
        h1, h2, h3 = hs
        v1, v2, v3 = values
        ratio = (v1 - v2) / (v2 - v3)

        def gap(q):
            return (h1**q - h2**q) / (h2**q - h3**q) - ratio

        try:
            q = brentq(gap, 1e-3, 16.0, xtol=1e-12)
        except ValueError:
            return RichardsonResult(
                value=values[-1], order=math.nan, monotone=False, hs=hs, values=values
            )
        C = (v2 - v3) / (h2**q - h3**q)
        vstar = v3 - C * h3**q
        return RichardsonResult(value=vstar, order=float(q), monotone=True, hs=hs, values=values)

    h_arr = np.asarray(hs)
    v_arr = np.asarray(values)

    def fit(q):
        X = np.column_stack([np.ones_like(h_arr), h_arr**q])
        coef, *_ = np.linalg.lstsq(X, v_arr, rcond=None)
        resid = v_arr - X @ coef
        return float(resid @ resid), coef

    qs = np.geomspace(0.25, 8.0, 200)
    errs = [fit(q)[0] for q in qs]
    i = int(np.argmin(errs))
    lo, hi = qs[max(i - 1, 0)], qs[min(i + 1, qs.size - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - phi * (hi - lo), lo + phi * (hi - lo)
    f1, f2 = fit(x1)[0], fit(x2)[0]
    for _ in range(60):
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = fit(x2)[0]
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = fit(x1)[0]
    q_best = 0.5 * (lo + hi)
    _, coef = fit(q_best)
    return RichardsonResult(
        value=float(coef[0]), order=float(q_best), monotone=True, hs=hs, values=values
    )
