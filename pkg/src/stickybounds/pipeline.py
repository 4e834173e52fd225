"""End-to-end runs: closed-form bounds, finite-element verification, ladders.

run_bounds evaluates every bound the configuration supports and reports each
as an entry with value, intermediates, and the inputs and assumption flags it
relied on; bounds whose hypotheses fail are reported as skipped, never
silently dropped.  run_verify additionally solves the discrete problems on a
mesh ladder, Richardson-extrapolates, and checks every dominance pair: an
upper bound must not fall below the discrete estimate (a lower bound must not
exceed it) beyond the configured relative tolerance.  run_convergence only
runs the ladder.

The mesh ladder is embarrassingly parallel; [solver].jobs > 1 distributes the
per-h solves over processes.  Workers rebuild the configuration from the raw
TOML data, and results are collected in ladder order, so parallel runs
produce the same bytes as sequential ones.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

from . import bounds as bd
from .comparison import optimize_rho_negpart
from .config import RunConfig, parse_config
from .meshing import disk_mesh
from .report import SCHEMA_VERSION
from .spectral import (
    assemble,
    estimate_lsi_lower,
    estimate_trace_norm,
    richardson,
    solve_boundary_poincare,
    solve_neumann_poincare,
    solve_no_bd_poincare,
    solve_steklov,
    solve_sticky_poincare,
)

__all__ = ["compute_bound_report", "run_bounds", "run_verify", "run_convergence"]

LADDER_QUANTITIES = ("sticky", "no_bd", "interior", "boundary", "steklov", "trace")
LSI_QUANTITIES = ("sticky", "no_bd", "interior", "boundary", "boundary_interior")

# bound entry (or input), discrete target, direction of the claimed inequality
DOMINANCE_PAIRS = (
    ("interpolate_poincare", "sticky", "upper"),
    ("coinciding_direct", "sticky", "upper"),
    ("poincare_no_bd", "no_bd", "upper"),
    ("input_C_la", "interior", "upper"),
    ("input_C_sib", "boundary", "upper"),
    ("steklov_lower", "steklov", "lower"),
    ("trace_norm_bound", "trace", "upper"),
    ("interpolate_logsob", "lsi_sticky", "upper"),
    ("logsob_no_bd", "lsi_no_bd", "upper"),
    ("input_L_la", "lsi_interior", "upper"),
    ("input_L_sib", "lsi_boundary", "upper"),
    ("input_L_boundary", "lsi_boundary_interior", "upper"),
)


def _entry(value=None, status="ok", reason=None, intermediates=None, conditional_on=(), flags=()):
    e = {"status": status, "value": value}
    if reason:
        e["reason"] = reason
    if intermediates:
        e["intermediates"] = intermediates
    if conditional_on:
        e["conditional_on"] = sorted(conditional_on)
    if flags:
        e["assumption_flags"] = sorted(flags)
    return e


def _skipped(reason):
    return _entry(status="skipped", reason=reason)


def compute_bound_report(config: RunConfig) -> dict:
    """Evaluate all closed-form bounds for one configuration."""
    g, w, curv = config.geometry, config.weights, config.curv
    A, B = w.A, w.B
    entries = {}

    def want(name):
        if name in config.skip:
            entries[name] = _skipped("skipped by configuration")
            return False
        return True

    negpart = optimize_rho_negpart(g, w, curv)
    neg_info = {
        "negpart_sup": negpart.value,
        "t1": negpart.t1,
        "grid_size": negpart.grid_size,
    }

    if want("K_boundary"):
        kb = bd.K_boundary(g, w, curv, config.C_la, negpart=negpart)
        entries["K_boundary"] = _entry(kb, intermediates=neg_info, conditional_on=["C_la"])
    else:
        kb = None

    if want("steklov_lower"):
        sl = bd.steklov_lower(g, w, curv, config.C_la, negpart=negpart)
        entries["steklov_lower"] = _entry(sl, intermediates=neg_info, conditional_on=["C_la"])
    else:
        sl = None

    if want("K_from_steklov"):
        if sl is not None and math.isfinite(sl) and sl > 0.0:
            entries["K_from_steklov"] = _entry(
                bd.K_from_steklov(sl, A, B), conditional_on=["C_la"]
            )
        else:
            entries["K_from_steklov"] = _skipped("no finite Steklov lower bound available")

    if want("K1_alt"):
        k1_alt = bd.K1_alt(g, w, curv, config.C_la, negpart=negpart) if kb is None else kb
        entries["K1_alt"] = _entry(k1_alt, intermediates=neg_info, conditional_on=["C_la"])
    else:
        k1_alt = None

    if want("K1_general"):
        k1g = bd.K1_general(g, w, curv, config.C_la)
        entries["K1_general"] = _entry(
            k1g.value,
            intermediates={
                "t0": k1g.t0,
                "eps": k1g.eps,
                "grad_sq": k1g.grad_sq,
                "drift_sq": k1g.drift_sq,
                "grid_size": k1g.grid_size,
            },
            conditional_on=["C_la"],
        )
    else:
        k1g = None

    coinciding_flags = (
        "beta_equals_alpha_on_boundary",
        "h_alpha_integral_nonneg",
    )
    if want("coinciding_K1"):
        if config.k_alpha_n is None:
            entries["coinciding_K1"] = _skipped("needs k_alpha_n")
            k1_coin = None
        else:
            try:
                k1_coin = bd.coinciding_K1(config.n, config.k_alpha_n, curv)
                entries["coinciding_K1"] = _entry(
                    k1_coin,
                    conditional_on=["n", "k_alpha_n"],
                    flags=coinciding_flags,
                )
            except bd.BoundsError as exc:
                entries["coinciding_K1"] = _skipped(str(exc))
                k1_coin = None
    else:
        k1_coin = None

    # best available mixed-term constant feeds both interpolations
    k1_candidates = {}
    if k1g is not None:
        k1_candidates["K1_general"] = k1g.value
    if k1_alt is not None:
        k1_candidates["K1_alt"] = k1_alt
    if k1_coin is not None:
        k1_candidates["coinciding_K1"] = k1_coin
    k1_source = min(k1_candidates, key=k1_candidates.get) if k1_candidates else None
    k1_best = k1_candidates.get(k1_source)
    k2_val = 0.0 if k1_best is not None else None

    interp_inputs = None
    if k1_best is not None and kb is not None:
        interp_inputs = bd.InterpolationInputs(
            A=A,
            B=B,
            C_la=config.C_la,
            C_sib=config.C_sib,
            K1=k1_best,
            K2=k2_val,
            K_boundary=kb,
            L_la=config.L_la,
            L_sib=config.L_sib,
            L_boundary=config.L_boundary,
        )

    if want("interpolate_poincare"):
        if interp_inputs is None:
            entries["interpolate_poincare"] = _skipped("needs K1 and K_boundary")
        else:
            ip = bd.interpolate_poincare(interp_inputs)
            entries["interpolate_poincare"] = _entry(
                ip.value,
                intermediates={
                    "t_star": ip.t_star,
                    "a": ip.a,
                    "b": ip.b,
                    "c": ip.c,
                    "d": ip.d,
                    "K1": k1_best,
                    "K1_source": k1_source,
                    "K2": k2_val,
                },
                conditional_on=["C_la", "C_sib"],
            )

    if want("poincare_no_bd"):
        if k1_best is None or kb is None:
            entries["poincare_no_bd"] = _skipped("needs K1 and K_boundary")
        else:
            entries["poincare_no_bd"] = _entry(
                bd.poincare_no_bd(config.C_la, k1_best, kb, A, B),
                intermediates={"K1": k1_best, "K1_source": k1_source},
                conditional_on=["C_la"],
            )

    if want("coinciding_direct"):
        if config.k_alpha_n is None:
            entries["coinciding_direct"] = _skipped("needs k_alpha_n")
        else:
            try:
                entries["coinciding_direct"] = _entry(
                    bd.coinciding_direct(config.n, config.k_alpha_n, curv.gamma1, curv),
                    conditional_on=["n", "k_alpha_n"],
                    flags=(
                        "beta_equals_alpha_on_boundary",
                        "h_alpha_pointwise_nonneg",
                        "ii_lower_positive",
                    ),
                )
            except bd.BoundsError as exc:
                entries["coinciding_direct"] = _skipped(str(exc))

    if want("trace_norm_bound"):
        entries["trace_norm_bound"] = _entry(
            bd.trace_norm_bound(g, w, curv, negpart=negpart), intermediates=neg_info
        )

    if want("bernoulli_logfactor"):
        entries["bernoulli_logfactor"] = _entry(bd.bernoulli_logfactor(A, B))

    if want("interpolate_logsob"):
        if interp_inputs is None:
            entries["interpolate_logsob"] = _skipped("needs K1 and K_boundary")
        elif config.L_la is None or config.L_sib is None:
            entries["interpolate_logsob"] = _skipped("needs L_la and L_sib inputs")
        else:
            ls = bd.interpolate_logsob(interp_inputs)
            entries["interpolate_logsob"] = _entry(
                ls.value,
                intermediates={
                    "s_star": ls.s_star,
                    "t_star": ls.t_star,
                    "K1": k1_best,
                    "K1_source": k1_source,
                    "L_boundary_used": config.L_boundary is not None,
                },
                conditional_on=["C_la", "C_sib", "L_la", "L_sib"]
                + (["L_boundary"] if config.L_boundary is not None else []),
            )

    if want("logsob_no_bd"):
        if k1_best is None or kb is None:
            entries["logsob_no_bd"] = _skipped("needs K1 and K_boundary")
        elif config.L_la is None or config.L_boundary is None:
            entries["logsob_no_bd"] = _skipped("needs L_la and L_boundary inputs")
        else:
            entries["logsob_no_bd"] = _entry(
                bd.logsob_no_bd(
                    config.L_la, config.L_boundary, config.C_la, kb, k1_best, A, B
                ),
                intermediates={"K1": k1_best, "K1_source": k1_source},
                conditional_on=["C_la", "L_la", "L_boundary"],
            )

    if want("L_boundary_interior"):
        if g.dim < 3:
            entries["L_boundary_interior"] = _skipped("requires d >= 3")
        elif not config.sobolev_table:
            entries["L_boundary_interior"] = _skipped("needs a Sobolev constant table")
        else:
            try:
                lbi = bd.L_boundary_interior(
                    g.dim,
                    A=A,
                    B=B,
                    beta_over_alpha_sup=w.beta_over_alpha_sup,
                    beta_sup=w.beta_sup,
                    A_over_alpha_sup=w.A_over_alpha_sup,
                    negpart_sup=negpart.value,
                    C_la=config.C_la,
                    sobolev_table=config.sobolev_table,
                )
                entries["L_boundary_interior"] = _entry(
                    lbi.value,
                    intermediates={
                        "p_star": lbi.p_star,
                        "entropy_term": lbi.entropy_term,
                        "rothaus_term": lbi.rothaus_term,
                    },
                    conditional_on=["C_la", "sobolev"],
                )
            except bd.BoundsError as exc:
                entries["L_boundary_interior"] = _skipped(str(exc))

    return {
        "schema_version": SCHEMA_VERSION,
        "geometry": {
            "kind": g.kind,
            "param": g.param,
            "dim": g.dim,
            "inradius": g.inradius,
            "sect": g.sect,
            "second_fundamental": g.second_fundamental,
        },
        "weights": {
            "alpha": config.alpha_src,
            "beta": config.beta_src,
            "A": A,
            "B": B,
            "beta_over_alpha_sup": w.beta_over_alpha_sup,
        },
        "assumptions": {
            "k1": curv.k1,
            "k2": curv.k2,
            "gamma1": curv.gamma1,
            "gamma2": curv.gamma2,
            "n": config.n,
            "k_alpha_n": config.k_alpha_n,
            "beta_equals_alpha_on_boundary": curv.beta_equals_alpha_on_boundary,
            "h_alpha_integral_nonneg": curv.h_alpha_integral_nonneg,
            "h_alpha_pointwise_nonneg": curv.h_alpha_pointwise_nonneg,
            "ii_lower_positive": curv.ii_lower_positive,
        },
        "inputs": {
            "C_la": config.C_la,
            "C_sib": config.C_sib,
            "L_la": config.L_la,
            "L_sib": config.L_sib,
            "L_boundary": config.L_boundary,
            "provenance": config.provenance,
            "sobolev": {repr(p): c for p, c in sorted(config.sobolev_table.items())},
        },
        "bounds": entries,
    }


def run_bounds(config: RunConfig) -> dict:
    return compute_bound_report(config)


# =====================================================================
# Verification
# =====================================================================


def _ladder_point(config: RunConfig, h: float) -> dict:
    mesh = disk_mesh(config.geometry, h)
    form = assemble(config.geometry, config.weights, mesh)
    cutoff = config.dense_cutoff
    return {
        "sticky": solve_sticky_poincare(form, cutoff),
        "no_bd": solve_no_bd_poincare(form, cutoff),
        "interior": solve_neumann_poincare(form, cutoff),
        "boundary": solve_boundary_poincare(form),
        "steklov": solve_steklov(form),
        "trace": estimate_trace_norm(form),
    }


def _ladder_point_raw(args):
    raw, h = args
    return _ladder_point(parse_config(raw), h)


def _run_ladder(config: RunConfig):
    """Solve the six discrete quantities on every ladder mesh, possibly in parallel."""
    if config.jobs > 1 and len(config.mesh_ladder) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            points = list(
                pool.map(_ladder_point_raw, [(config.raw, h) for h in config.mesh_ladder])
            )
    else:
        points = [_ladder_point(config, h) for h in config.mesh_ladder]
    estimates = {}
    for name in LADDER_QUANTITIES:
        ladder = [
            {
                "h": h,
                "ndof": pt[name].ndof,
                "value": pt[name].value,
                "eigenvalue": pt[name].eigenvalue,
                "residual": pt[name].residual,
                "method": pt[name].method,
            }
            for h, pt in zip(config.mesh_ladder, points)
        ]
        est = {"ladder": ladder}
        if len(ladder) >= 3:
            rich = richardson(config.mesh_ladder, [row["value"] for row in ladder])
            est["richardson"] = {
                "value": rich.value,
                "order": rich.order,
                "monotone": rich.monotone,
            }
            est["target"] = rich.value
        else:
            est["target"] = ladder[-1]["value"]
        estimates[name] = est
    return estimates


def _lsi_lower_estimates(config: RunConfig) -> dict:
    h = config.mesh_ladder[-1]
    mesh = disk_mesh(config.geometry, h)
    form = assemble(config.geometry, config.weights, mesh)
    out = {}
    for which in LSI_QUANTITIES:
        est = estimate_lsi_lower(
            form,
            which=which,
            seed=config.seed,
            restarts=config.lsi_restarts,
            iters=config.lsi_iters,
            dense_cutoff=config.dense_cutoff,
        )
        out[f"lsi_{which}"] = {
            "h": h,
            "ndof": est.ndof,
            "value": est.value,
            "restarts": est.restarts,
            "iters": est.iters,
        }
    return out


def _bound_side(report: dict, config: RunConfig, name: str):
    """Value of a dominance pair's bound side, or (None, reason)."""
    if name.startswith("input_"):
        key = name[len("input_") :]
        val = getattr(config, key)
        return (val, None) if val is not None else (None, f"{key} not provided")
    entry = report["bounds"].get(name)
    if entry is None:
        return None, "not computed"
    if entry["status"] != "ok":
        return None, entry.get("reason", entry["status"])
    val = entry["value"]
    if not isinstance(val, float) or not math.isfinite(val):
        return None, "bound is not finite"
    return val, None


def run_verify(config: RunConfig, corrupt_bounds_by: float | None = None) -> dict:
    """Bounds plus discrete verification and the dominance matrix.

    corrupt_bounds_by is a test hook: each upper bound is multiplied by the
    factor (and each lower bound divided by it) before the dominance
    comparison, so a small factor must make every pair fail.
    """
    report = compute_bound_report(config)
    estimates = _run_ladder(config)
    lsi = _lsi_lower_estimates(config)

    pairs = []
    skipped = []
    failures = 0
    for name, target, direction in DOMINANCE_PAIRS:
        value, reason = _bound_side(report, config, name)
        if value is None:
            skipped.append(f"{name}: {reason}")
            continue
        if target in estimates:
            target_value = estimates[target]["target"]
        elif target in lsi:
            target_value = lsi[target]["value"]
        else:
            skipped.append(f"{name}: no discrete estimate {target}")
            continue
        if corrupt_bounds_by is not None:
            value = value * corrupt_bounds_by if direction == "upper" else value / corrupt_bounds_by
        if direction == "upper":
            margin = (value - target_value) / target_value
        else:
            margin = (target_value - value) / target_value
        ok = margin >= -config.dominance_rtol
        failures += 0 if ok else 1
        pairs.append(
            {
                "bound": name,
                "target": target,
                "direction": direction,
                "bound_value": value,
                "target_value": target_value,
                "margin": margin,
                "pass": ok,
            }
        )

    strict_failures = []
    if config.strict:
        for item in skipped:
            strict_failures.append(f"skipped pair: {item}")
        for name, est in estimates.items():
            rich = est.get("richardson")
            if rich is not None and not rich["monotone"]:
                strict_failures.append(f"non-monotone ladder: {name}")

    report["verify"] = {
        "mesh_ladder": list(config.mesh_ladder),
        "estimates": estimates,
        "lsi_lower": lsi,
        "dominance": {
            "pairs": pairs,
            "failures": failures,
            "skipped": skipped,
            "strict_failures": strict_failures,
            "corrupted_by": corrupt_bounds_by,
        },
    }
    return report


def run_convergence(config: RunConfig) -> dict:
    """Mesh ladder plus Richardson extrapolation for the discrete quantities."""
    report = compute_bound_report(config)
    estimates = _run_ladder(config)
    conv = {}
    for name, est in estimates.items():
        conv[name] = {
            "ladder": est["ladder"],
            "richardson": est.get(
                "richardson", {"value": est["target"], "order": math.nan, "monotone": False}
            ),
        }
    report["convergence"] = conv
    return report


def csv_rows(report: dict):
    """Flatten ladder data from a verify/convergence report into CSV rows."""
    section = report.get("convergence")
    if section is None:
        section = report.get("verify", {}).get("estimates", {})
    rows = []
    for name in sorted(section):
        for row in section[name]["ladder"]:
            rows.append(
                {
                    "quantity": name,
                    "h": row["h"],
                    "ndof": row["ndof"],
                    "value": row["value"],
                    "eigenvalue": row["eigenvalue"],
                    "residual": row["residual"],
                    "method": row["method"],
                }
            )
    return rows
