"""TOML run configuration: parsing, validation, defaults.

A run file has sections [geometry], [weights], [assumptions], [inputs],
[solver], [bounds], [outputs].  Curvature data defaults to the exact values
of the benchmark surface and can be widened or annotated with the structural
assumption flags; the certified spectral inputs (C_la, C_sib, the optional
L slots) always come from the file, never from the solver, so the bound
pipeline stays independent of the verification pipeline.

Every validation failure raises ConfigError with the offending key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .expressions import ExpressionError
from .geometry import (
    BenchmarkGeometry,
    CurvatureBounds,
    GeometryError,
    RadialProfile,
    WeightPair,
    make_geometry,
    normalize_weights,
)

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]

_FLAG_NAMES = (
    "beta_equals_alpha_on_boundary",
    "h_alpha_integral_nonneg",
    "h_alpha_pointwise_nonneg",
    "ii_lower_positive",
)

_KNOWN_INPUTS = ("C_la", "C_sib", "L_la", "L_sib", "L_boundary")


class ConfigError(ValueError):
    """A run file is malformed or inconsistent."""


@dataclass(frozen=True)
class RunConfig:
    geometry: BenchmarkGeometry
    alpha_src: str
    beta_src: str
    weights: WeightPair
    curv: CurvatureBounds
    n: float
    k_alpha_n: float | None
    C_la: float
    C_sib: float
    L_la: float | None
    L_sib: float | None
    L_boundary: float | None
    provenance: dict
    sobolev_table: dict
    mesh_ladder: tuple
    dense_cutoff: int
    seed: int
    jobs: int
    lsi_restarts: int
    lsi_iters: int
    skip: frozenset
    dominance_rtol: float
    strict: bool
    out_dir: str
    raw: dict = field(repr=False)

    def with_overrides(self, out_dir=None, mesh_ladder=None, seed=None, strict=None):
        cfg = self
        if out_dir is not None:
            cfg = replace(cfg, out_dir=str(out_dir))
        if mesh_ladder is not None:
            cfg = replace(cfg, mesh_ladder=_check_ladder(mesh_ladder))
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if strict is not None:
            cfg = replace(cfg, strict=bool(strict))
        return cfg


def _section(data: dict, name: str, allowed: tuple) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{name}]")
    return sec


def _number(sec: dict, section: str, key: str, default=None, required=False):
    if key not in sec:
        if required:
            raise ConfigError(f"[{section}] is missing the required key {key!r}")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"[{section}].{key} must be a number, got {v!r}")
    return float(v)


def _check_ladder(values) -> tuple:
    try:
        ladder = tuple(float(h) for h in values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mesh ladder {values!r} is not a list of numbers") from exc
    if len(ladder) < 1:
        raise ConfigError("mesh ladder must contain at least one h")
    if any(h <= 0.0 or not math.isfinite(h) for h in ladder):
        raise ConfigError(f"mesh ladder {ladder} must be positive and finite")
    if any(ladder[i] <= ladder[i + 1] for i in range(len(ladder) - 1)):
        raise ConfigError(f"mesh ladder {ladder} must be strictly decreasing")
    return ladder


def parse_config(data: dict, strict: bool = False) -> RunConfig:
    """Build a validated RunConfig from parsed TOML data."""
    if not isinstance(data, dict):
        raise ConfigError("run file must parse to a table")
    for key in data:
        if key not in ("geometry", "weights", "assumptions", "inputs", "solver", "bounds", "outputs"):
            raise ConfigError(f"unknown section [{key}]")

    geo_sec = _section(data, "geometry", ("kind", "param"))
    kind = geo_sec.get("kind")
    if not isinstance(kind, str):
        raise ConfigError("[geometry].kind must be a string")
    param = _number(geo_sec, "geometry", "param", required=True)
    try:
        geometry = make_geometry(kind, param)
    except GeometryError as exc:
        raise ConfigError(str(exc)) from exc

    w_sec = _section(data, "weights", ("alpha", "beta"))
    alpha_src = w_sec.get("alpha", "1")
    beta_src = w_sec.get("beta", "1")
    for label, src in (("alpha", alpha_src), ("beta", beta_src)):
        if not isinstance(src, str):
            raise ConfigError(f"[weights].{label} must be an expression string")
    try:
        alpha = RadialProfile.from_expression(alpha_src)
        beta = RadialProfile.from_expression(beta_src)
        weights = normalize_weights(geometry, alpha, beta)
    except (ExpressionError, GeometryError) as exc:
        raise ConfigError(f"invalid weights: {exc}") from exc

    a_sec = _section(
        data,
        "assumptions",
        ("k1", "k2", "gamma1", "gamma2", "n", "k_alpha_n") + _FLAG_NAMES,
    )
    exact = geometry.exact_curvature()
    n_val = a_sec.get("n", math.inf)
    if isinstance(n_val, str):
        if n_val != "inf":
            raise ConfigError(f"[assumptions].n must be a number or 'inf', got {n_val!r}")
        n_val = math.inf
    elif isinstance(n_val, bool) or not isinstance(n_val, (int, float)):
        raise ConfigError(f"[assumptions].n must be a number or 'inf', got {n_val!r}")
    n_val = float(n_val)
    k_alpha_n = _number(a_sec, "assumptions", "k_alpha_n")
    flags = {}
    for name in _FLAG_NAMES:
        v = a_sec.get(name, False)
        if not isinstance(v, bool):
            raise ConfigError(f"[assumptions].{name} must be a boolean")
        flags[name] = v
    try:
        curv = CurvatureBounds(
            d=geometry.dim,
            k1=_number(a_sec, "assumptions", "k1", default=exact.k1),
            k2=_number(a_sec, "assumptions", "k2", default=exact.k2),
            gamma1=_number(a_sec, "assumptions", "gamma1", default=exact.gamma1),
            gamma2=_number(a_sec, "assumptions", "gamma2", default=exact.gamma2),
            n=n_val,
            k_alpha_n=k_alpha_n,
            **flags,
        )
    except GeometryError as exc:
        raise ConfigError(str(exc)) from exc

    i_sec = _section(data, "inputs", _KNOWN_INPUTS + ("sobolev", "provenance"))
    C_la = _number(i_sec, "inputs", "C_la", required=True)
    C_sib = _number(i_sec, "inputs", "C_sib", required=True)
    if C_la < 0.0 or C_sib < 0.0:
        raise ConfigError("C_la and C_sib must be >= 0")
    L_la = _number(i_sec, "inputs", "L_la")
    L_sib = _number(i_sec, "inputs", "L_sib")
    L_boundary = _number(i_sec, "inputs", "L_boundary")
    for name, v in (("L_la", L_la), ("L_sib", L_sib), ("L_boundary", L_boundary)):
        if v is not None and v < 0.0:
            raise ConfigError(f"{name} must be >= 0")
    sob_raw = i_sec.get("sobolev", {})
    if not isinstance(sob_raw, dict):
        raise ConfigError("[inputs.sobolev] must be a table of p -> constant")
    sobolev_table = {}
    for key, v in sob_raw.items():
        try:
            p = float(key)
        except ValueError as exc:
            raise ConfigError(f"[inputs.sobolev] key {key!r} is not a number") from exc
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0.0:
            raise ConfigError(f"[inputs.sobolev].{key} must be a nonnegative number")
        sobolev_table[p] = float(v)
    prov_raw = i_sec.get("provenance", {})
    if not isinstance(prov_raw, dict) or not all(
        isinstance(v, str) for v in prov_raw.values()
    ):
        raise ConfigError("[inputs.provenance] must map input names to strings")

    s_sec = _section(
        data,
        "solver",
        ("mesh_ladder", "dense_cutoff", "seed", "jobs", "lsi_restarts", "lsi_iters"),
    )
    ladder = _check_ladder(s_sec.get("mesh_ladder", [0.2, 0.1, 0.05]))
    dense_cutoff = int(_number(s_sec, "solver", "dense_cutoff", default=2500))
    seed = int(_number(s_sec, "solver", "seed", default=0))
    jobs = int(_number(s_sec, "solver", "jobs", default=1))
    lsi_restarts = int(_number(s_sec, "solver", "lsi_restarts", default=32))
    lsi_iters = int(_number(s_sec, "solver", "lsi_iters", default=400))
    if jobs < 1:
        raise ConfigError(f"[solver].jobs = {jobs} must be >= 1")
    if dense_cutoff < 1 or lsi_restarts < 0 or lsi_iters < 1:
        raise ConfigError("solver limits must be positive")

    b_sec = _section(data, "bounds", ("skip", "dominance_rtol"))
    skip_raw = b_sec.get("skip", [])
    if not isinstance(skip_raw, list) or not all(isinstance(s, str) for s in skip_raw):
        raise ConfigError("[bounds].skip must be a list of bound names")
    dominance_rtol = _number(b_sec, "bounds", "dominance_rtol", default=0.02)
    if not (0.0 <= dominance_rtol < 1.0):
        raise ConfigError(f"dominance_rtol = {dominance_rtol} must be in [0, 1)")

    o_sec = _section(data, "outputs", ("dir",))
    out_dir = o_sec.get("dir", "out")
    if not isinstance(out_dir, str):
        raise ConfigError("[outputs].dir must be a string path")

    return RunConfig(
        geometry=geometry,
        alpha_src=alpha_src,
        beta_src=beta_src,
        weights=weights,
        curv=curv,
        n=n_val,
        k_alpha_n=k_alpha_n,
        C_la=C_la,
        C_sib=C_sib,
        L_la=L_la,
        L_sib=L_sib,
        L_boundary=L_boundary,
        provenance=dict(prov_raw),
        sobolev_table=sobolev_table,
        mesh_ladder=ladder,
        dense_cutoff=dense_cutoff,
        seed=seed,
        jobs=jobs,
        lsi_restarts=lsi_restarts,
        lsi_iters=lsi_iters,
        skip=frozenset(skip_raw),
        dominance_rtol=float(dominance_rtol),
        strict=bool(strict),
        out_dir=out_dir,
        raw=data,
    )


def load_config(path, strict: bool = False) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read run file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return parse_config(data, strict=strict)
