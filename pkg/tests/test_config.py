"""Tests for run-file parsing and validation."""

import math

import pytest

from stickybounds.config import ConfigError, load_config, parse_config


def minimal(**extra):
    data = {
        "geometry": {"kind": "flat_disk", "param": 1.0},
        "inputs": {"C_la": 0.3, "C_sib": 1.0},
    }
    data.update(extra)
    return data


class TestDefaults:
    def test_minimal_config(self):
        cfg = parse_config(minimal())
        assert cfg.geometry.kind == "flat_disk"
        assert cfg.alpha_src == "1"
        assert cfg.beta_src == "1"
        assert cfg.C_la == 0.3
        assert cfg.C_sib == 1.0
        assert cfg.L_la is None and cfg.L_sib is None and cfg.L_boundary is None
        assert cfg.mesh_ladder == (0.2, 0.1, 0.05)
        assert cfg.dense_cutoff == 2500
        assert cfg.seed == 0
        assert cfg.jobs == 1
        assert cfg.lsi_restarts == 32
        assert cfg.lsi_iters == 400
        assert cfg.skip == frozenset()
        assert cfg.dominance_rtol == 0.02
        assert not cfg.strict
        assert cfg.out_dir == "out"
        assert cfg.sobolev_table == {}
        assert cfg.provenance == {}

    def test_curvature_defaults_to_exact(self):
        cfg = parse_config(minimal())
        exact = cfg.geometry.exact_curvature()
        assert cfg.curv.k1 == exact.k1
        assert cfg.curv.gamma2 == exact.gamma2
        assert cfg.n == math.inf

    def test_weights_normalized(self):
        cfg = parse_config(minimal(weights={"alpha": "exp(-r^2)", "beta": "1"}))
        assert abs(cfg.weights.A + cfg.weights.B - 1.0) < 1e-12

    def test_strict_flag_threads_through(self):
        assert parse_config(minimal(), strict=True).strict


class TestValidation:
    def test_not_a_table(self):
        with pytest.raises(ConfigError, match="table"):
            parse_config([1, 2])

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config(minimal(extras={}))

    def test_unknown_key_in_section(self):
        data = minimal()
        data["geometry"]["shape"] = "round"
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(data)

    def test_missing_geometry_kind(self):
        with pytest.raises(ConfigError, match="kind"):
            parse_config({"geometry": {"param": 1.0}, "inputs": {"C_la": 1.0, "C_sib": 1.0}})

    def test_bad_geometry(self):
        data = minimal()
        data["geometry"]["kind"] = "octagon"
        with pytest.raises(ConfigError):
            parse_config(data)

    def test_missing_required_inputs(self):
        with pytest.raises(ConfigError, match="C_sib"):
            parse_config({"geometry": {"kind": "flat_disk", "param": 1.0},
                          "inputs": {"C_la": 1.0}})

    def test_negative_inputs(self):
        with pytest.raises(ConfigError):
            parse_config(minimal(inputs={"C_la": -1.0, "C_sib": 1.0}))
        data = minimal()
        data["inputs"]["L_la"] = -0.5
        with pytest.raises(ConfigError, match="L_la"):
            parse_config(data)

    def test_non_numeric_input(self):
        with pytest.raises(ConfigError, match="must be a number"):
            parse_config(minimal(inputs={"C_la": "big", "C_sib": 1.0}))

    def test_boolean_is_not_a_number(self):
        with pytest.raises(ConfigError, match="must be a number"):
            parse_config(minimal(inputs={"C_la": True, "C_sib": 1.0}))

    def test_weights_must_be_strings(self):
        with pytest.raises(ConfigError, match="expression string"):
            parse_config(minimal(weights={"alpha": 2.0}))

    def test_weights_must_parse(self):
        with pytest.raises(ConfigError, match="invalid weights"):
            parse_config(minimal(weights={"alpha": "q + 1"}))

    def test_weights_must_be_positive(self):
        with pytest.raises(ConfigError, match="invalid weights"):
            parse_config(minimal(weights={"alpha": "r - 2"}))

    def test_bad_assumption_flag(self):
        with pytest.raises(ConfigError, match="boolean"):
            parse_config(minimal(assumptions={"beta_equals_alpha_on_boundary": 1}))

    def test_inconsistent_curvature(self):
        with pytest.raises(ConfigError, match="exceeds"):
            parse_config(minimal(assumptions={"gamma1": 3.0, "gamma2": 1.0}))


class TestAssumptionN:
    def test_n_inf_string(self):
        cfg = parse_config(minimal(assumptions={"n": "inf"}))
        assert cfg.n == math.inf

    def test_n_number(self):
        cfg = parse_config(minimal(assumptions={"n": 5, "k_alpha_n": 2.0}))
        assert cfg.n == 5.0
        assert cfg.k_alpha_n == 2.0

    def test_n_bad_string(self):
        with pytest.raises(ConfigError, match="'inf'"):
            parse_config(minimal(assumptions={"n": "lots"}))

    def test_n_bool_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(minimal(assumptions={"n": True}))


class TestSobolevTable:
    def test_string_keys_become_floats(self):
        data = minimal()
        data["inputs"]["sobolev"] = {"3.0": 1.0, "4": 2.0}
        cfg = parse_config(data)
        assert cfg.sobolev_table == {3.0: 1.0, 4.0: 2.0}

    def test_bad_key(self):
        data = minimal()
        data["inputs"]["sobolev"] = {"p=3": 1.0}
        with pytest.raises(ConfigError, match="not a number"):
            parse_config(data)

    def test_negative_value(self):
        data = minimal()
        data["inputs"]["sobolev"] = {"3.0": -1.0}
        with pytest.raises(ConfigError):
            parse_config(data)

    def test_non_table(self):
        data = minimal()
        data["inputs"]["sobolev"] = [3.0, 1.0]
        with pytest.raises(ConfigError):
            parse_config(data)


class TestProvenance:
    def test_accepted(self):
        data = minimal()
        data["inputs"]["provenance"] = {"C_la": "two-sided shooting on the radial ODE"}
        cfg = parse_config(data)
        assert "C_la" in cfg.provenance

    def test_non_string_values_rejected(self):
        data = minimal()
        data["inputs"]["provenance"] = {"C_la": 3}
        with pytest.raises(ConfigError, match="provenance"):
            parse_config(data)


class TestSolverSection:
    def test_custom_ladder(self):
        cfg = parse_config(minimal(solver={"mesh_ladder": [0.3, 0.2, 0.1]}))
        assert cfg.mesh_ladder == (0.3, 0.2, 0.1)

    def test_ladder_must_decrease(self):
        with pytest.raises(ConfigError, match="decreasing"):
            parse_config(minimal(solver={"mesh_ladder": [0.1, 0.2]}))

    def test_ladder_must_be_positive(self):
        with pytest.raises(ConfigError, match="positive"):
            parse_config(minimal(solver={"mesh_ladder": [0.2, 0.0]}))

    def test_ladder_must_be_numbers(self):
        with pytest.raises(ConfigError, match="list of numbers"):
            parse_config(minimal(solver={"mesh_ladder": "fine"}))

    def test_empty_ladder(self):
        with pytest.raises(ConfigError, match="at least one"):
            parse_config(minimal(solver={"mesh_ladder": []}))

    def test_jobs_validation(self):
        with pytest.raises(ConfigError, match="jobs"):
            parse_config(minimal(solver={"jobs": 0}))

    def test_limit_validation(self):
        with pytest.raises(ConfigError, match="positive"):
            parse_config(minimal(solver={"lsi_iters": 0}))


class TestBoundsSection:
    def test_skip_list(self):
        cfg = parse_config(minimal(bounds={"skip": ["interpolate_logsob"]}))
        assert cfg.skip == frozenset({"interpolate_logsob"})

    def test_skip_must_be_strings(self):
        with pytest.raises(ConfigError, match="skip"):
            parse_config(minimal(bounds={"skip": [1, 2]}))

    def test_rtol_range(self):
        with pytest.raises(ConfigError, match="dominance_rtol"):
            parse_config(minimal(bounds={"dominance_rtol": 1.5}))


class TestOverrides:
    def test_with_overrides(self):
        cfg = parse_config(minimal())
        cfg2 = cfg.with_overrides(out_dir="elsewhere", mesh_ladder=[0.3, 0.15], seed=9, strict=True)
        assert cfg2.out_dir == "elsewhere"
        assert cfg2.mesh_ladder == (0.3, 0.15)
        assert cfg2.seed == 9
        assert cfg2.strict
        # original untouched
        assert cfg.out_dir == "out"
        assert cfg.seed == 0

    def test_override_keeps_rest(self):
        cfg = parse_config(minimal()).with_overrides(seed=3)
        assert cfg.C_la == 0.3
        assert cfg.mesh_ladder == (0.2, 0.1, 0.05)

    def test_bad_override_ladder(self):
        cfg = parse_config(minimal())
        with pytest.raises(ConfigError):
            cfg.with_overrides(mesh_ladder=[0.1, 0.2])


class TestLoadConfig:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "run.toml"
        p.write_text(
            '[geometry]\nkind = "spherical_cap"\nparam = 1.0\n'
            "[inputs]\nC_la = 0.5\nC_sib = 1.5\n"
            '[weights]\nalpha = "exp(-r^2)"\n'
        )
        cfg = load_config(p)
        assert cfg.geometry.kind == "spherical_cap"
        assert cfg.alpha_src == "exp(-r^2)"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.toml")

    def test_bad_toml(self, tmp_path):
        p = tmp_path / "run.toml"
        p.write_text("geometry = [unclosed")
        with pytest.raises(ConfigError, match="invalid TOML"):
            load_config(p)
