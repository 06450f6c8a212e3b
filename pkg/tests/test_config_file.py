"""Tests for interfaces/cli/config_file.py: parsing, validation and rendering."""

from __future__ import annotations

from pathlib import Path

import pytest

from core.errors import ConfigurationError, ModelViolationError
from interfaces.cli.config_file import (
    REQUIRED_KEYS,
    RunParameters,
    load_config_values,
    parse_config,
    render_config,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

MINIMAL = {
    "model.D": "1",
    "model.eta": "1",
    "model.alpha": "1",
    "model.beta": "1",
    "model.H0": "3",
    "model.u0": "cosine-bump",
}


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


# ── Shipped configs ───────────────────────────────────────────────────────


@pytest.mark.parametrize("name", ["constant", "variable", "deterministic", "dichotomy"])
def test_shipped_configs_parse(name):
    spec, params = parse_config(CONFIG_DIR / f"{name}.cfg")
    assert spec.H0 > 0
    assert params.eps == 0.5


def test_constant_config_contents():
    spec, params = parse_config(CONFIG_DIR / "constant.cfg")
    assert spec.D_dist.kind == "truncated-normal"
    assert (spec.d1, spec.d2) == (0.8, 1.2)
    assert spec.eta_dist.kind == "truncated-beta"
    assert spec.eta0 == 1.6
    assert spec.alpha.kind == "constant"
    assert params.N is None
    assert (params.M, params.T, params.K, params.seed) == (50, 1.0, 100, 0)


def test_variable_config_contents():
    spec, _ = parse_config(CONFIG_DIR / "variable.cfg")
    assert spec.alpha.coeffs == (2.0, 3.0, 2.0, 2.0)
    assert spec.beta.coeffs == (2.0, 1.0, 2.0, 2.0)
    assert spec.ic.kind == "parabolic-bump"


def test_deterministic_config_contents():
    spec, params = parse_config(CONFIG_DIR / "deterministic.cfg")
    assert spec.is_deterministic
    assert params.N == 62500
    assert params.T == 50.0


# ── Validation ────────────────────────────────────────────────────────────


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        parse_config(tmp_path / "absent.cfg")


def test_empty_file_lists_required_keys(tmp_path):
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config(_write(tmp_path, ""))
    for key in REQUIRED_KEYS:
        assert key in str(excinfo.value)


def test_missing_key_named():
    values = dict(MINIMAL)
    del values["model.H0"]
    with pytest.raises(ConfigurationError, match="model.H0"):
        load_config_values(values)


def test_eps_outside_unit_interval(tmp_path):
    text = "\n".join(f"{k}={v}" for k, v in MINIMAL.items()) + "\nft.eps=1.5\n"
    with pytest.raises(ConfigurationError, match=r"eps must lie in \(0,1\)"):
        parse_config(_write(tmp_path, text))


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError, match="unknown config keys: grid.dt"):
        load_config_values({**MINIMAL, "grid.dt": "0.1"})


def test_field_that_does_not_apply_to_the_kind():
    values = {k: v for k, v in MINIMAL.items() if k != "model.D"}
    values |= {
        "model.D.kind": "truncated-beta",
        "model.D.a": "2",
        "model.D.b": "4",
        "model.D.lo": "0.8",
        "model.D.hi": "1.2",
        "model.D.scale": "0.1",
    }
    with pytest.raises(ConfigurationError, match="model.D.scale does not apply"):
        load_config_values(values)


def test_shorthand_cannot_mix_with_kind():
    with pytest.raises(ConfigurationError, match="shorthand"):
        load_config_values({**MINIMAL, "model.alpha.kind": "constant", "model.alpha.value": "2"})


@pytest.mark.parametrize(
    "key, raw, match",
    [
        ("model.H0", "three", "expects a number"),
        ("grid.M", "5.5", "expects an integer"),
        ("grid.N", "many", "integer or auto"),
        ("mc.K", "0", "mc.K must be"),
    ],
)
def test_malformed_values(key, raw, match):
    with pytest.raises(ConfigurationError, match=match):
        load_config_values({**MINIMAL, key: raw})


def test_growth_with_a_pole_rejected():
    values = {k: v for k, v in MINIMAL.items() if k != "model.alpha"}
    values |= {"model.alpha.kind": "rational-affine", "model.alpha.coeffs": "0,1,1,-1"}
    with pytest.raises(ModelViolationError, match="pole"):
        load_config_values(values)


def test_tabulated_initial_condition(tmp_path):
    text = "\n".join(f"{k}={v}" for k, v in MINIMAL.items() if k != "model.u0")
    text += '\nmodel.u0=tabulated\nmodel.u0.table="0:1 1.5:0.6 3:0"\n'
    spec, _ = parse_config(_write(tmp_path, text))
    assert spec.ic.table == ((0.0, 1.0), (1.5, 0.6), (3.0, 0.0))
    assert spec.ic(0.75) == pytest.approx(0.8)


# ── Rendering ─────────────────────────────────────────────────────────────


@pytest.mark.parametrize("name", ["constant", "variable", "dichotomy"])
def test_render_round_trip(tmp_path, name):
    spec, params = parse_config(CONFIG_DIR / f"{name}.cfg")
    spec2, params2 = parse_config(_write(tmp_path, render_config(spec, params)))
    assert spec2.to_dict() == spec.to_dict()
    assert params2 == params


def test_render_round_trip_with_tables(tmp_path):
    text = "\n".join(f"{k}={v}" for k, v in MINIMAL.items() if k not in {"model.alpha", "model.u0"})
    text += (
        '\nmodel.alpha.kind=tabulated\nmodel.alpha.table="0:1.25 10:1.0 40:0.75"'
        '\nmodel.u0=tabulated\nmodel.u0.table="0:1 1.5:0.6 3:0"'
        "\ngrid.N=400\ndichotomy.tail_window=25\n"
    )
    spec, params = parse_config(_write(tmp_path, text))
    spec2, params2 = parse_config(_write(tmp_path, render_config(spec, params)))
    assert spec2.to_dict() == spec.to_dict()
    assert params2 == params
    assert params2.tail_window == 25


def test_run_parameter_overrides():
    params = RunParameters()
    assert params.with_overrides(K=None, T=None) is params
    changed = params.with_overrides(K=10, seed=4, eps=None)
    assert (changed.K, changed.seed, changed.eps) == (10, 4, params.eps)
    with pytest.raises(ConfigurationError, match="eps must lie"):
        params.with_overrides(eps=0.0)
