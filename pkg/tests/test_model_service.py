import json

import numpy as np
import pytest

from app.core.errors import ConfigError, ModelParseError, NotIrreducibleError, RowSumViolationError
from app.schemas.report_schema import SpectrumReport
from app.services.model_service import ModelService
from app.services.results_service import ResultsService, format_value


def test_load_json_model(fixture_path):
    model = ModelService.load_model(fixture_path("two_state.json"))
    assert model.labels == ["a", "b"]
    assert model.seed == 7
    assert np.allclose(model.pi.weights, [2.0 / 3.0, 1.0 / 3.0], atol=1e-14)
    assert np.array_equal(model.nu.weights, [1.0, 0.0])


def test_load_birth_death_model(fixture_path):
    model = ModelService.load_model(fixture_path("birth_death.json"))
    assert model.labels == ["low", "mid", "high"]
    assert np.allclose(model.pi.weights, [0.4, 0.4, 0.2], atol=1e-14)
    assert np.array_equal(model.nu.weights, [0.4, 0.4, 0.2])
    assert np.allclose(model.f.values, [1.0, 0.0, -2.0], atol=1e-14)


def test_load_toml_model(fixture_path):
    model = ModelService.load_model(fixture_path("cycle.toml"))
    assert model.n == 3
    assert np.allclose(model.pi.weights, 1.0 / 3.0, atol=1e-14)
    assert model.seed is None


def test_uncentered_observable_is_centered_on_load(fixture_path):
    model = ModelService.load_model(fixture_path("uncentered.json"))
    assert np.allclose(model.f.values, [1.0 / 3.0, -2.0 / 3.0], atol=1e-14)


def test_negative_rate_names_field(fixture_path):
    with pytest.raises(ModelParseError) as info:
        ModelService.load_model(fixture_path("negative_rate.json"))
    assert info.value.field == "q[0][1]"
    assert info.value.exit_code == 2


def test_malformed_documents(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ModelParseError):
        ModelService.load_model(broken)

    short = tmp_path / "short.json"
    short.write_text(json.dumps({"states": ["a", "b"], "q": [[-1, 1], [1, -1]], "f": [1.0]}), encoding="utf-8")
    with pytest.raises(ModelParseError):
        ModelService.load_model(short)

    other = tmp_path / "model.yaml"
    other.write_text("states: []", encoding="utf-8")
    with pytest.raises(ModelParseError):
        ModelService.load_model(other)


def test_structural_errors_surface(tmp_path):
    bad_rows = tmp_path / "rows.json"
    bad_rows.write_text(json.dumps({"states": ["a", "b"], "q": [[-1, 1], [1, -2]], "f": [1, -1]}), encoding="utf-8")
    with pytest.raises(RowSumViolationError):
        ModelService.load_model(bad_rows)

    reducible = tmp_path / "reducible.json"
    reducible.write_text(
        json.dumps({"states": ["a", "b", "c"], "q": [[-1, 1, 0], [1, -1, 0], [0, 0, 0]], "f": [1, -1, 0]}),
        encoding="utf-8",
    )
    with pytest.raises(NotIrreducibleError):
        ModelService.load_model(reducible)


def test_save_and_reload_is_bitwise_identical(fixture_path, tmp_path):
    for name in ("two_state.json", "cycle.toml", "birth_death.json"):
        model = ModelService.load_model(fixture_path(name))
        path = ModelService.save_model(model, tmp_path / f"{name}.saved.json")
        again = ModelService.load_model(path)
        assert np.array_equal(again.q.rates, model.q.rates)
        assert np.array_equal(again.pi.weights, model.pi.weights)
        assert np.array_equal(again.f.values, model.f.values)
        assert np.array_equal(again.nu.weights, model.nu.weights)
        assert again.labels == model.labels


def test_config_validation(fixture_path, tmp_path):
    base = {"model": str(fixture_path("two_state.json")), "t_values": [1.0], "u_grid": [0.1, 0.2]}
    config = ModelService.build_config(base)
    assert config.samples == 10000
    assert [f.value for f in config.families] == ["general", "perturbation", "poincare", "bernstein_general"]

    for broken in (
        {**base, "u_grid": []},
        {**base, "u_grid": [0.2, 0.1]},
        {**base, "u_grid": [-0.2, 0.0, 0.2]},
        {**base, "t_values": [0.0]},
        {**base, "tolerances": {"mystery": 1.0}},
        {**base, "families": ["unknown"]},
    ):
        with pytest.raises(ConfigError):
            ModelService.build_config(broken)

    path = tmp_path / "run.toml"
    path.write_text('t_values = [1.0]\nu_grid = [0.1]\nsamples = 50\n', encoding="utf-8")
    assert ModelService.read_config(path)["samples"] == 50
    with pytest.raises(ConfigError):
        ModelService.read_config(tmp_path / "missing.toml")


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(1.0 / 3.0)) == 1.0 / 3.0
    assert format_value(float("inf")) == "inf"
    assert format_value(float("-inf")) == "-inf"
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(7) == "7"


def test_tables_round_trip(tmp_path):
    path = tmp_path / "out" / "table.csv"
    rows = [{"u": 0.1, "flag": True}, {"u": float("inf"), "flag": False}]
    ResultsService.write_table(path, ["u", "flag"], rows)
    text = path.read_text(encoding="utf-8")
    assert text.startswith("# generated ")
    assert ResultsService.read_table(path) == [
        {"u": "0.10000000000000001", "flag": "true"},
        {"u": "inf", "flag": "false"},
    ]

    plain = tmp_path / "plain.csv"
    ResultsService.start_table(plain, ["u"], timestamp=False)
    ResultsService.append_row(plain, ["u"], {"u": 0.5})
    assert plain.read_text(encoding="utf-8").splitlines() == ["u", "0.5"]


def test_json_reports_write_infinity(tmp_path):
    report = SpectrumReport(
        states=["a"], eigenvalues=[0.0], gap=float("inf"), sigma_hat_sq=0.0, var_pi=0.0, pi=[1.0], reversible=True
    )
    path = ResultsService.write_json(tmp_path / "report.json", report)
    assert "Infinity" in path.read_text(encoding="utf-8")
