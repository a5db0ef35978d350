import pytest

from ilab import config
from ilab.config_validator import (
    build_config, get_validated_config, parse_overrides, validate_config,
)
from ilab.errors import ConfigError, UnknownExperimentError
from ilab.spaces import INF


@pytest.mark.parametrize("name", sorted(config.EXPERIMENT_DEFAULTS))
def test_defaults_are_valid(name):
    cfg = get_validated_config(experiment=name)
    assert cfg.experiment == name
    assert cfg.samples >= 1
    assert cfg.eps > 0


def test_theta_out_of_range_names_field_and_interval():
    with pytest.raises(ConfigError) as excinfo:
        build_config(experiment="lp-family", overrides={"theta": 1.2})
    assert str(excinfo.value) == "theta=1.2 fuera de rango (0, 1)"
    assert excinfo.value.field == "theta"


def test_negative_weight_is_rejected():
    with pytest.raises(ConfigError, match=r"weights\[1\]=-1.0 debe ser > 0"):
        build_config(experiment="weighted-trivial", overrides={"dim": 2, "weights": [1.0, -1.0]})


def test_weights_must_match_dimension():
    with pytest.raises(ConfigError, match="weights tiene 3 entradas"):
        build_config(experiment="weighted-trivial", overrides={"dim": 2, "weights": [1.0, 2.0, 3.0]})
    cfg = build_config(experiment="weighted-trivial", overrides={"dim": 2, "weights": [1, 2]})
    assert cfg["weights"] == [1.0, 2.0]


def test_yaml_syntax_error_reports_position():
    with pytest.raises(ConfigError) as excinfo:
        build_config("experiment: lp-family\ntheta: [0.5\n")
    assert excinfo.value.line is not None
    assert excinfo.value.column is not None
    assert "línea" in str(excinfo.value)


def test_config_file_must_be_a_mapping():
    with pytest.raises(ConfigError, match="mapeo"):
        build_config("- 1\n- 2\n", experiment="lp-family")


def test_unknown_experiment_and_field():
    with pytest.raises(UnknownExperimentError):
        build_config(experiment="no-such-experiment")
    with pytest.raises(ConfigError, match="Campo desconocido 'gamma'"):
        build_config(experiment="lp-family", overrides={"gamma": 1})
    with pytest.raises(ConfigError, match="Falta el nombre"):
        build_config("theta: 0.5\n")


def test_experiment_name_from_file_and_override_precedence():
    cfg = build_config("experiment: reiteration\neta: 0.25\ntheta0: 0.1\n", overrides={"theta0": 0.2})
    assert cfg.experiment == "reiteration"
    assert cfg["eta"] == 0.25
    assert cfg["theta0"] == 0.2


def test_parse_overrides():
    parsed = parse_overrides(["theta=0.3", "identical=true", "p1=inf", "space=Lorentz"])
    assert parsed == {"theta": 0.3, "identical": True, "p1": "inf", "space": "Lorentz"}
    with pytest.raises(ConfigError, match="key=value"):
        parse_overrides(["theta"])
    cfg = build_config(experiment="lp-family", overrides=parse_overrides(["p1=inf"]))
    assert cfg["p1"] == INF


@pytest.mark.parametrize("overrides,message", [
    ({"dim": 3.5}, "dim debe ser entero"),
    ({"dim": 0}, "dim=0 fuera de rango [1, 4096]"),
    ({"p0": 0.5}, "p0=0.5 fuera de rango [1, ∞]"),
    ({"p0": "abc"}, "p0 debe ser numérico"),
    ({"tol_norm": 0}, "tol_norm=0.0 fuera de rango (0, ∞]"),
])
def test_field_validation_messages(overrides, message):
    with pytest.raises(ConfigError) as excinfo:
        build_config(experiment="lp-family", overrides=overrides)
    assert str(excinfo.value) == message


def test_bool_and_choice_fields():
    with pytest.raises(ConfigError, match="identical debe ser boolean"):
        build_config(experiment="amalgam-equality", overrides={"identical": 1})
    with pytest.raises(ConfigError, match="space debe ser uno de"):
        build_config(experiment="aparam-table", overrides={"space": "Orlicz"})


def test_cross_checks():
    with pytest.raises(ConfigError, match="distinto de p0"):
        build_config(experiment="lorentz-decomposition", overrides={"p1": 2.0})
    with pytest.raises(ConfigError, match="distinto de theta0"):
        build_config(experiment="reiteration", overrides={"theta1": 0.25})
    with pytest.raises(ConfigError, match="Lorentz"):
        build_config(experiment="aparam-table", overrides={"space": "Lorentz", "p": "inf"})


def test_validate_config_returns_tuple():
    ok, cfg, msg = validate_config(experiment="lp-family", overrides={"theta": 2})
    assert not ok
    assert cfg is None
    assert "theta" in msg
    ok, cfg, msg = validate_config(experiment="lp-family")
    assert ok and msg == ""


def test_get_validated_config_prefixes_message():
    with pytest.raises(ConfigError, match="^Configuración inválida: theta") as excinfo:
        get_validated_config(experiment="lp-family", overrides={"theta": 0})
    assert excinfo.value.field == "theta"


def test_as_dict_includes_experiment_name():
    cfg = get_validated_config(experiment="fragmented-kp", overrides={"seed": 7})
    assert cfg.as_dict()["experiment"] == "fragmented-kp"
    assert cfg.seed == 7
