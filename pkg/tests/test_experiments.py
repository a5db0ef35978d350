import pytest

from ilab import config
from ilab.config_validator import ExperimentConfig, get_validated_config
from ilab.errors import SolverConvergenceError, UnknownExperimentError
from ilab.experiments import (
    EXPERIMENTS, WEAK_HILBERT_BOUND, Experiment, list_experiments, run_experiment,
)
from ilab.reports import STATUS_FAILED_CERTIFICATION, STATUS_PASS


def test_registry_matches_configured_experiments():
    assert set(EXPERIMENTS) == set(config.EXPERIMENT_DEFAULTS)


def test_catalog_filter():
    names = [name for name, _ in list_experiments("lorentz")]
    assert "lorentz-decomposition" in names
    assert "lp-family" not in names
    assert len(list_experiments()) == len(EXPERIMENTS)
    assert list_experiments("zzz") == []


def test_weak_hilbert_bound_value():
    assert 0.74 < WEAK_HILBERT_BOUND < 0.76


@pytest.mark.parametrize("overrides", [
    {"space": "Lp", "p": 2.0},
    {"space": "WeightedLp", "p": 3.0},
    {"space": "Lorentz", "p": 2.0, "q": 4.0},
    {"space": "Lorentz", "p": 4.0, "q": 2.0},
])
def test_aparam_table_passes(overrides):
    report = run_experiment(get_validated_config(experiment="aparam-table", overrides=overrides))
    assert report.status == STATUS_PASS
    rows = report.tables["aparam"]
    assert [r["n"] for r in rows] == list(range(1, 9))


def test_aparam_table_on_tsirelson2():
    cfg = get_validated_config(experiment="aparam-table", overrides={"space": "Tsirelson2", "n_max": 8})
    report = run_experiment(cfg)
    assert [r["n"] for r in report.tables["aparam"]] == [2, 4, 8]
    assert report.results["fitted_exponent"].provenance == "search"
    assert report.status == STATUS_PASS


def test_scale_predicates_passes():
    report = run_experiment(get_validated_config(experiment="scale-predicates"))
    assert report.status == STATUS_PASS
    assert {r["couple"] for r in report.tables["predicates"]} == {
        "l1-linf", "weighted", "lorentz-q", "lorentz-dual",
    }


def test_fragmented_kp_passes_on_small_profile():
    cfg = get_validated_config(experiment="fragmented-kp", overrides={"blocks": 4, "samples": 64})
    report = run_experiment(cfg)
    assert report.status == STATUS_PASS
    assert [r["size"] for r in report.tables["gaps"]] == [2, 4, 8, 16]
    assert report.results["verdict"].value == "evidencia-no-singular"


def test_amalgam_with_identical_couple_is_exact():
    cfg = get_validated_config(experiment="amalgam-equality",
                               overrides={"identical": True, "solver_samples": 8})
    report = run_experiment(cfg)
    assert report.status == STATUS_PASS
    assert report.results["calderon_max_rel_err"].value == pytest.approx(0.0, abs=1e-12)
    assert report.results["derivation_gap"].value == pytest.approx(0.0, abs=1e-12)


def test_report_body_is_reproducible():
    cfg = get_validated_config(experiment="aparam-table", overrides={"seed": 5})
    assert run_experiment(cfg).body() == run_experiment(cfg).body()


def test_solver_failure_marks_report(monkeypatch):
    def failing(cfg, out):
        out.record("before", 1.0, "closed-form")
        raise SolverConvergenceError("sin convergencia", sweeps=3, residual=0.5, eps=1e-6)

    monkeypatch.setitem(EXPERIMENTS, "failing", Experiment("failing", "falla", failing))
    report = run_experiment(ExperimentConfig("failing", {"seed": 0}))
    assert report.status == STATUS_FAILED_CERTIFICATION
    assert report.exit_code == 3
    assert not report.passed
    assert "before" in report.results
    assert report.error == "sin convergencia"


def test_unregistered_experiment():
    with pytest.raises(UnknownExperimentError):
        run_experiment(ExperimentConfig("missing", {"seed": 0}))


@pytest.mark.parametrize("name,overrides", [
    ("lp-family", {"dim": 6, "solver_samples": 4}),
    ("weighted-trivial", {"dim": 6, "weights_count": 2, "solver_samples": 4}),
    ("reiteration", {"dim": 6, "solver_samples": 4}),
    ("amalgam-equality", {"blocks": 2, "block_width": 2, "solver_samples": 4}),
])
def test_solver_experiments_pass_on_small_configurations(name, overrides):
    report = run_experiment(get_validated_config(experiment=name, overrides=overrides))
    assert report.status == STATUS_PASS, report.error
    assert all(r.passed for r in report.results.values() if r.passed is not None)


def test_weak_hilbert_calderon_norm_and_sandwich():
    cfg = get_validated_config(experiment="weak-hilbert", overrides={"blocks": 4, "solver_samples": 6})
    report = run_experiment(cfg)
    assert report.status == STATUS_PASS, report.error
    assert report.results["calderon_max_rel_err"].passed
    assert report.results["calderon_max_rel_err"].value <= 1e-3
    assert report.results["sandwich_ratio"].passed
    assert [r["size"] for r in report.tables["blocks"]] == [1, 2, 4, 8]


def test_lorentz_decomposition_covers_both_coefficients():
    cfg = get_validated_config(experiment="lorentz-decomposition", overrides={"dim": 6, "solver_samples": 4})
    report = run_experiment(cfg)
    assert report.status == STATUS_PASS, report.error
    general = next(r for r in report.tables["cases"] if r["case"] == "general")
    assert general["kalton_peck_coefficient"] == pytest.approx(-0.4)
    assert general["kappa_coefficient"] == pytest.approx(-0.4)
    assert report.results["general_derivation_gap"].passed
    assert report.results["general_kappa_contrast"].passed
    assert report.results["kappa_e1"].passed


def test_scale_predicates_report_search_provenance():
    report = run_experiment(get_validated_config(experiment="scale-predicates", overrides={"n_max": 8}))
    rows = {r["couple"]: r for r in report.tables["predicates"]}
    assert rows["l1-linf"]["provenance"] == "search/search/search"
    assert rows["lorentz-dual"]["provenance"] == "search/analytic/search"
    assert report.results["l1-linf_predicates"].provenance == "search"
