import math

import numpy as np
import pytest

from condmt.sim_harness import (
    MethodSpec,
    Rejector,
    ScenarioConfig,
    _correlated_noise,
    equicorr_fwer_experiment,
    generate_statistics,
    preset_mu,
    run_power_study,
    run_qualint_power_study,
    run_rejection_count_study,
)


def test_preset_mu_shapes():
    assert preset_mu("all_null").shape == (100,)
    assert preset_mu("conservative").shape == (1000,)
    assert preset_mu("gradual_low")[0] == pytest.approx(-1.5)
    assert preset_mu("gradual_high")[-1] == pytest.approx(4.0)
    with pytest.raises(ValueError):
        preset_mu("nope")
    with pytest.raises(ValueError):
        preset_mu("all_null", n=50)


def test_method_spec_labels_and_validation():
    assert MethodSpec("fisher", "conditional", 0.5).label == \
        "fisher/conditional(tau=0.5)"
    assert MethodSpec("fisher", "adaptive").label == "fisher/adaptive"
    with pytest.raises(ValueError):
        MethodSpec("fisher", "weird")
    with pytest.raises(ValueError):
        MethodSpec("fisher", "conditional", 0.0)


def test_scenario_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(mu=[], reps=10)
    with pytest.raises(ValueError):
        ScenarioConfig(mu=[0.0] * 10, reps=0)
    with pytest.raises(ValueError):
        ScenarioConfig(mu=[0.0] * 10, reps=10, rho=-0.5)
    with pytest.raises(ValueError):
        ScenarioConfig(mu=[0.0] * 10, reps=10, level=0.0)


def test_generate_statistics_deterministic():
    cfg = ScenarioConfig(mu="all_null", reps=5, seed=123)
    a = generate_statistics(cfg, 3)
    b = generate_statistics(cfg, 3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, generate_statistics(cfg, 4))
    assert np.all((a >= 0) & (a <= 1))


def test_correlated_noise_moments():
    rng = np.random.default_rng(0)
    for rho in (-1 / 99, 0.0, 0.3, 0.8):
        draws = np.array([_correlated_noise(rng, 100, rho)
                          for _ in range(4000)])
        var = draws.var(axis=0).mean()
        cov = np.mean(draws[:, 0] * draws[:, 1])
        assert var == pytest.approx(1.0, abs=0.06)
        assert cov == pytest.approx(rho, abs=0.06)


def test_rejector_matches_library_tests():
    from condmt.global_tests import fisher, truncated_product
    rej = Rejector(level=0.05)
    rng = np.random.default_rng(1)
    for _ in range(100):
        sel = rng.random(rng.integers(1, 20))
        assert rej.reject("fisher", sel) == \
            (fisher(sel).p_combined <= 0.05)
        assert rej.reject("truncated_product", sel) == \
            (truncated_product(sel).p_combined <= 0.05)
    assert not rej.reject("fisher", np.array([]))
    with pytest.raises(ValueError):
        rej.reject("nope", sel)


def test_rejector_hc_matches_mc_pvalue():
    from condmt.global_tests import hc_plus, higher_criticism
    rej = Rejector(level=0.05)
    rng = np.random.default_rng(2)
    for _ in range(40):
        sel = rng.random(10)
        assert rej.reject("higher_criticism", sel) == \
            (higher_criticism(sel, seed=0).p_combined <= 0.05)
        assert rej.reject("hc_plus", sel) == \
            (hc_plus(sel, seed=0).p_combined <= 0.05)


def test_power_study_worker_invariance():
    cfg = ScenarioConfig(mu="1_strong_99_conservative", reps=60, seed=5,
                         name="s3",
                         methods=(MethodSpec("bonferroni", "conditional", 0.5),
                                  MethodSpec("fisher", "adaptive")))
    t1 = run_power_study(cfg, workers=1)
    t3 = run_power_study(cfg, workers=3)
    assert t1.to_json() == t3.to_json()


def test_power_study_requires_methods():
    with pytest.raises(ValueError):
        run_power_study(ScenarioConfig(mu="all_null", reps=5))


def test_power_table_render_and_lookup():
    cfg = ScenarioConfig(mu="all_null", reps=20, seed=1, name="null",
                         methods=(MethodSpec("bonferroni", "unconditional"),))
    table = run_power_study(cfg)
    row = table.lookup("null", "bonferroni/unconditional")
    assert 0.0 <= row.estimate <= 1.0
    assert "bonferroni/unconditional" in table.to_text()
    with pytest.raises(KeyError):
        table.lookup("null", "missing")


def test_conditional_beats_classical_on_conservative_setting():
    cfg = ScenarioConfig(mu="1_strong_99_conservative", reps=300, seed=9,
                         name="s3",
                         methods=(MethodSpec("fisher", "unconditional"),
                                  MethodSpec("fisher", "adaptive")))
    t = run_power_study(cfg)
    uncond = t.lookup("s3", "fisher/unconditional").estimate
    adaptive = t.lookup("s3", "fisher/adaptive").estimate
    assert adaptive > uncond + 0.5  # ~0.0 vs ~0.85 in this configuration


def test_qualint_power_study_runs_all_method_kinds():
    cfg = ScenarioConfig(mu="50_positive_50_negative", reps=40, seed=2,
                         name="q",
                         methods=(MethodSpec("ibga"),
                                  MethodSpec("gail_simon"),
                                  MethodSpec("fisher", "conditional", 0.5)))
    t = run_qualint_power_study(cfg, workers=2)
    assert len(t.rows) == 3
    assert all(0.0 <= r.estimate <= 1.0 for r in t.rows)


def test_rejection_count_study_summary_shape():
    cfg = ScenarioConfig(mu="no_conservative", reps=30, seed=3)
    out = run_rejection_count_study(cfg, n_signals=20, taus=(1.0, "adaptive"))
    assert set(out) == {"1.0", "adaptive"}
    for summary in out.values():
        assert set(summary) == {"q1", "median", "mean", "q3"}
        assert summary["q1"] <= summary["median"] <= summary["q3"]
    with pytest.raises(ValueError):
        run_rejection_count_study(cfg, n_signals=5000)


def test_equicorr_experiment_reports_all_rhos():
    rates = equicorr_fwer_experiment([0.0, 0.5], n=50, reps=200, seed=4)
    assert set(rates) == {0.0, 0.5}
    for v in rates.values():
        assert 0.0 <= v <= 0.15
