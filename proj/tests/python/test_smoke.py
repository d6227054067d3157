"""Smoke tests for the python module against the C++ core."""

import numpy as np
import pytest

import snreg


def make_dataset(n=120, seed=0):
    rng = np.random.default_rng(seed)
    x = np.column_stack([np.ones(n), rng.standard_normal(n)])
    y = 0.5 + 1.5 * x[:, 1] + rng.standard_normal(n)
    return snreg.Dataset(y, x, ["const", "x"])


def test_tick_loss_and_psi():
    assert snreg.tick_loss(0.0, 0.5) == 0.0
    assert snreg.tick_loss(-1.0, 0.25) == pytest.approx(0.75)
    assert snreg.psi(0.0, 0.5) == pytest.approx(-0.5)
    assert snreg.psi(3.0, 0.9) == pytest.approx(0.9)


def test_median_fit():
    data = snreg.Dataset(
        np.array([1.0, 2.0, 3.0]), np.ones((3, 1)), ["const"]
    )
    fit = snreg.fit_qr(data, 0.5)
    assert fit.alpha_hat[0] == pytest.approx(2.0, abs=1e-6)
    assert fit.objective == pytest.approx(1.0, abs=1e-8)


def test_path_ends_in_full_sample_fit():
    data = make_dataset()
    path = snreg.expanding_qr_path(data, 0.5, 0.2)
    fit = snreg.fit_qr(data, 0.5)
    assert np.array_equal(path.full_sample(), fit.alpha_hat)
    assert path.j_start == 24
    assert len(path.coefficients) == data.n - path.j_start + 1


def test_es_fit_subsample_mean():
    y = np.array([1.0, 2.0, 3.0, 4.0])
    data = snreg.Dataset(y, np.ones((4, 1)), ["const"])
    fit = snreg.fit_es(data, 0.5, np.array([2.5]), snreg.TailSide.upper)
    assert fit.beta_hat[0] == pytest.approx(3.5)
    assert fit.n_exceed == 2


def test_sn_test_and_ci_duality(tmp_path):
    data = make_dataset(n=150, seed=3)
    path = snreg.expanding_qr_path(data, 0.5, 0.2)
    table = snreg.critical_value_table(
        ell=1, epsilon=0.2, grid_steps=200, replications=2000, seed=5,
        cache_dir=str(tmp_path),
    )
    result = snreg.sn_test(
        path, snreg.Contrast.coefficient(1, 2, 1.5), 0.05, table
    )
    assert result.t_n >= 0.0
    assert result.reject == (result.t_n > result.critical_value)
    lo, hi = snreg.sn_confidence_interval(path, 1, 0.05, table)
    assert lo < path.full_sample()[1] < hi
    inside = lo <= 1.5 <= hi
    assert result.reject == (not inside)


def test_simulated_limit_is_deterministic():
    a = snreg.simulate_w_samples(1, 0.1, 200, 2000, 11, 1)
    b = snreg.simulate_w_samples(1, 0.1, 200, 2000, 11, 2)
    assert a == b
    assert min(a) >= 0.0


def test_dgp_and_true_coefficients():
    cfg = snreg.DgpConfig(n=200, rho=0.5)
    data = snreg.generate(cfg, 42)
    again = snreg.generate(cfg, 42)
    assert np.array_equal(data.y, again.y)
    alpha0, beta0 = snreg.true_coefficients(cfg, 0.9)
    assert alpha0[1] == pytest.approx(1.0 + 0.5 * snreg.normal_quantile(0.9))
    assert beta0[1] == pytest.approx(1.0 + 0.5 * snreg.normal_es_upper(0.9))
    assert snreg.null_hypothesis_value(
        cfg, 0.9, 1.0, snreg.TargetKind.quantile
    ) == pytest.approx(alpha0[1])


def test_dq_test_runs():
    cfg = snreg.DgpConfig(n=400, rho=0.9)
    data = snreg.generate(cfg, 7)
    fit = snreg.fit_qr(data, 0.5)
    hits = snreg.compute_hits(data, 0.5, fit.alpha_hat)
    result = snreg.dq_test(hits, 10)
    assert result.df == 11
    assert 0.0 <= result.p_value <= 1.0


def test_baseline_t_test():
    data = make_dataset(n=300, seed=9)
    fit = snreg.fit_qr(data, 0.5)
    res = snreg.baseline_t_test(data, 0.5, 1, fit.alpha_hat[1])
    assert res.statistic == pytest.approx(0.0)
    assert not res.reject


def test_csv_round_trip(tmp_path):
    data = make_dataset(n=40, seed=1)
    path = str(tmp_path / "data.csv")
    snreg.write_csv(path, data, "resp")
    back = snreg.load_csv(path, "resp", ["const", "x"])
    assert np.array_equal(back.y, data.y)
    assert np.array_equal(back.x, data.x)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        snreg.load_csv("/nonexistent.csv", "y", ["x"])
    data = make_dataset(n=30)
    with pytest.raises(ValueError):
        snreg.fit_qr(data, 1.5)
