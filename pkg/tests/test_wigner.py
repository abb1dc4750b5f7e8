import math

import numpy as np
import pytest

import oracles
from qtfock.errors import ValidationError
from qtfock.moments import t_catalan
from qtfock.wigner import (
    WignerConfig,
    monte_carlo,
    sample_process,
    theoretical_limit,
    trace_statistic,
    trial_seeds,
)


def offdiag(W):
    iu = np.triu_indices(W.shape[-1], 1)
    return W[..., iu[0], iu[1]]


def test_config_validation():
    for kwargs in [
        dict(N=1, rho=0.5, n=2),
        dict(N=10, rho=1.5, n=2),
        dict(N=10, rho=-0.1, n=2),
        dict(N=10, rho=0.5, n=0),
        dict(N=10, rho=0.5, n=2, trials=0),
        dict(N=10, rho=0.5, n=2, seed=-1),
        dict(N=10, rho=0.5, n=2, entries="cauchy"),
        dict(N=10, rho=0.5, n=2, normalization="cube"),
    ]:
        with pytest.raises(ValidationError):
            WignerConfig(**kwargs)


def test_samples_symmetric():
    W = sample_process(WignerConfig(N=30, rho=0.4, n=3, seed=5))
    assert W.shape == (3, 30, 30)
    assert np.array_equal(W, W.swapaxes(1, 2))


def test_rho_one_repeats_matrix():
    W = sample_process(WignerConfig(N=20, rho=1.0, n=4, seed=1))
    assert all(np.array_equal(W[0], W[k]) for k in range(4))
    R = sample_process(WignerConfig(N=20, rho=1.0, n=4, seed=1, entries="rademacher"))
    assert all(np.array_equal(R[0], R[k]) for k in range(4))


@pytest.mark.parametrize("entries", ["gaussian", "rademacher"])
@pytest.mark.parametrize("rho", [0.0, 0.6])
def test_entry_correlations(entries, rho):
    # one N = 400 sample has ~8e4 independent off-diagonal chains; use two for ~1.6e5 pairs
    xs, ys = [], []
    for seed in (11, 12):
        W = sample_process(WignerConfig(N=400, rho=rho, n=3, seed=seed, entries=entries))
        xs.append(offdiag(W[0]))
        ys.append(offdiag(W[2]))
    x, y = np.concatenate(xs), np.concatenate(ys)
    prod = x * y
    se = prod.std(ddof=1) / math.sqrt(prod.size)
    assert abs(prod.mean() - rho**2) < 4 * se
    assert abs(x.var() - 1) < 0.02 and abs(y.var() - 1) < 0.02
    if entries == "rademacher":
        assert set(np.unique(x)) == {-1.0, 1.0}


def test_trace_statistic_basics():
    I = np.eye(4)
    assert trace_statistic([I, I]) == pytest.approx(1 / 4)
    assert trace_statistic([I, I], normalization="linear") == pytest.approx(1 / 16)
    with pytest.raises(ValidationError):
        trace_statistic([np.eye(3), np.eye(4)])
    with pytest.raises(ValidationError):
        trace_statistic([])
    with pytest.raises(ValidationError):
        trace_statistic([I], normalization="other")


def test_second_moment_is_one():
    res = monte_carlo(WignerConfig(N=100, rho=1.0, n=2, trials=40, seed=3))
    assert abs(res.estimate.mean - 1.0) < 4 * res.estimate.std_error + 1e-12
    assert res.prediction == 1.0


def test_catalan_at_rho_one():
    res = monte_carlo(WignerConfig(N=400, rho=1.0, n=4, trials=30, seed=8))
    assert res.prediction == 2.0
    assert abs(res.z_score) < 4


def test_odd_products_vanish():
    res = monte_carlo(WignerConfig(N=100, rho=0.7, n=3, trials=60, seed=4))
    assert res.prediction == 0.0
    assert abs(res.z_score) < 4


def test_theoretical_limit_examples():
    assert theoretical_limit(0.3, 2) == pytest.approx(0.3)
    assert theoretical_limit(0.6, 4) == pytest.approx(0.36 * 1.36)
    assert [theoretical_limit(1.0, 2 * m) for m in range(1, 6)] == [1, 2, 5, 14, 42]
    assert theoretical_limit(0.5, 5) == 0.0
    with pytest.raises(ValidationError):
        theoretical_limit(0.5, 0)


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("rho", [0.0, 0.25, 0.6, 0.9, 1.0])
def test_limit_consistency_with_t_catalan(m, rho):
    assert theoretical_limit(rho, 2 * m) == pytest.approx(rho**m * float(t_catalan(m, rho * rho)), rel=1e-13, abs=1e-15)


def test_rho_zero_four_factors():
    res = monte_carlo(WignerConfig(N=100, rho=0.0, n=4, trials=60, seed=9))
    assert res.prediction == 0.0
    assert abs(res.z_score) < 4


def test_finite_size_mean_oracle():
    # exact mean at small N includes the rho^4 / N correction
    N, rho = 12, 0.8
    res = monte_carlo(WignerConfig(N=N, rho=rho, n=4, trials=4000, seed=21))
    exact = oracles.wigner_exact_mean_four(rho, N)
    assert abs(res.estimate.mean - exact) < 4 * res.estimate.std_error


def test_reproducible_and_worker_independent():
    cfg = WignerConfig(N=40, rho=0.5, n=4, trials=12, seed=123)
    a = monte_carlo(cfg)
    b = monte_carlo(cfg)
    c = monte_carlo(cfg, workers=4)
    assert np.array_equal(a.per_trial, b.per_trial) and np.array_equal(a.per_trial, c.per_trial)
    assert a.estimate == b.estimate == c.estimate
    d = monte_carlo(WignerConfig(N=40, rho=0.5, n=4, trials=12, seed=124))
    assert not np.array_equal(a.per_trial, d.per_trial)


def test_trial_seeds_are_distinct():
    states = {tuple(ss.generate_state(2)) for ss in trial_seeds(7, 50)}
    assert len(states) == 50


def test_error_shrinks_with_size():
    errs = []
    for N in (50, 100, 200, 400):
        res = monte_carlo(WignerConfig(N=N, rho=0.6, n=4, trials=N // 2, seed=N))
        errs.append((abs(res.estimate.mean - res.prediction), res.estimate.std_error))
    for (e1, s1), (e2, s2) in zip(errs, errs[1:]):
        assert e2 <= e1 + 3 * math.hypot(s1, s2)


def test_single_trial_has_zero_standard_error():
    res = monte_carlo(WignerConfig(N=10, rho=0.5, n=4, trials=1, seed=0))
    assert res.estimate.std_error == 0.0 and res.estimate.trials == 1
