import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import k2_target_density, ks_distance, normalized_cdf_on_grid
from srdensity.covariance import CovMatrix, LognormalParams
from srdensity.errors import InvalidArgument
from srdensity.model import SimpleRandomDensity
from srdensity.partition import uniform_partition
from srdensity.sampler import (
    ChainConfig, ChainOutput, cdf_and_quantiles, credible_band, posterior_mean, rwm_sample)


def iid_model(k, m=0.0, a=0.0, b=1.0):
    return SimpleRandomDensity(uniform_partition(a, b, k),
                               LognormalParams(np.full(k, m), CovMatrix.from_matrix(np.eye(k))))


def chain_of(draws):
    draws = np.asarray(draws, dtype=float)
    return ChainOutput(draws, 1.0, 0.1, 0)


def test_config_validation():
    with pytest.raises(InvalidArgument):
        ChainConfig(iterations=10, burn_in=10)
    with pytest.raises(InvalidArgument):
        ChainConfig(thin=0)
    with pytest.raises(InvalidArgument):
        ChainConfig(target_acceptance=1.0)
    assert ChainConfig(iterations=105, burn_in=5, thin=10).n_draws == 10
    assert ChainConfig(iterations=106, burn_in=5, thin=10).n_draws == 11


def test_single_cell_chain_is_constant():
    out = rwm_sample(iid_model(1, a=0, b=2), ChainConfig(iterations=50, burn_in=10, thin=1))
    assert np.all(out.draws == 0.5)
    assert out.acceptance_rate == 1.0
    assert posterior_mean(out).tolist() == [0.5]


def test_determinism():
    model = iid_model(4)
    cfg = ChainConfig(iterations=3000, burn_in=500, thin=3, seed=42)
    a, b = rwm_sample(model, cfg), rwm_sample(model, cfg)
    assert np.array_equal(a.draws, b.draws)
    assert a.acceptance_rate == b.acceptance_rate
    assert a.final_step_scale == b.final_step_scale
    c = rwm_sample(model, ChainConfig(iterations=3000, burn_in=500, thin=3, seed=43))
    assert not np.array_equal(a.draws, c.draws)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 12), st.floats(0.5, 3.0), st.integers(0, 2**32 - 1))
def test_draws_stay_on_constraint(k, width, seed):
    model = iid_model(k, m=float(np.random.default_rng(seed).normal()), a=-1.0, b=-1.0 + width)
    out = rwm_sample(model, ChainConfig(iterations=2000, burn_in=200, thin=1, seed=seed))
    d = model.partition.widths
    assert np.all(np.abs(out.draws @ d - 1.0) < 1e-10)
    assert np.all(out.draws > 0)
    assert out.n_accepted == round(out.acceptance_rate * out.n_proposed)


def test_adaptation_moves_toward_target():
    model = iid_model(6)
    out = rwm_sample(model, ChainConfig(iterations=30_000, burn_in=10_000, thin=1, seed=3,
                                        step_scale=5.0))
    assert out.final_step_scale < 5.0
    assert 0.1 < out.acceptance_rate < 0.45


def test_init_is_validated():
    model = iid_model(3)
    with pytest.raises(InvalidArgument):
        rwm_sample(model, ChainConfig(iterations=10, burn_in=0), init=[1.0, 1.0, 2.0])
    out = rwm_sample(model, ChainConfig(iterations=10, burn_in=0, thin=1), init=[0.5, 1.0, 1.5])
    assert out.draws.shape == (10, 3)


def test_k2_chain_matches_quadrature():
    model = iid_model(2)
    out = rwm_sample(model, ChainConfig(iterations=120_000, burn_in=20_000, thin=1, seed=11,
                                        step_scale=0.5))
    f, upper = k2_target_density(np.zeros(2), np.eye(2), 0.5, 0.5)
    xs, cdf, _ = normalized_cdf_on_grid(f, upper)
    assert len(out) >= 100_000
    assert ks_distance(out.draws[:, 0], xs, cdf) < 0.05


def test_posterior_mean_examples():
    h = [0.5, 1.5]
    assert posterior_mean(chain_of([h, h, h])).tolist() == h
    assert posterior_mean(chain_of([[0.5, 1.5], [1.5, 0.5]])).tolist() == [1.0, 1.0]
    with pytest.raises(InvalidArgument):
        posterior_mean(chain_of(np.empty((0, 2))))


def test_posterior_mean_on_constraint():
    model = iid_model(5, m=0.3)
    out = rwm_sample(model, ChainConfig(iterations=5000, burn_in=1000, thin=2, seed=1))
    assert abs(posterior_mean(out) @ model.partition.widths - 1.0) < 1e-10


def test_credible_band_order_statistic():
    center = np.zeros(2)
    draws = [[0.1, 0.0], [0.0, -0.2], [0.3, 0.1], [0.0, 0.4]]
    band = credible_band(chain_of(draws), center, 0.5)
    assert band.epsilon == pytest.approx(0.2)
    assert np.allclose(band.lower, -0.2) and np.allclose(band.upper, 0.2)


def test_credible_band_constant_chain():
    h = [0.8, 1.2]
    for gamma in (0.1, 0.5, 0.95):
        assert credible_band(chain_of([h] * 5), h, gamma).epsilon == 0.0


@pytest.mark.parametrize("gamma", [0.0, 1.0, -0.5, 1.5])
def test_credible_band_rejects_gamma(gamma):
    with pytest.raises(InvalidArgument):
        credible_band(chain_of([[1.0, 1.0]]), [1.0, 1.0], gamma)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 400), st.floats(0.01, 0.99), st.integers(0, 2**32 - 1))
def test_band_coverage_bounds(n, gamma, seed):
    rng = np.random.default_rng(seed)
    chain = chain_of(rng.normal(size=(n, 3)))
    center = chain.draws.mean(axis=0)
    band = credible_band(chain, center, gamma)
    cov = band.coverage(chain)
    assert gamma <= cov + 1e-12
    assert cov <= gamma + 1.0 / n + 1e-12
    # no smaller realized radius reaches gamma
    s = np.sort(np.max(np.abs(chain.draws - center), axis=1))
    smaller = s[s < band.epsilon]
    if smaller.size:
        assert np.mean(s <= smaller[-1]) < gamma


def test_quantiles_uniform():
    p = uniform_partition(0, 1, 4)
    cdf, q = cdf_and_quantiles(p, np.ones(4), [0.25, 0.5])
    assert np.allclose(q, [0.25, 0.5])
    assert cdf(0.0) == 0.0 and cdf(1.0) == 1.0
    assert cdf(0.3) == pytest.approx(0.3)


def test_quantiles_flat_segment():
    p = uniform_partition(0, 1, 2)
    cdf, q = cdf_and_quantiles(p, [2.0, 0.0], [1 - 1e-3, 1 - 1e-9, 1.0])
    assert q[0] == pytest.approx(0.5 - 0.5e-3)
    assert q[1] == pytest.approx(0.5, abs=1e-8)
    # leftmost point of the flat segment
    assert q[2] == 0.5
    assert cdf(0.75) == 1.0


def test_quantiles_reject_invalid_heights():
    with pytest.raises(InvalidArgument):
        cdf_and_quantiles(uniform_partition(0, 1, 2), [1.0, 2.0], [0.5])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_quantile_inverts_cdf(k, seed):
    rng = np.random.default_rng(seed)
    p = uniform_partition(-2, 3, k)
    h = rng.dirichlet(np.ones(k)) / p.widths
    probs = rng.uniform(0.001, 0.999, size=30)
    cdf, q = cdf_and_quantiles(p, h, probs)
    assert np.allclose(cdf(q), probs, atol=1e-12)
    assert np.all(np.diff(cdf(np.linspace(-2, 3, 200))) >= -1e-15)
