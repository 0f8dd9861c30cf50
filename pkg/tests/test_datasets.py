import math

import numpy as np
import pytest
from scipy import integrate, stats

from srdensity.datasets import REFERENCES, gen_data, get_reference, trunc_exp_cdf, trunc_exp_pdf, trunc_exp_ppf
from srdensity.errors import InvalidArgument


@pytest.mark.parametrize("name", sorted(REFERENCES))
def test_generators_deterministic_and_in_support(name):
    a = gen_data(name, 500, seed=3)
    assert np.array_equal(a, gen_data(name, 500, seed=3))
    assert a.shape == (500,)
    assert np.all((a >= 0) & (a <= 1))


@pytest.mark.parametrize("name", sorted(REFERENCES))
def test_reference_is_a_distribution(name):
    ref = get_reference(name)
    total = integrate.quad(ref.pdf, 0, 1, limit=200, points=[0.5])[0]
    assert total == pytest.approx(1.0, abs=1e-7)
    q = ref.quantiles([0.1, 0.5, 0.9])
    assert np.allclose(ref.cdf(q), [0.1, 0.5, 0.9], atol=1e-9)
    x = gen_data(name, 20_000, seed=0)
    assert stats.kstest(x, ref.cdf).pvalue > 1e-3


def test_unknown_generator():
    with pytest.raises(InvalidArgument):
        gen_data("cauchy", 10)


def test_trunc_exp_closed_forms():
    assert trunc_exp_pdf(0.0) == pytest.approx(2 * math.e ** 2 / (math.e ** 2 - 1))
    assert trunc_exp_cdf(0.0) == 0.0 and trunc_exp_cdf(1.0) == pytest.approx(1.0)
    u = np.linspace(0, 1, 11)
    assert np.allclose(trunc_exp_cdf(trunc_exp_ppf(u)), u, atol=1e-14)


def test_trunc_exp_mean():
    mean = integrate.quad(lambda x: x * trunc_exp_pdf(x), 0, 1)[0]
    var = integrate.quad(lambda x: (x - mean) ** 2 * trunc_exp_pdf(x), 0, 1)[0]
    x = gen_data("trunc-exp", 1_000_000, seed=4)
    assert abs(x.mean() - mean) < 3 * math.sqrt(var / x.size)


def test_triangular_cdf_at_half():
    x = gen_data("triangular", 1_000_000, seed=5)
    assert abs(np.mean(x <= 0.5) - 0.5) < 0.01
