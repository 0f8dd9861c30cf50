"""Step estimate and Bernstein smoothing on truncated-exponential data.

Reports L1 distances to the true density for a few basis degrees.
"""
import argparse

from scipy import integrate

from srdensity.covariance import CovarianceSpec
from srdensity.datasets import gen_data, trunc_exp_pdf
from srdensity.model import SimpleRandomDensity, evaluate_density, posterior
from srdensity.partition import count_statistic, uniform_partition
from srdensity.sampler import ChainConfig, posterior_mean, rwm_sample
from srdensity.smoothing import evaluate_mixture, smooth_estimate


def l1(f):
    return integrate.quad(lambda x: abs(f(x) - trunc_exp_pdf(x)), 0, 1, limit=500)[0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--k", type=int, default=9)
    ap.add_argument("--rho", type=float, default=0.86)
    ap.add_argument("--degrees", type=int, nargs="+", default=[10, 20, 30, 60])
    ap.add_argument("--seed", type=int, default=10)
    args = ap.parse_args()

    data = gen_data("trunc-exp", args.n, seed=args.seed)
    p = uniform_partition(0.0, 1.0, args.k)
    prior = SimpleRandomDensity.from_kernel(p, CovarianceSpec(args.rho, 2 * args.k ** 2))
    chain = rwm_sample(posterior(prior, count_statistic(p, data)), ChainConfig(seed=args.seed))
    h_hat = posterior_mean(chain)
    print(f"step estimate      L1={l1(lambda x: evaluate_density(p, h_hat, x)):.4f}")
    for N in args.degrees:
        mix = smooth_estimate(p, h_hat, N)
        print(f"smooth, N={N:<4d}     L1={l1(lambda x: evaluate_mixture(mix, x)):.4f}")


if __name__ == "__main__":
    main()
