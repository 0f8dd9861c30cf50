"""Credible-band width on the three-component beta mixture as the sample grows.

Usage: python3 scripts/concentration_mixture.py [--out results/concentration.csv]
"""
import argparse

import numpy as np

from srdensity import io
from srdensity.cli import ThetaPrior
from srdensity.covariance import CovarianceSpec
from srdensity.datasets import gen_data
from srdensity.model import SimpleRandomDensity, posterior
from srdensity.partition import count_statistic, uniform_partition
from srdensity.sampler import ChainConfig, credible_band, posterior_mean, rwm_sample


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[0, 100, 1000, 5000])
    ap.add_argument("--seed", type=int, default=12)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    sample = gen_data("beta-mixture-ex1", max(args.sizes), seed=args.seed)
    p = uniform_partition(0.0, 1.0, 100)
    theta = ThetaPrior(2.0, 0.001, offset=20_000.0).draw(args.seed)
    prior = SimpleRandomDensity.from_kernel(p, CovarianceSpec(0.05, theta), m=1.0)
    eps, acc = [], []
    for n in args.sizes:
        chain = rwm_sample(posterior(prior, count_statistic(p, sample[:n])), ChainConfig(seed=args.seed))
        band = credible_band(chain, posterior_mean(chain), 0.95)
        eps.append(band.epsilon)
        acc.append(chain.acceptance_rate)
        print(f"n={n:5d}  epsilon={band.epsilon:.4f}  acceptance={chain.acceptance_rate:.3f}")
    if args.out:
        io.write_table_csv(args.out, {"n": np.array(args.sizes, float), "epsilon": np.array(eps),
                                      "acceptance": np.array(acc)})


if __name__ == "__main__":
    main()
