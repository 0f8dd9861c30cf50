"""Prior band width on a 100-cell partition for several dispersion values rho."""
import argparse

from srdensity.cli import ThetaPrior
from srdensity.covariance import CovarianceSpec
from srdensity.model import SimpleRandomDensity
from srdensity.partition import uniform_partition
from srdensity.sampler import ChainConfig, credible_band, posterior_mean, rwm_sample


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rhos", type=float, nargs="+", default=[0.01, 0.05, 0.2, 1.0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    p = uniform_partition(0.0, 1.0, 100)
    theta = ThetaPrior(2.0, 0.001, offset=20_000.0).draw(args.seed)
    for rho in args.rhos:
        model = SimpleRandomDensity.from_kernel(p, CovarianceSpec(rho, theta), m=1.0)
        chain = rwm_sample(model, ChainConfig(seed=args.seed))
        band = credible_band(chain, posterior_mean(chain), 0.95)
        print(f"rho={rho:<6g} epsilon={band.epsilon:.4f}  acceptance={chain.acceptance_rate:.3f}")


if __name__ == "__main__":
    main()
