"""Command-line interface.

Commands: gen-data, fit, eb, smooth, qq, simulate-prior. Outputs are JSON
summaries and CSV tables; exit codes are 0 (success), 2 (usage), 3 (data)
and 4 (numerical failure).
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import io
from .covariance import CovarianceSpec
from .datasets import REFERENCES, gen_data, get_reference
from .empirical_bayes import ESTIMATORS, EBGrid, default_theta_rule, eb_select
from .errors import InvalidArgument, SRDError
from .model import SimpleRandomDensity, evaluate_density, posterior
from .partition import Partition, count_statistic, uniform_partition
from .sampler import ChainConfig, cdf_and_quantiles, credible_band, posterior_mean, rwm_sample
from .smoothing import DEFAULT_DEGREE, MixtureDensity, evaluate_mixture, smooth_estimate

log = logging.getLogger("srdensity")

CURVE_POINTS = 512
QQ_PROBS = np.round(np.arange(1, 100) / 100.0, 2)


@dataclass
class ThetaPrior:
    """Random scale: theta = offset + Gamma(shape, rate or scale), drawn once per chain."""

    shape: float
    rate: float
    offset: float = 0.0
    parametrization: str = "rate"

    def draw(self, seed: int) -> float:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x7E7A,)))
        scale = 1.0 / self.rate if self.parametrization == "rate" else self.rate
        return self.offset + float(rng.gamma(self.shape, scale))


@dataclass
class RunConfig:
    support: tuple[float, float] = (0.0, 1.0)
    k: int | str = 10
    rho: float | str = 1.0
    theta: float | str = "rule"
    theta_prior: ThetaPrior | None = None
    m_fill: float = 1.0
    chain: ChainConfig = field(default_factory=ChainConfig)
    gamma: float = 0.95
    eb_grid: EBGrid | None = None
    smooth_N: int | None = None
    seed: int = 0
    input_path: str | None = None
    output_path: str | None = None

    def __post_init__(self):
        if (self.k == "eb" or self.rho == "eb") and self.eb_grid is None:
            raise InvalidArgument("k or rho set to 'eb' requires an EB grid")
        if not 0 < self.gamma < 1:
            raise InvalidArgument("gamma must lie in (0, 1)")

    def theta_for(self, k: int, rho: float) -> float:
        if self.theta_prior is not None:
            return self.theta_prior.draw(self.chain.seed)
        if self.theta == "rule":
            return default_theta_rule(k, rho, *self.support)
        return float(self.theta)


def _summarize(cfg: RunConfig, data: np.ndarray, k: int, rho: float, draws_csv: str | None = None,
               curve_csv: str | None = None, reference: str | None = None) -> dict:
    a, b = cfg.support
    p = uniform_partition(a, b, k)
    theta = cfg.theta_for(k, rho)
    prior = SimpleRandomDensity.from_kernel(p, CovarianceSpec(rho, theta), cfg.m_fill)
    counts = count_statistic(p, data)
    post = posterior(prior, counts)
    log.info("sampling k=%d rho=%g theta=%g n=%d", k, rho, theta, counts.n)
    chain = rwm_sample(post, cfg.chain)
    h_hat = posterior_mean(chain)
    band = credible_band(chain, h_hat, cfg.gamma)
    if draws_csv:
        io.write_draws_csv(draws_csv, chain.draws)
    if curve_csv:
        x = np.linspace(a, b, CURVE_POINTS)
        cols = {"x": x, "h_hat": evaluate_density(p, h_hat, x),
                "band_lower": evaluate_density(p, np.maximum(band.lower, 0.0), x),
                "band_upper": evaluate_density(p, band.upper, x)}
        if reference:
            cols["reference"] = get_reference(reference).pdf(x)
        io.write_table_csv(curve_csv, cols)
    return {
        "partition": p.to_dict(),
        "k": k, "rho": rho, "theta": theta, "m_fill": cfg.m_fill,
        "n": counts.n, "counts": list(counts.counts),
        "m": prior.m, "m_star": post.m,
        "h_hat": h_hat, "epsilon": band.epsilon, "gamma": cfg.gamma,
        "band_lower": band.lower, "band_upper": band.upper,
        "acceptance_rate": chain.acceptance_rate, "final_step_scale": chain.final_step_scale,
        "n_draws": len(chain), "seed": cfg.chain.seed, "jitter_applied": post.cov.jitter_applied,
    }


def run_fit(cfg: RunConfig, data: np.ndarray | None = None, **outputs) -> dict:
    if data is None:
        data = io.read_data_csv(cfg.input_path)
    k, rho = cfg.k, cfg.rho
    eb = None
    if k == "eb" or rho == "eb":
        grid = cfg.eb_grid
        if k != "eb":
            grid = _replace_grid(grid, k_values=(int(k),))
        if rho != "eb":
            grid = _replace_grid(grid, rho_values=(float(rho),))
        eb = eb_select(grid, data)
        k, rho = eb.k_hat, eb.rho_hat
    summary = _summarize(cfg, data, int(k), float(rho), **outputs)
    if eb is not None:
        summary["eb"] = eb.to_dict()
    if cfg.output_path:
        io.write_json(cfg.output_path, summary)
    return summary


def _replace_grid(grid: EBGrid, **changes) -> EBGrid:
    from dataclasses import replace
    return replace(grid, **changes)


def run_eb(grid: EBGrid, data: np.ndarray, output_path: str | None = None, n_jobs: int = 1) -> dict:
    result = eb_select(grid, data, n_jobs=n_jobs).to_dict()
    result["estimator"] = grid.estimator
    result["mc_draws"] = grid.mc_draws
    if output_path:
        io.write_json(output_path, result)
    return result


def summary_partition(summary: dict) -> Partition:
    return Partition(tuple(summary["partition"]["knots"]))


def run_smooth(summary: dict, N: int = DEFAULT_DEGREE, output_path: str | None = None,
               curve_csv: str | None = None) -> MixtureDensity:
    p = summary_partition(summary)
    mix = smooth_estimate(p, np.asarray(summary["h_hat"]), N)
    if output_path:
        io.write_json(output_path, mix.to_dict())
    if curve_csv:
        x = np.linspace(p.a, p.b, CURVE_POINTS)
        io.write_table_csv(curve_csv, {"x": x, "density": evaluate_mixture(mix, x)})
    return mix


def run_qq(summary: dict, reference: str, output_path: str | None = None) -> dict:
    p = summary_partition(summary)
    _, q_hat = cdf_and_quantiles(p, np.asarray(summary["h_hat"]), QQ_PROBS)
    q_ref = get_reference(reference).quantiles(QQ_PROBS)
    if output_path:
        io.write_table_csv(output_path, {"prob": QQ_PROBS, "q_hat": q_hat, "q_ref": q_ref})
    return {"prob": QQ_PROBS, "q_hat": q_hat, "q_ref": q_ref,
            "max_abs_dev": float(np.max(np.abs(q_hat - q_ref)))}


# ---------------------------------------------------------------- argument parsing

def _k_arg(text: str):
    if text == "eb":
        return text
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'eb', got {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError("k must be positive")
    return k


def _rho_arg(text: str):
    if text == "eb":
        return text
    return _positive(text)


def _theta_arg(text: str):
    if text == "rule":
        return text
    return _positive(text)


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _int_list(text: str) -> list[int]:
    """'4:20' (inclusive range) or '4,6,9'."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _float_list(text: str) -> list[float]:
    """'0.1,1,10' or 'log:0.1:10:9' (log-spaced, inclusive)."""
    try:
        if text.startswith("log:"):
            _, lo, hi, n = text.split(":")
            return np.geomspace(float(lo), float(hi), int(n)).tolist()
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _add_support(ap):
    ap.add_argument("--a", type=float, default=0.0, help="left end of the support")
    ap.add_argument("--b", type=float, default=1.0, help="right end of the support")


def _add_chain(ap):
    g = ap.add_argument_group("chain")
    g.add_argument("--iterations", type=int, default=100_000)
    g.add_argument("--burn-in", type=int, default=20_000)
    g.add_argument("--thin", type=int, default=10)
    g.add_argument("--step-scale", type=_positive, default=None,
                   help="proposal sd (default 0.05/(b-a))")
    g.add_argument("--no-adapt", dest="adapt", action="store_false",
                   help="keep the step scale fixed during burn-in")
    g.add_argument("--target-acceptance", type=float, default=0.25)
    g.add_argument("--seed", type=int, default=0)


def _add_model(ap, allow_eb: bool):
    g = ap.add_argument_group("model")
    g.add_argument("--k", type=_k_arg if allow_eb else int, default=10)
    g.add_argument("--rho", type=_rho_arg if allow_eb else _positive, default=1.0)
    g.add_argument("--theta", type=_theta_arg, default="rule",
                   help="kernel scale, or 'rule' for 2 (k/(b-a))^2")
    g.add_argument("--theta-gamma", type=_positive, nargs=2, metavar=("SHAPE", "RATE"),
                   help="draw theta = offset + Gamma(SHAPE, RATE) once per chain")
    g.add_argument("--theta-offset", type=float, default=0.0)
    g.add_argument("--gamma-param", choices=("rate", "scale"), default="rate",
                   help="how the second --theta-gamma number is read")
    g.add_argument("--m-fill", type=float, default=1.0, help="prior log-mean of every height")
    g.add_argument("--gamma", type=float, default=0.95, help="credibility level")


def _add_grid(ap, prefix: str = ""):
    g = ap.add_argument_group("empirical Bayes grid")
    g.add_argument(f"--{prefix}k-values", type=_int_list, default=list(range(4, 21)))
    g.add_argument(f"--{prefix}rho-values", type=_float_list, default=np.geomspace(0.1, 10, 9).tolist())
    g.add_argument(f"--{prefix}mc-draws", type=int, default=500)
    g.add_argument(f"--{prefix}estimator", choices=ESTIMATORS, default="stepping-stone")
    g.add_argument(f"--{prefix}rungs", type=int, default=16)
    g.add_argument(f"--{prefix}burn-in", type=int, default=1000)
    g.add_argument(f"--{prefix}thin", type=int, default=5)


def _grid_from(args, prefix: str = "") -> EBGrid:
    get = lambda name: getattr(args, (prefix + name).replace("-", "_"))
    return EBGrid(get("k-values"), get("rho-values"), mc_draws=get("mc-draws"), seed=args.seed,
                  a=args.a, b=args.b, m_fill=getattr(args, "m_fill", 1.0), burn_in=get("burn-in"),
                  thin=get("thin"), estimator=get("estimator"), n_rungs=get("rungs"))


def _chain_from(args) -> ChainConfig:
    return ChainConfig(iterations=args.iterations, burn_in=args.burn_in, thin=args.thin,
                       step_scale=args.step_scale, seed=args.seed, adapt=args.adapt,
                       target_acceptance=args.target_acceptance)


def _run_config(args, data_required: bool = True) -> RunConfig:
    theta_prior = None
    if args.theta_gamma:
        theta_prior = ThetaPrior(args.theta_gamma[0], args.theta_gamma[1], args.theta_offset,
                                 args.gamma_param)
    eb_grid = None
    if args.k == "eb" or args.rho == "eb":
        eb_grid = _grid_from(args, "eb-")
    return RunConfig(support=(args.a, args.b), k=args.k, rho=args.rho, theta=args.theta,
                     theta_prior=theta_prior, m_fill=args.m_fill, chain=_chain_from(args),
                     gamma=args.gamma, eb_grid=eb_grid, seed=args.seed,
                     input_path=getattr(args, "input", None), output_path=args.output)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srdensity", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="simulate a data set")
    g.add_argument("--generator", required=True, choices=sorted(REFERENCES))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)

    f = sub.add_parser("fit", help="posterior summaries for a data set")
    f.add_argument("--input", required=True, help="headerless CSV, one value per line")
    f.add_argument("--output", required=True, help="summary JSON")
    f.add_argument("--draws-csv", help="write the stored chain draws here")
    f.add_argument("--curve-csv", help="write estimate and band on a 512-point grid")
    f.add_argument("--reference", choices=sorted(REFERENCES), help="add the true density to --curve-csv")
    _add_support(f)
    _add_model(f, allow_eb=True)
    _add_chain(f)
    _add_grid(f, prefix="eb-")

    p = sub.add_parser("simulate-prior", help="prior summaries (no data)")
    p.add_argument("--output", required=True)
    p.add_argument("--draws-csv")
    p.add_argument("--curve-csv")
    _add_support(p)
    _add_model(p, allow_eb=False)
    _add_chain(p)

    e = sub.add_parser("eb", help="marginal likelihood over a (k, rho) grid")
    e.add_argument("--input", required=True)
    e.add_argument("--output", required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--m-fill", type=float, default=1.0)
    e.add_argument("--n-jobs", type=int, default=1)
    _add_support(e)
    _add_grid(e)

    s = sub.add_parser("smooth", help="Bernstein-mixture Bayes decision from a fit summary")
    s.add_argument("--summary", required=True, help="JSON written by 'fit'")
    s.add_argument("--N", type=int, default=DEFAULT_DEGREE, help="Bernstein degree")
    s.add_argument("--output", required=True)
    s.add_argument("--curve-csv")

    q = sub.add_parser("qq", help="quantiles of a fitted density against a reference")
    q.add_argument("--summary", required=True)
    q.add_argument("--reference", required=True, choices=sorted(REFERENCES))
    q.add_argument("--output", required=True)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen-data":
            io.write_data_csv(args.output, gen_data(args.generator, args.n, args.seed))
        elif args.command == "fit":
            cfg = _run_config(args)
            run_fit(cfg, draws_csv=args.draws_csv, curve_csv=args.curve_csv, reference=args.reference)
        elif args.command == "simulate-prior":
            args.k = int(args.k)
            cfg = _run_config(args)
            run_fit(cfg, data=np.empty(0), draws_csv=args.draws_csv, curve_csv=args.curve_csv)
        elif args.command == "eb":
            run_eb(_grid_from(args), io.read_data_csv(args.input), args.output, args.n_jobs)
        elif args.command == "smooth":
            run_smooth(io.read_json(args.summary), args.N, args.output, args.curve_csv)
        elif args.command == "qq":
            run_qq(io.read_json(args.summary), args.reference, args.output)
    except SRDError as exc:
        print(f"srdensity {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, KeyError, ValueError) as exc:
        print(f"srdensity {args.command}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
