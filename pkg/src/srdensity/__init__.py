"""Bayesian density estimation with simple random densities.

Piecewise-constant random densities whose step heights follow a lognormal law
conditioned on integrating to one; conjugate updating from cell counts,
random walk Metropolis summaries, empirical-Bayes choice of the partition,
and smooth Bernstein-mixture estimates.
"""
from .covariance import CovarianceSpec, CovMatrix, LognormalParams, gaussian_cov, induce_sigma, lognormal_logpdf
from .empirical_bayes import EBGrid, EBResult, eb_select, marginal_log_likelihood
from .model import SimpleRandomDensity, evaluate_density, log_likelihood, log_target, posterior
from .partition import CountVector, Partition, complete_heights, count_statistic, s_delta, uniform_partition
from .sampler import ChainConfig, ChainOutput, CredibleBand, cdf_and_quantiles, credible_band, posterior_mean, rwm_sample
from .smoothing import (BernsteinBasis, MixtureDensity, QPProblem, bernstein_weights_of, evaluate_mixture,
                        moment_vector, overlap_matrix, smooth_estimate, solve_simplex_qp)
from .special import regularized_incomplete_beta

__version__ = "0.1.0"
