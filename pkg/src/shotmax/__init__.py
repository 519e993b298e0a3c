"""Simulation and Monte Carlo verification for the maximum process of a
random walk with heavy-tailed additive noise, and its limit, the maximum
process of fractional Brownian motion with shot noise."""

__version__ = "0.1.0"

from shotmax.discrete import (
    PerturbedWalk,
    WalkSpec,
    longest_nonneg_gap,
    max_process,
    one_sided_paths,
    scaled_path,
    simulate_walk,
    truncated_scaled_path,
)
from shotmax.fbm import GridPath, Hurst, SynthesisError, fbm_covariance, fbm_path, sample_fgn
from shotmax.limit import (
    FddQuery,
    PsiEstimate,
    fdd_probability,
    psi_curve,
    psi_estimate,
    sample_limit_path,
    self_similarity_test,
)
from shotmax.noise import (
    NoiseParams,
    PointSet,
    extremal_process,
    max_order_statistic_cdf,
    sample_perturbation,
    sample_point_process,
)
from shotmax.pathspace import max_jump, partition_modulus, skorohod_j1, sup_distance, uniform_modulus
from shotmax.stats import EcdfSummary, KsReport, ks_two_sample, ks_vs_cdf
