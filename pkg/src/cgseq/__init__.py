"""Conditionally Gaussian sequences: exact filtering, posterior path sampling,
and a noise-robust Bayesian integrated-variance estimator.

The package has three layers:

* generic state-space machinery (:mod:`cgseq.model`, :mod:`cgseq.filtering`,
  :mod:`cgseq.sampling`) handling correlated transition/measurement noise
  exactly, including degenerate covariances;
* the high-frequency application (:mod:`cgseq.gibbs`): a Gibbs/HMC sampler
  for daily integrated variance under endogenous microstructure noise, with
  steady-state bias analysis (:mod:`cgseq.bias`);
* study tooling (:mod:`cgseq.simulate`, :mod:`cgseq.benchmark`,
  :mod:`cgseq.ticks`, :mod:`cgseq.cli`).
"""

from .bias import SteadyParams, bias_crossovers, bias_region_table, bias_sign, gamma_star
from .filtering import FilterError, filter_step_original, filter_step_reparam, run_filter
from .gibbs import (
    ChainState,
    IvPosterior,
    McmcConfig,
    PriorHyper,
    iv_point_and_interval,
    run_gibbs,
)
from .linalg import pinv_psd, psd_sqrt, symmetrize
from .model import (
    DerivedParams,
    GaussianBelief,
    SystemParams,
    derive_original,
    iv_system,
)
from .sampling import BackwardKernel, DegenerateStateError, backward_kernel, sample_path
from .simulate import (
    SimDay,
    SimDesign,
    default_priors,
    noise_split,
    rv_naive,
    rv_two_scale,
    simulate_day,
)
from .benchmark import BenchmarkResult, BenchRow, run_benchmark
from .ticks import TickDay, ingest_csv, write_csv

__version__ = "0.1.0"

__all__ = [
    "BackwardKernel",
    "BenchRow",
    "BenchmarkResult",
    "ChainState",
    "DegenerateStateError",
    "DerivedParams",
    "FilterError",
    "GaussianBelief",
    "IvPosterior",
    "McmcConfig",
    "PriorHyper",
    "SimDay",
    "SimDesign",
    "SteadyParams",
    "SystemParams",
    "TickDay",
    "backward_kernel",
    "bias_crossovers",
    "bias_region_table",
    "bias_sign",
    "default_priors",
    "derive_original",
    "filter_step_original",
    "filter_step_reparam",
    "gamma_star",
    "ingest_csv",
    "iv_point_and_interval",
    "iv_system",
    "noise_split",
    "pinv_psd",
    "psd_sqrt",
    "rv_naive",
    "rv_two_scale",
    "run_benchmark",
    "run_filter",
    "run_gibbs",
    "sample_path",
    "simulate_day",
    "symmetrize",
    "write_csv",
]
