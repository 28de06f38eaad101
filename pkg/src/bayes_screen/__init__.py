"""Fully Bayesian variable selection for sparse linear models with p >> n:
size-capped model-space prior, exact posterior model scoring, constrained
blockwise Gibbs sampling, and g-priors on the slab scale."""

__version__ = "0.1.0"

from .data import (
    GHG,
    GZS,
    Dataset,
    FixedC,
    GroundTruth,
    ModelIndicator,
    Precomputed,
    PriorConfig,
    SamplerState,
    ValidationError,
    derive_ground_truth,
    validate_dataset,
)
from .exact import (
    EnumeratedPosterior,
    LogScore,
    check_sparse_riesz,
    enumerate_posterior,
    enumerate_posterior_with_tn_prior,
    log_unnorm_posterior,
    log_unnorm_posterior_g,
    map_model,
)
from .gibbs import ChainAbort, ChainConfig, ChainOutput, merge_chains, run_chain
from .hyperc import MhTuning, preset_c
from .inference import (
    CredibleIntervalSet,
    ReplicationSummary,
    credible_intervals,
    f_eta,
    fcr,
    summarize_replications,
    summarize_run,
)
from .simgen import Example1Spec, Example2Spec, gen_example1, gen_example2

__all__ = [name for name in dir() if not name.startswith("_")]
