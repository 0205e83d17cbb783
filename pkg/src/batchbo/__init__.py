"""Batch black-box optimization with kernel surrogates and deterministic
confidence-bound acquisition, plus rank-1 lattice point sets for robust
initialization."""

from .acquisition import (
    AcquisitionConfig,
    batch_acquisition,
    select_next,
    sequential_acquisition,
)
from .benchmarks import (
    Objective,
    PerturbedObjective,
    RunTrace,
    evaluate,
    make_objective,
    perturbed_evaluate,
    regret_update,
)
from .errors import InputError, NumericalError
from .harness import RunConfig, load_config, parse_config, random_search, robust_init, run, run_suite
from .inner_opt import Box, InnerMaximizer, maximize
from .kernels import KernelMixture, KernelSpec, kernel_eval, kernel_matrix
from .lattice import (
    LatticeSearchConfig,
    Rank1Lattice,
    covering_radius_estimate,
    generate,
    resize_to_box,
    scs_refine,
    search_alg6,
    search_alg7,
    search_korobov,
    search_scs,
    separation_distance,
    toroidal_norm,
)
from .posterior import (
    ObservationHistory,
    PosteriorModel,
    batch_covariance,
    fit,
    information_gain,
    mean,
    variance,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig",
    "Box",
    "InnerMaximizer",
    "InputError",
    "KernelMixture",
    "KernelSpec",
    "LatticeSearchConfig",
    "NumericalError",
    "Objective",
    "ObservationHistory",
    "PerturbedObjective",
    "PosteriorModel",
    "Rank1Lattice",
    "RunConfig",
    "RunTrace",
    "batch_acquisition",
    "batch_covariance",
    "covering_radius_estimate",
    "evaluate",
    "fit",
    "generate",
    "information_gain",
    "kernel_eval",
    "kernel_matrix",
    "load_config",
    "make_objective",
    "maximize",
    "mean",
    "parse_config",
    "perturbed_evaluate",
    "random_search",
    "regret_update",
    "resize_to_box",
    "robust_init",
    "run",
    "run_suite",
    "scs_refine",
    "search_alg6",
    "search_alg7",
    "search_korobov",
    "search_scs",
    "select_next",
    "separation_distance",
    "sequential_acquisition",
    "toroidal_norm",
    "variance",
]
