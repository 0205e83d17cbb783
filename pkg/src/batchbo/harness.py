"""End-to-end experiment driver.

A run proceeds in three phases: a deterministic rank-1 lattice
initialization resized into the objective's box, a loop of
select-query-refit rounds using the configured acquisition rule, and regret
accounting against the objective's known optimum.  Everything is
reproducible bitwise from (config, seed).

Per round the trace records bound diagnostics: the realized information
gain of the selected points, the largest batch-covariance spectral norm
seen so far, and the confidence-bound regret ceiling assembled from them.
On objectives whose norm is genuinely below the configured weight the
recorded ceiling is a deterministic upper bound for the realized
(acquisition-phase) cumulative regret.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acquisition as acq
from .benchmarks import (
    PerturbedObjective,
    RunTrace,
    evaluate_many,
    make_objective,
    perturbation,
)
from .errors import InputError
from .inner_opt import Box, InnerMaximizer
from .kernels import KernelSpec
from .lattice import LatticeSearchConfig, generate, resize_to_box, search_alg6, search_alg7
from .posterior import (
    STABILITY_JITTER,
    ObservationHistory,
    batch_covariance,
    fit,
    information_gain,
)
from .seeding import generator, mix

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run."""

    objective: str = "rosenbrock"
    dimension: int = 2
    noise_scale: float = 0.0
    kernel_family: str = "matern52"
    lengthscales: float = 1.0
    signal_variance: float = 1.0
    mode: str = acq.NOISE_FREE
    regularizer: float = 1e-6
    norm_bound: float = 1.0
    batch_size: int = 1
    rounds: int = 20
    init_mode: str = "lattice"  # lattice | file | none
    init_count: int = 20
    init_file: str | None = None
    init_primes: int = 50
    init_scs_iterations: int = 3
    inner_strategy: str = "cmaes"
    inner_budget: int = 2000
    inner_restarts: int = 2
    seeds: tuple = (1,)
    output_path: str | None = None

    def __post_init__(self):
        if self.mode not in (acq.NOISE_FREE, acq.PERTURBATION):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.init_mode not in ("lattice", "file", "none"):
            raise InputError(f"unknown init mode {self.init_mode!r}")
        if self.rounds < 0:
            raise InputError("rounds must be nonnegative")
        if self.init_mode == "lattice" and self.init_count < 1:
            raise InputError("lattice init needs at least one point")
        if self.init_mode == "file" and not self.init_file:
            raise InputError("init.file mode requires a path")
        if self.mode == acq.PERTURBATION and not self.regularizer > 0:
            raise InputError("perturbation mode requires a positive regularizer")

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(
            family=self.kernel_family,
            dimension=self.dimension,
            lengthscales=self.lengthscales,
            signal_variance=self.signal_variance,
        )

    def acquisition_config(self) -> acq.AcquisitionConfig:
        return acq.AcquisitionConfig(
            norm_bound=self.norm_bound,
            batch_size=self.batch_size,
            regularizer=self.regularizer,
            mode=self.mode,
        )


# ---------------------------------------------------------------------------
# config file format: one `section.key = value` per line, '#' comments
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "objective.name": ("objective", str),
    "objective.dimension": ("dimension", int),
    "objective.noise_scale": ("noise_scale", float),
    "kernel.family": ("kernel_family", str),
    "kernel.lengthscales": ("lengthscales", "floats"),
    "kernel.signal_variance": ("signal_variance", float),
    "acquisition.mode": ("mode", str),
    "acquisition.norm_bound": ("norm_bound", float),
    "acquisition.batch_size": ("batch_size", int),
    "acquisition.regularizer": ("regularizer", float),
    "run.rounds": ("rounds", int),
    "run.seeds": ("seeds", "ints"),
    "init.lattice": ("init_count", int),
    "init.file": ("init_file", str),
    "init.none": ("init_none", "flag"),
    "init.primes": ("init_primes", int),
    "init.scs_iterations": ("init_scs_iterations", int),
    "inner.strategy": ("inner_strategy", str),
    "inner.budget": ("inner_budget", int),
    "inner.restarts": ("inner_restarts", int),
    "output.path": ("output_path", str),
}


def parse_config(text: str) -> RunConfig:
    """Parse the flat key-value run configuration format."""
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
        name, kind = _CONFIG_KEYS[key]
        if kind is str:
            fields[name] = value
        elif kind is int:
            fields[name] = int(value)
        elif kind is float:
            fields[name] = float(value)
        elif kind == "floats":
            vals = [float(v) for v in value.replace(",", " ").split()]
            fields[name] = vals[0] if len(vals) == 1 else tuple(vals)
        elif kind == "ints":
            fields[name] = tuple(int(v) for v in value.replace(",", " ").split())
        elif kind == "flag":
            fields[name] = value.strip().lower() in ("1", "true", "yes")
    if fields.pop("init_none", False):
        fields["init_mode"] = "none"
    elif "init_file" in fields:
        fields["init_mode"] = "file"
    elif "init_count" in fields:
        fields["init_mode"] = "lattice"
    return RunConfig(**fields)


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text())


# ---------------------------------------------------------------------------
# problems: objectives lifted to the maximization scale
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Problem:
    """A maximization problem with separate true and observed values."""

    box: Box
    optimum: float                      # max of the true function
    true_values: callable = field(repr=False)   # (m, d) -> (m,)
    observe: callable = field(repr=False)       # (m, d) -> (m,)

    @classmethod
    def noise_free(cls, box: Box, optimum: float, true_values) -> "Problem":
        return cls(box, optimum, true_values, true_values)


def benchmark_problem(cfg: RunConfig, seed: int) -> Problem:
    """The configured benchmark objective, negated for maximization."""
    obj = make_objective(cfg.objective, cfg.dimension)
    true_vals = lambda X: -evaluate_many(obj, X)
    if cfg.mode == acq.PERTURBATION and cfg.noise_scale > 0:
        pobj = PerturbedObjective(obj, cfg.noise_scale, mix(seed, 0x6E015E))
        observe = lambda X: np.array(
            [-(float(evaluate_many(obj, x[None])[0]) + perturbation(pobj, x)) for x in np.atleast_2d(X)]
        )
    else:
        observe = true_vals
    return Problem(obj.box, -obj.known_optimum_value, true_vals, observe)


# ---------------------------------------------------------------------------
# robust initialization
# ---------------------------------------------------------------------------


def init_points_unit(cfg: RunConfig) -> np.ndarray:
    """Unit-cube initialization points; () when init is disabled."""
    if cfg.init_mode == "none":
        return np.zeros((0, cfg.dimension))
    if cfg.init_mode == "file":
        pts = np.loadtxt(cfg.init_file, ndmin=2)
        if pts.shape[1] != cfg.dimension:
            raise InputError(
                f"init file has dimension {pts.shape[1]}, run expects {cfg.dimension}"
            )
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise InputError("init file points must lie in the unit cube")
        return pts
    if cfg.init_count == 1:
        return np.zeros((1, cfg.dimension))
    if cfg.dimension == 1:
        return generate(np.array([1]), cfg.init_count).points
    search_cfg = LatticeSearchConfig(
        dimension=cfg.dimension,
        n_points=cfg.init_count,
        n_primes=cfg.init_primes,
        scs_iterations=cfg.init_scs_iterations,
    )
    search = search_alg7 if cfg.init_scs_iterations > 0 else search_alg6
    lat, _ = search(search_cfg)
    return lat.points


def robust_init(cfg: RunConfig, seed: int = 0) -> ObservationHistory:
    """Evaluate the initialization set and return the populated history."""
    problem = benchmark_problem(cfg, seed)
    pts = resize_to_box(init_points_unit(cfg), problem.box)
    if pts.shape[0] == 0:
        return ObservationHistory.empty(cfg.dimension)
    return ObservationHistory(pts, problem.observe(pts), cfg.dimension)


# ---------------------------------------------------------------------------
# bound diagnostics
# ---------------------------------------------------------------------------


def _bound_constant(cfg: RunConfig, sigma2: float, beta: float) -> float:
    """The C factor of the applicable regret ceiling at this round."""
    if cfg.batch_size == 1 and cfg.mode == acq.NOISE_FREE:
        return 8.0 / math.log1p(1.0 / sigma2)
    if cfg.batch_size == 1:
        kernel_cap = cfg.signal_variance + sigma2
        return 8.0 * kernel_cap / math.log1p(kernel_cap / sigma2)
    if beta <= 0.0:
        return 8.0 * sigma2  # limit of 8 b / log(1 + b / s2) as b -> 0
    return 8.0 * beta / math.log1p(beta / sigma2)


def _bound_value(
    cfg: RunConfig, sigma2: float, t_acq: int, gamma: float, beta: float, g_sq_sum: float
) -> float:
    c = _bound_constant(cfg, sigma2, beta)
    bound = cfg.norm_bound * math.sqrt(max(t_acq * c * gamma, 0.0))
    if cfg.mode == acq.PERTURBATION:
        sigma = math.sqrt(sigma2)
        g_norm = math.sqrt(max(g_sq_sum, 0.0)) / sigma
        bound += 2.0 * t_acq * (cfg.norm_bound + g_norm) * sigma
    return bound


def bound_violations(trace: RunTrace) -> list:
    """Rounds where acquisition-phase cumulative regret exceeds the ceiling."""
    out = []
    base = 0.0
    for i in range(len(trace)):
        if trace.rounds[i] == 0:
            base = trace.cumulative_regret[i]
    last = {}
    for i in range(len(trace)):
        r = trace.rounds[i]
        if r > 0:
            last[r] = i
    for r, i in sorted(last.items()):
        realized = trace.cumulative_regret[i] - base
        ceiling = trace.bound_value[i]
        if np.isfinite(ceiling) and realized > ceiling:
            out.append((r, realized, ceiling))
    return out


# ---------------------------------------------------------------------------
# the optimize loop
# ---------------------------------------------------------------------------


def run_problem(problem: Problem, cfg: RunConfig, seed: int) -> RunTrace:
    """Run the full loop on an arbitrary problem (used for synthetic tests)."""
    spec = cfg.kernel_spec()
    acq_cfg = cfg.acquisition_config()
    sigma2 = cfg.regularizer if cfg.regularizer > 0 else STABILITY_JITTER

    trace = RunTrace(optimum=problem.optimum, dimension=cfg.dimension, seed=seed)
    trace.header = {
        "sigma2": sigma2,
        "weight": cfg.norm_bound,
        "mode": cfg.mode,
        "batch_size": cfg.batch_size,
        "gamma": "realized information gain of selected points",
    }

    init_pts = resize_to_box(init_points_unit(cfg), problem.box)
    history = ObservationHistory.empty(cfg.dimension)
    if init_pts.shape[0]:
        true0 = problem.true_values(init_pts)
        obs0 = problem.observe(init_pts)
        history = history.extend(init_pts, obs0)
        trace.record(0, init_pts, true0, obs0)

    acq_points: list = []
    g_sq_sum = 0.0
    beta_max = 0.0
    for n in range(1, cfg.rounds + 1):
        model = fit(spec, history, cfg.regularizer)
        maximizer = InnerMaximizer(
            strategy=cfg.inner_strategy,
            budget=cfg.inner_budget,
            restarts=cfg.inner_restarts,
            seed=mix(seed, n, 0x5E1EC7),
        )
        X, _ = acq.select_next(model, acq_cfg, problem.box, maximizer)
        A = batch_covariance(model, X)
        beta_max = max(beta_max, float(np.max(np.abs(np.linalg.eigvalsh(A)))))
        true_vals = problem.true_values(X)
        obs_vals = problem.observe(X)
        history = history.extend(X, obs_vals)
        acq_points.extend(X)
        g_sq_sum += float(np.sum((obs_vals - true_vals) ** 2))
        gamma = information_gain(spec, np.asarray(acq_points), sigma2)
        bound = _bound_value(cfg, sigma2, len(acq_points), gamma, beta_max, g_sq_sum)
        trace.record(n, X, true_vals, obs_vals, gamma=gamma, beta=beta_max, bound_value=bound)
    return trace


def run(cfg: RunConfig, seed: int) -> RunTrace:
    """Run the configured benchmark objective; deterministic given (cfg, seed)."""
    return run_problem(benchmark_problem(cfg, seed), cfg, seed)


def random_search(cfg: RunConfig, seed: int) -> RunTrace:
    """Uniform-sampling baseline with the same evaluation budget as run()."""
    problem = benchmark_problem(cfg, seed)
    n_init = init_points_unit(cfg).shape[0]
    trace = RunTrace(optimum=problem.optimum, dimension=cfg.dimension, seed=seed)
    trace.header = {"mode": "random_search"}
    rng = generator(mix(seed, 0xBA5E11))
    if n_init:
        pts = problem.box.lower + rng.uniform(size=(n_init, cfg.dimension)) * problem.box.width
        trace.record(0, pts, problem.true_values(pts), problem.observe(pts))
    for n in range(1, cfg.rounds + 1):
        pts = problem.box.lower + rng.uniform(size=(cfg.batch_size, cfg.dimension)) * problem.box.width
        trace.record(n, pts, problem.true_values(pts), problem.observe(pts))
    return trace


def run_suite(cfg: RunConfig, repetitions: int | None = None) -> dict:
    """Repeat run() over seeds; aggregate per-step simple regret.

    Returns {"seeds", "steps", "mean", "stderr", "traces"} with one
    aggregate row per step.
    """
    if repetitions is not None:
        if repetitions < 1:
            raise InputError("need at least one repetition")
        seeds = tuple(range(1, repetitions + 1))
    else:
        seeds = tuple(cfg.seeds)
    traces = [run(cfg, s) for s in seeds]
    n_steps = min(len(t) for t in traces)
    reg = np.array([t.simple_regret[:n_steps] for t in traces])
    mean = reg.mean(axis=0)
    if len(seeds) > 1:
        stderr = reg.std(axis=0, ddof=1) / math.sqrt(len(seeds))
    else:
        stderr = np.zeros(n_steps)
    return {
        "seeds": seeds,
        "steps": np.arange(1, n_steps + 1),
        "mean": mean,
        "stderr": stderr,
        "traces": traces,
    }


# ---------------------------------------------------------------------------
# result files
# ---------------------------------------------------------------------------


def trace_columns(dimension: int) -> list:
    return (
        ["seed", "round", "step"]
        + [f"x{i}" for i in range(dimension)]
        + ["observed", "best_so_far", "simple_regret", "cumulative_regret",
           "gamma_t", "beta", "bound_value"]
    )


def write_trace(trace: RunTrace, path: str | Path) -> None:
    """Tab-delimited trace file: metadata comments, header row, data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for k, v in trace.header.items():
        lines.append(f"# {k} = {v}")
    lines.append("\t".join(trace_columns(trace.dimension)))
    for i in range(len(trace)):
        row = [str(trace.seed), str(trace.rounds[i]), str(i + 1)]
        row += [FLOAT_FMT % v for v in trace.queries[i]]
        row += [
            FLOAT_FMT % trace.observed[i],
            FLOAT_FMT % trace.best_so_far[i],
            FLOAT_FMT % trace.simple_regret[i],
            FLOAT_FMT % trace.cumulative_regret[i],
            FLOAT_FMT % trace.gamma[i],
            FLOAT_FMT % trace.beta[i],
            FLOAT_FMT % trace.bound_value[i],
        ]
        lines.append("\t".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_suite(result: dict, path: str | Path) -> None:
    """Aggregate file: one row per step with regret mean and standard error."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# seeds = " + ",".join(str(s) for s in result["seeds"])]
    lines.append("step\tmean_simple_regret\tstderr")
    for step, m, s in zip(result["steps"], result["mean"], result["stderr"]):
        lines.append(f"{step}\t{FLOAT_FMT % m}\t{FLOAT_FMT % s}")
    path.write_text("\n".join(lines) + "\n")
