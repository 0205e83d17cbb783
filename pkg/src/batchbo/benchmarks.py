"""Synthetic test objectives, bounded perturbations, and regret accounting.

The six objectives are standard minimization benchmarks; each knows its box
domain, its minimizer, and its minimum value (0 for all six).  The driver
maximizes the negated objective, so regret numbers live on the familiar
minimization scale.

Perturbed observation:  y = f(x) + g(x) with g a deterministic seed-keyed
function bounded by the noise scale.  g is a function of x, not sampling
noise: querying the same point twice returns the same value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .inner_opt import Box
from .seeding import hash01


@dataclass(frozen=True)
class Objective:
    """A named minimization benchmark on a box domain."""

    name: str
    dimension: int
    box: Box
    known_optimum_value: float
    known_optimizer: np.ndarray
    fn: callable = field(repr=False)

    def __call__(self, x):
        return evaluate(self, x)


def _rosenbrock(X):
    a = X[:, 1:] - X[:, :-1] ** 2
    return np.sum(100.0 * a * a + (1.0 - X[:, :-1]) ** 2, axis=1)


def _nesterov(X):
    head = 0.25 * np.abs(X[:, 0] - 1.0)
    return head + np.sum(np.abs(X[:, 1:] - 2.0 * np.abs(X[:, :-1]) + 1.0), axis=1)


def _different_powers(X):
    d = X.shape[1]
    exps = 2.0 + 10.0 * np.arange(d) / (d - 1)
    return np.sum(np.abs(X) ** exps, axis=1)


def _dixon_price(X):
    d = X.shape[1]
    i = np.arange(2, d + 1)
    terms = i * (2.0 * X[:, 1:] ** 2 - X[:, :-1]) ** 2
    return (X[:, 0] - 1.0) ** 2 + np.sum(terms, axis=1)


def _ackley(X):
    d = X.shape[1]
    rms = np.sqrt(np.sum(X * X, axis=1) / d)
    cos_mean = np.sum(np.cos(2.0 * np.pi * X), axis=1) / d
    return -20.0 * np.exp(-0.2 * rms) - np.exp(cos_mean) + 20.0 + math.e


def _levy(X):
    w = 1.0 + (X - 1.0) / 4.0
    head = np.sin(np.pi * w[:, 0]) ** 2
    mid = np.sum((w[:, :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:, :-1] + 1.0) ** 2), axis=1)
    tail = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[:, -1]) ** 2)
    return head + mid + tail


def _dixon_price_minimizer(d):
    i = np.arange(1, d + 1, dtype=float)
    return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)


_REGISTRY = {
    "rosenbrock": (_rosenbrock, (-2.0, 2.0), lambda d: np.ones(d), 2),
    "nesterov": (_nesterov, (-2.0, 2.0), lambda d: np.ones(d), 2),
    "different_powers": (_different_powers, (-2.0, 2.0), lambda d: np.zeros(d), 2),
    "dixon_price": (_dixon_price, (-2.0, 2.0), _dixon_price_minimizer, 2),
    "ackley": (_ackley, (-2.0, 2.0), lambda d: np.zeros(d), 1),
    "levy": (_levy, (-10.0, 10.0), lambda d: np.ones(d), 1),
}

OBJECTIVE_NAMES = tuple(sorted(_REGISTRY))


def make_objective(name: str, dimension: int) -> Objective:
    """Objective by name; raises InputError for unknown names or bad dims."""
    key = name.strip().lower().replace("-", "_")
    if key not in _REGISTRY:
        raise InputError(f"unknown objective {name!r}; expected one of {OBJECTIVE_NAMES}")
    fn, (lo, hi), minimizer, min_dim = _REGISTRY[key]
    if dimension < min_dim:
        raise InputError(f"{key} requires dimension >= {min_dim}")
    return Objective(
        name=key,
        dimension=dimension,
        box=Box.cube(lo, hi, dimension),
        known_optimum_value=0.0,
        known_optimizer=minimizer(dimension),
        fn=fn,
    )


def evaluate(obj: Objective, x: np.ndarray) -> float:
    """Exact objective value; the point must lie inside the box."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != obj.dimension:
        raise InputError(f"point has dimension {x.shape[0]}, objective expects {obj.dimension}")
    if not obj.box.contains(x):
        raise InputError(f"point {x.tolist()} outside domain")
    return float(obj.fn(x[None, :])[0])


def evaluate_many(obj: Objective, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != obj.dimension:
        raise InputError(f"points have dimension {X.shape[1]}, objective expects {obj.dimension}")
    for row in X:
        if not obj.box.contains(row):
            raise InputError(f"point {row.tolist()} outside domain")
    return obj.fn(X)


@dataclass(frozen=True)
class PerturbedObjective:
    """Objective observed through a bounded deterministic perturbation."""

    base: Objective
    noise_scale: float
    seed: int

    def __post_init__(self):
        if self.noise_scale < 0:
            raise InputError("noise_scale must be nonnegative")


def perturbation(pobj: PerturbedObjective, x: np.ndarray) -> float:
    """g(x) in [-noise_scale, noise_scale], a pure function of (seed, x)."""
    if pobj.noise_scale == 0.0:
        return 0.0
    x = np.asarray(x, dtype=float).reshape(-1)
    return pobj.noise_scale * (2.0 * hash01(pobj.seed, x) - 1.0)


def perturbed_evaluate(pobj: PerturbedObjective, x: np.ndarray) -> float:
    """Observed value y = f(x) + g(x)."""
    return evaluate(pobj.base, x) + perturbation(pobj, x)


# ---------------------------------------------------------------------------
# run traces and regret
# ---------------------------------------------------------------------------


@dataclass
class RunTrace:
    """Per-query record of a run plus per-round bound diagnostics.

    All regret quantities are computed against `optimum` on the
    maximization scale from the *true* objective values, even when the
    observed values carry a perturbation.
    """

    optimum: float
    dimension: int
    seed: int = 0
    rounds: list = field(default_factory=list)       # round index per query
    queries: list = field(default_factory=list)      # (d,) arrays
    true_values: list = field(default_factory=list)  # f(x), maximization scale
    observed: list = field(default_factory=list)     # y(x)
    best_so_far: list = field(default_factory=list)
    simple_regret: list = field(default_factory=list)
    cumulative_regret: list = field(default_factory=list)
    gamma: list = field(default_factory=list)        # per query row, round-level value
    beta: list = field(default_factory=list)
    bound_value: list = field(default_factory=list)
    header: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.queries)

    def record(
        self,
        round_index: int,
        queries: np.ndarray,
        true_values: np.ndarray,
        observed: np.ndarray,
        gamma: float = np.nan,
        beta: float = np.nan,
        bound_value: float = np.nan,
    ) -> None:
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        true_values = np.atleast_1d(np.asarray(true_values, dtype=float))
        observed = np.atleast_1d(np.asarray(observed, dtype=float))
        best = self.best_so_far[-1] if self.best_so_far else -np.inf
        cum = self.cumulative_regret[-1] if self.cumulative_regret else 0.0
        for x, f, y in zip(queries, true_values, observed):
            best = max(best, f)
            cum += self.optimum - f
            self.rounds.append(round_index)
            self.queries.append(np.asarray(x, dtype=float))
            self.true_values.append(float(f))
            self.observed.append(float(y))
            self.best_so_far.append(float(best))
            self.simple_regret.append(float(self.optimum - best))
            self.cumulative_regret.append(float(cum))
            self.gamma.append(float(gamma))
            self.beta.append(float(beta))
            self.bound_value.append(float(bound_value))

    @property
    def final_simple_regret(self) -> float:
        return self.simple_regret[-1] if self.simple_regret else math.inf


def regret_update(
    trace: RunTrace,
    optimum: float,
    queries: np.ndarray,
    true_values: np.ndarray,
    observed: np.ndarray | None = None,
    round_index: int | None = None,
) -> RunTrace:
    """Append one round of observations to the trace (in place).

    Per query the simple regret becomes optimum - best_so_far and the
    cumulative regret grows by optimum - f(x).
    """
    if optimum != trace.optimum:
        raise InputError("optimum differs from the trace's optimum")
    if observed is None:
        observed = true_values
    nxt = round_index if round_index is not None else (trace.rounds[-1] + 1 if trace.rounds else 0)
    trace.record(nxt, queries, true_values, observed)
    return trace
