"""Continuous maximizers for acquisition functions over box domains.

The default strategy is a (mu/mu_w, lambda) CMA-ES with coordinate-wise
clipping of sampled candidates, restarted from fresh seeded starts until the
evaluation budget is exhausted.  A multistart coordinate search and a dense
grid (useful as a brute-force oracle in one or two dimensions) are also
provided.

All strategies are bitwise deterministic given the seed: candidate ranking
breaks ties by candidate index, and every restart draws from its own
generator derived from (seed, restart index) so that enlarging the budget
only extends trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .seeding import generator, mix

CMA_ES = "cmaes"
MULTISTART_COORDINATE = "multistart_coordinate"
GRID_FALLBACK = "grid"

_STRATEGIES = (CMA_ES, MULTISTART_COORDINATE, GRID_FALLBACK)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box domain."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InputError("box bounds must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InputError("box bounds must be finite")
        if not np.all(lo < hi):
            raise InputError("box must satisfy lower < upper per coordinate")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, lower: float, upper: float, dimension: int) -> "Box":
        return cls(np.full(dimension, lower), np.full(dimension, upper))

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: np.ndarray, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def tile(self, copies: int) -> "Box":
        """Product box for a joint search over `copies` stacked points."""
        return Box(np.tile(self.lower, copies), np.tile(self.upper, copies))


@dataclass(frozen=True)
class InnerMaximizer:
    """Search strategy and budget for the inner acquisition maximization."""

    strategy: str = CMA_ES
    budget: int = 2000
    restarts: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in _STRATEGIES:
            raise InputError(f"unknown strategy {self.strategy!r}; expected one of {_STRATEGIES}")
        if self.budget < 1:
            raise InputError("maximizer budget must be positive")
        if self.restarts < 1:
            raise InputError("restarts must be positive")
        if self.budget < self.restarts:
            raise InputError("budget must cover at least one evaluation per restart")


class _Evaluator:
    """Counts evaluations, checks finiteness, tracks the best point."""

    def __init__(self, obj, budget: int, vectorized: bool):
        self.obj = obj
        self.budget = budget
        self.vectorized = vectorized
        self.used = 0
        self.best_x = None
        self.best_val = -np.inf

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        if self.vectorized:
            vals = np.asarray(self.obj(X), dtype=float).reshape(-1)
        else:
            vals = np.array([float(self.obj(x)) for x in X])
        if not np.all(np.isfinite(vals)):
            bad = X[int(np.argmin(np.isfinite(vals)))]
            raise NumericalError(f"objective returned non-finite value at {bad.tolist()}")
        self.used += X.shape[0]
        i = int(np.argmax(vals))
        if vals[i] > self.best_val:
            self.best_val = float(vals[i])
            self.best_x = X[i].copy()
        return vals


def maximize(obj, domain: Box, m: InnerMaximizer, vectorized: bool = False):
    """Maximize ``obj`` over ``domain``; returns (best point, best value).

    The returned point always lies inside the closed box, and its value is at
    least the objective at the box center and at each seeded restart start.
    """
    ev = _Evaluator(obj, m.budget, vectorized)
    if m.strategy == GRID_FALLBACK:
        _grid_search(ev, domain)
    else:
        # center plus the seeded starts are always evaluated first
        starts = [domain.center]
        for r in range(m.restarts):
            rng = generator(mix(m.seed, r, 0xA11CE))
            starts.append(domain.lower + rng.uniform(size=domain.dimension) * domain.width)
        for s in starts:
            if ev.remaining <= 0:
                break
            ev(s[None, :])
        r = 0
        while ev.remaining > 0:
            share = max(1, m.budget // m.restarts)
            cap = min(share, ev.remaining)
            start = starts[r + 1] if r + 1 < len(starts) else (
                domain.lower + generator(mix(m.seed, r, 0xA11CE)).uniform(size=domain.dimension) * domain.width
            )
            used_before = ev.used
            if m.strategy == CMA_ES:
                _cma_es(ev, domain, start, cap, mix(m.seed, r, 0xC3A))
            else:
                _coordinate_search(ev, domain, start, cap)
            if ev.used == used_before:
                # budget share too small for a full generation/line; spend the
                # rest on seeded uniform samples so the loop always terminates
                rng = generator(mix(m.seed, r, 0xFA11))
                pts = domain.lower + rng.uniform(size=(ev.remaining, domain.dimension)) * domain.width
                ev(pts)
                break
            r += 1
    assert ev.best_x is not None
    return domain.clip(ev.best_x), ev.best_val


def _grid_search(ev: _Evaluator, domain: Box):
    n = domain.dimension
    per_axis = max(2, int(np.floor(ev.budget ** (1.0 / n))))
    axes = [np.linspace(domain.lower[i], domain.upper[i], per_axis) for i in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    chunk = 65536
    for i in range(0, pts.shape[0], chunk):
        ev(pts[i : i + chunk])


def _cma_es(ev: _Evaluator, domain: Box, start: np.ndarray, cap: int, seed: int):
    """One CMA-ES instance in box-normalized coordinates."""
    n = domain.dimension
    rng = generator(seed)
    lam = 4 + int(np.floor(3 * np.log(n)))
    mu = lam // 2
    w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    w /= w.sum()
    mueff = 1.0 / np.sum(w**2)
    cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
    cs = (mueff + 2) / (n + mueff + 5)
    c1 = 2 / ((n + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, np.sqrt((mueff - 1) / (n + 1)) - 1) + cs
    chi_n = np.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))

    mean = (start - domain.lower) / domain.width  # unit-cube coordinates
    sigma = 0.3
    C = np.eye(n)
    pc = np.zeros(n)
    ps = np.zeros(n)
    gen = 0
    used = 0
    while used + lam <= cap:
        # eigendecomposition gives both the sampler and C^(-1/2)
        evals, B = np.linalg.eigh(C)
        evals = np.maximum(evals, 1e-20)
        D = np.sqrt(evals)
        Z = rng.standard_normal((lam, n))
        Y = Z * D @ B.T
        U = np.clip(mean + sigma * Y, 0.0, 1.0)
        X = domain.lower + U * domain.width
        vals = ev(X)
        used += lam
        order = np.argsort(-vals, kind="stable")  # ties favor lower index
        sel = U[order[:mu]]
        old_mean = mean
        mean = w @ sel
        y_mean = (mean - old_mean) / sigma
        inv_sqrt_y = B @ ((B.T @ y_mean) / D)
        ps = (1 - cs) * ps + np.sqrt(cs * (2 - cs) * mueff) * inv_sqrt_y
        gen += 1
        hs = float(
            np.linalg.norm(ps) / np.sqrt(1 - (1 - cs) ** (2 * gen)) / chi_n
            < 1.4 + 2 / (n + 1)
        )
        pc = (1 - cc) * pc + hs * np.sqrt(cc * (2 - cc) * mueff) * y_mean
        y_sel = (sel - old_mean) / sigma
        rank_mu = (w[:, None] * y_sel).T @ y_sel
        C = (
            (1 - c1 - cmu) * C
            + c1 * (np.outer(pc, pc) + (1 - hs) * cc * (2 - cc) * C)
            + cmu * rank_mu
        )
        C = 0.5 * (C + C.T)
        sigma *= np.exp((cs / damps) * (np.linalg.norm(ps) / chi_n - 1))
        sigma = min(sigma, 10.0)
        if sigma < 1e-12:
            break


def _coordinate_search(ev: _Evaluator, domain: Box, start: np.ndarray, cap: int):
    """Cyclic per-coordinate grid refinement from one start."""
    n = domain.dimension
    pts_per_line = 9
    x = domain.clip(start.copy())
    radius = 0.5 * domain.width.copy()
    used = 0
    while used + pts_per_line <= cap:
        for i in range(n):
            if used + pts_per_line > cap:
                break
            lo = max(domain.lower[i], x[i] - radius[i])
            hi = min(domain.upper[i], x[i] + radius[i])
            line = np.repeat(x[None, :], pts_per_line, axis=0)
            line[:, i] = np.linspace(lo, hi, pts_per_line)
            vals = ev(line)
            used += pts_per_line
            x = line[int(np.argmax(vals))].copy()
        radius *= 0.5
        if np.all(radius < 1e-12 * domain.width):
            break
