"""Upper-confidence selection rules, sequential and batch.

Sequential rule: score(x) = m(x) + B * sd(x), with B the weight on the
deviation term (the norm bound of the unknown function, fixed to 1 in
practice when the norm is unknowable).

Batch rule for L points X with posterior covariance C = cov(X, X):

    score(X) = (1/L) sum_i m(x_i) + B * (2 sqrt(tr(C)/L) - sqrt(1^T C 1 / L^2))

The bracketed deviation term is nonnegative for PSD C (Cauchy-Schwarz gives
1^T C 1 <= L tr(C)) and shrinks when batch points are mutually correlated,
so the joint argmax spreads the batch out.  With L = 1 the rule collapses to
the sequential one.  The same formulas serve the noise-free and the
regularized (perturbation) settings; the difference lives entirely in the
posterior model's regularizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .inner_opt import Box, InnerMaximizer, maximize
from .posterior import (
    PosteriorModel,
    batch_covariance,
    batch_covariance_many,
    mean,
    mean_many,
    variance,
    variance_many,
)
from .seeding import hash01, mix

NOISE_FREE = "noise_free"
PERTURBATION = "perturbation"

#: Proposed queries closer than this (per-coordinate, relative to box width)
#: to an existing history point get nudged so a point is never queried twice.
DUPLICATE_TOL = 1e-9
NUDGE_SCALE = 1e-6


@dataclass(frozen=True)
class AcquisitionConfig:
    """Weight, batch size, regularizer, and observation mode."""

    norm_bound: float = 1.0
    batch_size: int = 1
    regularizer: float = 0.0
    mode: str = NOISE_FREE

    def __post_init__(self):
        if not self.norm_bound > 0:
            raise InputError("norm_bound must be positive")
        if self.batch_size < 1:
            raise InputError("batch_size must be at least 1")
        if self.regularizer < 0:
            raise InputError("regularizer must be nonnegative")
        if self.mode not in (NOISE_FREE, PERTURBATION):
            raise InputError(f"mode must be {NOISE_FREE!r} or {PERTURBATION!r}")


def sequential_acquisition(model: PosteriorModel, cfg: AcquisitionConfig, x: np.ndarray) -> float:
    """mean(x) + norm_bound * sqrt(variance(x))."""
    return mean(model, x) + cfg.norm_bound * float(np.sqrt(variance(model, x)))


def sequential_acquisition_many(model: PosteriorModel, cfg: AcquisitionConfig, X: np.ndarray) -> np.ndarray:
    return mean_many(model, X) + cfg.norm_bound * np.sqrt(variance_many(model, X))


def _deviation_term(trace_term: np.ndarray, quad_term: np.ndarray, L: int) -> np.ndarray:
    for name, t in (("trace", trace_term), ("1'C1", quad_term)):
        bad = np.min(t) if np.ndim(t) else t
        if bad < -1e-8:
            raise NumericalError(f"batch covariance {name} term negative beyond tolerance: {bad:.3e}")
    trace_term = np.maximum(trace_term, 0.0)
    quad_term = np.maximum(quad_term, 0.0)
    return 2.0 * np.sqrt(trace_term / L) - np.sqrt(quad_term / (L * L))


def batch_acquisition(model: PosteriorModel, cfg: AcquisitionConfig, X: np.ndarray) -> float:
    """Joint score of a batch of cfg.batch_size points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    L = cfg.batch_size
    if X.shape[0] != L:
        raise InputError(f"batch has {X.shape[0]} points, config expects {L}")
    C = batch_covariance(model, X)
    mean_term = float(np.mean(mean_many(model, X)))
    dev = _deviation_term(np.trace(C), float(C.sum()), L)
    return mean_term + cfg.norm_bound * float(dev)


def batch_acquisition_many(model: PosteriorModel, cfg: AcquisitionConfig, batches: np.ndarray) -> np.ndarray:
    """Joint score for m candidate batches given as an (m, L, d) array."""
    batches = np.asarray(batches, dtype=float)
    m, L, _ = batches.shape
    if L != cfg.batch_size:
        raise InputError(f"batches have {L} points, config expects {cfg.batch_size}")
    means = mean_many(model, batches.reshape(m * L, -1)).reshape(m, L).mean(axis=1)
    C = batch_covariance_many(model, batches)
    tr = np.trace(C, axis1=1, axis2=2)
    quad = C.sum(axis=(1, 2))
    return means + cfg.norm_bound * _deviation_term(tr, quad, L)


def select_next(
    model: PosteriorModel,
    cfg: AcquisitionConfig,
    domain: Box,
    maximizer: InnerMaximizer,
) -> tuple[np.ndarray, float]:
    """Maximize the acquisition over the box; returns ((L, d) points, value).

    Batch mode searches the (d*L)-dimensional product box jointly.  Returned
    points that coincide with a stored history point (or with each other)
    are nudged by a tiny deterministic offset so the noise-free kernel
    matrix stays invertible.
    """
    d = domain.dimension
    L = cfg.batch_size
    if L == 1:
        obj = lambda X: sequential_acquisition_many(model, cfg, X)
        x, val = maximize(obj, domain, maximizer, vectorized=True)
        pts = x[None, :]
    else:
        joint = domain.tile(L)
        obj = lambda F: batch_acquisition_many(model, cfg, F.reshape(-1, L, d))
        flat, val = maximize(obj, joint, maximizer, vectorized=True)
        pts = flat.reshape(L, d)
    return _dedupe(model, pts, domain, maximizer.seed), float(val)


def _dedupe(model: PosteriorModel, pts: np.ndarray, domain: Box, seed: int) -> np.ndarray:
    width = domain.width
    taken = [p for p in model.history.points]
    out = np.array(pts, dtype=float)
    for i in range(out.shape[0]):
        attempt = 0
        while taken and _is_duplicate(out[i], taken, width):
            offset = np.array(
                [2.0 * hash01(mix(seed, i, attempt, j), out[i]) - 1.0 for j in range(len(width))]
            )
            out[i] = domain.clip(out[i] + NUDGE_SCALE * width * offset)
            attempt += 1
            if attempt > 64:
                raise NumericalError("duplicate-point guard failed to separate query")
        taken.append(out[i].copy())
    return out


def _is_duplicate(x: np.ndarray, taken: list, width: np.ndarray) -> bool:
    scaled = np.abs(np.asarray(taken) - x) / width
    return bool(np.any(np.max(scaled, axis=1) <= DUPLICATE_TOL))
