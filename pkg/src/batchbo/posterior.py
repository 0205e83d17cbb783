"""Kernel-regression posterior over an observation history.

A fitted model exposes the interpolation mean

    m_t(x) = k_t(x)^T (K_t + s I)^{-1} y_t

the predictive variance

    var_t(x) = k(x, x) - k_t(x)^T (K_t + s I)^{-1} k_t(x)

and the batch covariance

    cov_t(X, X) = K(X, X) - K(H, X)^T (K(H, H) + s I)^{-1} K(H, X)

where H is the history and s the regularizer.  With s = 0 the history is
interpolated exactly (a tiny stabilizing jitter keeps the factorization
alive); with s > 0 the model is the regularized form used when observations
carry a bounded perturbation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .kernels import KernelSpec, kernel_matrix

#: Diagonal jitter used purely for factorization stability when the
#: modeling regularizer is zero.  Kept far below any realistic regularizer
#: so that the noise-free semantics dominate.
STABILITY_JITTER = 1e-10


@dataclass(frozen=True)
class ObservationHistory:
    """Ordered query points with their observed values."""

    points: np.ndarray  # (t, d)
    values: np.ndarray  # (t,)
    dimension: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.dimension)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if pts.shape[0] != vals.shape[0]:
            raise InputError(
                f"{pts.shape[0]} points but {vals.shape[0]} values"
            )
        if pts.shape[0] > 1:
            # the selection rules are assumed never to query a point twice
            _, counts = np.unique(pts, axis=0, return_counts=True)
            if np.any(counts > 1):
                raise InputError("duplicate points in observation history")
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def empty(cls, dimension: int) -> "ObservationHistory":
        return cls(np.zeros((0, dimension)), np.zeros(0), dimension)

    def extend(self, points: np.ndarray, values: np.ndarray) -> "ObservationHistory":
        """New history with extra observations appended (self is unchanged)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        vals = np.atleast_1d(np.asarray(values, dtype=float))
        return ObservationHistory(
            np.vstack([self.points, pts]),
            np.concatenate([self.values, vals]),
            self.dimension,
        )

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class PosteriorModel:
    """Factorized fit of a history, ready for mean/variance queries."""

    spec: KernelSpec
    history: ObservationHistory
    regularizer: float
    chol: np.ndarray | None = field(repr=False)   # lower Cholesky of K + s I
    alpha: np.ndarray | None = field(repr=False)  # (K + s I)^{-1} y

    @property
    def diagonal_shift(self) -> float:
        """The diagonal actually added to K before factorizing."""
        return self.regularizer if self.regularizer > 0 else STABILITY_JITTER


def fit(spec: KernelSpec, history: ObservationHistory, regularizer: float = 0.0) -> PosteriorModel:
    """Factorize K_t + s I once; subsequent queries reuse the factor.

    An empty history yields the prior model (zero mean, k(x, x) variance).
    """
    if regularizer < 0:
        raise InputError(f"regularizer must be nonnegative, got {regularizer}")
    if history.dimension != spec.dimension:
        raise InputError(
            f"history dimension {history.dimension} != kernel dimension {spec.dimension}"
        )
    if len(history) == 0:
        return PosteriorModel(spec, history, float(regularizer), None, None)
    shift = regularizer if regularizer > 0 else STABILITY_JITTER
    K = kernel_matrix(spec, history.points, history.points)
    K[np.diag_indices_from(K)] += shift
    try:
        chol = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        smallest = float(np.linalg.eigvalsh(K)[0])
        raise NumericalError(
            f"kernel matrix factorization failed; smallest pivot {smallest:.3e} "
            f"with diagonal shift {shift:.3e}"
        ) from None
    alpha = _chol_solve(chol, history.values)
    return PosteriorModel(spec, history, float(regularizer), chol, alpha)


def _chol_solve(chol: np.ndarray, b: np.ndarray) -> np.ndarray:
    import scipy.linalg

    y = scipy.linalg.solve_triangular(chol, b, lower=True)
    return scipy.linalg.solve_triangular(chol.T, y, lower=False)


def _cross_solve(model: PosteriorModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """k_t(X) as (t, m) and the half-solve L^{-1} k_t(X)."""
    import scipy.linalg

    Kx = kernel_matrix(model.spec, model.history.points, X)
    V = scipy.linalg.solve_triangular(model.chol, Kx, lower=True)
    return Kx, V


def mean_many(model: PosteriorModel, X: np.ndarray) -> np.ndarray:
    """Posterior mean at each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.spec.dimension:
        raise InputError(f"points have dimension {X.shape[1]}, expected {model.spec.dimension}")
    if model.chol is None:
        return np.zeros(X.shape[0])
    Kx = kernel_matrix(model.spec, model.history.points, X)
    return Kx.T @ model.alpha


def variance_many(model: PosteriorModel, X: np.ndarray) -> np.ndarray:
    """Posterior variance at each row of X, clamped to [0, k(x, x)]."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.spec.dimension:
        raise InputError(f"points have dimension {X.shape[1]}, expected {model.spec.dimension}")
    prior = np.full(X.shape[0], model.spec.signal_variance)
    if model.chol is None:
        return prior
    _, V = _cross_solve(model, X)
    raw = prior - np.einsum("ij,ij->j", V, V)
    if np.any(raw < -1e-6):
        warnings.warn(
            f"posterior variance fell below -1e-6 (min {raw.min():.3e}); clamping",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.clip(raw, 0.0, prior)


def mean(model: PosteriorModel, x: np.ndarray) -> float:
    """Posterior mean at a single point."""
    return float(mean_many(model, np.asarray(x, dtype=float)[None, :])[0])


def variance(model: PosteriorModel, x: np.ndarray) -> float:
    """Posterior variance at a single point."""
    return float(variance_many(model, np.asarray(x, dtype=float)[None, :])[0])


def batch_covariance(model: PosteriorModel, X: np.ndarray) -> np.ndarray:
    """Posterior covariance matrix of a batch of L points.

    For an empty history this is the prior kernel matrix K(X, X).  The
    result is symmetrized; for L = 1 the single entry matches variance(x).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 1:
        raise InputError("batch must contain at least one point")
    Kxx = kernel_matrix(model.spec, X, X)
    if model.chol is None:
        return Kxx
    _, V = _cross_solve(model, X)
    C = Kxx - V.T @ V
    return 0.5 * (C + C.T)


def batch_covariance_many(model: PosteriorModel, batches: np.ndarray) -> np.ndarray:
    """Batch covariance for m candidate batches at once; returns (m, L, L)."""
    batches = np.asarray(batches, dtype=float)
    m, L, d = batches.shape
    flat = batches.reshape(m * L, d)
    diff = (batches[:, :, None, :] - batches[:, None, :, :]) / model.spec.lengthscales
    sq = np.einsum("mijk,mijk->mij", diff, diff)
    if model.spec.family == "se":
        Kxx = np.exp(-0.5 * sq)
    else:
        r = np.sqrt(np.maximum(sq, 0.0))
        s5r = np.sqrt(5.0) * r
        Kxx = (1.0 + s5r + (5.0 / 3.0) * sq) * np.exp(-s5r)
    Kxx = model.spec.signal_variance * Kxx
    if model.chol is None:
        return Kxx
    _, V = _cross_solve(model, flat)  # (t, m*L)
    Vb = V.reshape(-1, m, L)
    C = Kxx - np.einsum("tmi,tmj->mij", Vb, Vb)
    return 0.5 * (C + np.swapaxes(C, 1, 2))


def information_gain(spec: KernelSpec, points: np.ndarray, sigma2: float) -> float:
    """0.5 * log det(I + K / sigma2) over the given points.

    This is the information gain realized by the specific point sequence, a
    lower bound on the maximal gain over all sequences of the same length.
    """
    if not sigma2 > 0:
        raise InputError(f"sigma2 must be positive, got {sigma2}")
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return 0.0
    points = np.atleast_2d(points)
    K = kernel_matrix(spec, points, points)
    M = np.eye(len(points)) + K / sigma2
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0:
        raise NumericalError("information gain matrix not positive definite")
    return 0.5 * float(logdet)
