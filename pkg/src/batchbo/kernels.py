"""Kernel functions and kernel-matrix assembly.

Two stationary ARD kernels are supported: the squared exponential

    k(x, y) = v * exp(-0.5 * sum_d ((x_d - y_d) / l_d)^2)

and Matern 5/2

    k(x, y) = v * (1 + sqrt(5) r + 5 r^2 / 3) * exp(-sqrt(5) r),

with r the lengthscale-scaled Euclidean distance and v the signal variance.
Both satisfy k(x, x) = v exactly, so v <= 1 keeps kernel values within the
unit bound assumed by the confidence-bound regret analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

SQUARED_EXPONENTIAL = "se"
MATERN52 = "matern52"

_FAMILY_ALIASES = {
    "se": SQUARED_EXPONENTIAL,
    "rbf": SQUARED_EXPONENTIAL,
    "squaredexponential": SQUARED_EXPONENTIAL,
    "squared_exponential": SQUARED_EXPONENTIAL,
    "matern52": MATERN52,
    "matern5/2": MATERN52,
}


def _normalize_family(name: str) -> str:
    key = name.strip().lower().replace("-", "")
    if key not in _FAMILY_ALIASES:
        raise InputError(
            f"unknown kernel family {name!r}; expected one of "
            f"{sorted(set(_FAMILY_ALIASES.values()))}"
        )
    return _FAMILY_ALIASES[key]


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus ARD hyperparameters for a fixed input dimension."""

    family: str
    dimension: int
    lengthscales: np.ndarray = field(default=None)  # type: ignore[assignment]
    signal_variance: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", _normalize_family(self.family))
        if self.dimension < 1:
            raise InputError(f"dimension must be positive, got {self.dimension}")
        ls = self.lengthscales
        if ls is None:
            ls = np.ones(self.dimension)
        ls = np.atleast_1d(np.asarray(ls, dtype=float))
        if ls.size == 1 and self.dimension > 1:
            ls = np.full(self.dimension, ls[0])
        if ls.shape != (self.dimension,):
            raise InputError(
                f"expected {self.dimension} lengthscales, got shape {ls.shape}"
            )
        if not np.all(ls > 0):
            raise InputError("lengthscales must be strictly positive")
        if not self.signal_variance > 0:
            raise InputError("signal_variance must be strictly positive")
        ls.setflags(write=False)
        object.__setattr__(self, "lengthscales", ls)
        object.__setattr__(self, "signal_variance", float(self.signal_variance))


def _check_points(spec: KernelSpec, pts: np.ndarray, name: str) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[-1] != spec.dimension:
        raise InputError(
            f"{name} has dimension {pts.shape[-1]}, kernel expects {spec.dimension}"
        )
    return pts


def kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Cross kernel matrix with entry (i, j) = k(A_i, B_j).

    With A is B (or equal contents) the result is symmetric positive
    semidefinite up to roundoff.
    """
    A = _check_points(spec, A, "A")
    B = _check_points(spec, B, "B")
    diff = (A[:, None, :] - B[None, :, :]) / spec.lengthscales
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    if spec.family == SQUARED_EXPONENTIAL:
        k = np.exp(-0.5 * sq)
    else:
        r = np.sqrt(np.maximum(sq, 0.0))
        s5r = np.sqrt(5.0) * r
        k = (1.0 + s5r + (5.0 / 3.0) * sq) * np.exp(-s5r)
    return spec.signal_variance * k


def kernel_eval(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """Scalar kernel value k(x, y)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.shape != (spec.dimension,) or y.shape != (spec.dimension,):
        raise InputError(
            f"points must have dimension {spec.dimension}, "
            f"got {x.shape[0]} and {y.shape[0]}"
        )
    return float(kernel_matrix(spec, x[None, :], y[None, :])[0, 0])


class KernelMixture:
    """Weighted sum of kernel translates, f(x) = sum_i c_i k(z_i, x).

    Functions of this form have an exactly computable squared norm
    c^T K(Z, Z) c in the function space induced by the kernel, which makes
    them useful as synthetic objectives for checking deviation inequalities
    and regret bounds that involve the norm.
    """

    def __init__(self, spec: KernelSpec, anchors: np.ndarray, coefficients: np.ndarray):
        self.spec = spec
        self.anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
        self.coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
        if self.anchors.shape[0] != self.coefficients.shape[0]:
            raise InputError("one coefficient per anchor point required")
        gram = kernel_matrix(spec, self.anchors, self.anchors)
        self.squared_norm = float(self.coefficients @ gram @ self.coefficients)
        if self.squared_norm < 0:
            self.squared_norm = 0.0
        self.norm = float(np.sqrt(self.squared_norm))

    def __call__(self, x: np.ndarray) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        vals = kernel_matrix(self.spec, np.atleast_2d(x), self.anchors) @ self.coefficients
        return float(vals[0]) if single else vals
