"""Rank-1 lattice construction and packing-radius search.

A rank-1 lattice with integer base vector b and point count N is the set

    x_i = mod(i * b, N) / N,   i = 0 .. N-1,

in [0, 1)^d.  Its packing radius (separation distance) is half the minimum
toroidal norm over the N-1 nonzero lattice points; because the difference of
two lattice points is again a lattice point, this O(N d) formula agrees
exactly with the O(N^2 d) pairwise minimum.

Searches maximize the packing radius:

* ``search_alg6``       prime/offset sweep over cosine-constructed bases
* ``search_alg7``       the same sweep with coordinate refinement applied
                        to every candidate before comparison
* ``search_korobov``    exhaustive sweep over bases (1, a, a^2, ..) mod N
* ``search_scs``        coordinate refinement alone from a fixed start

All distance arithmetic is integer-exact: with m = i*b mod N the squared
toroidal norm is sum_j min(m_j, N-m_j)^2 / N^2, so candidate comparisons
never depend on floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from .errors import InputError
from .inner_opt import Box
from .seeding import generator

_INT_MAX = np.iinfo(np.int64).max


# ---------------------------------------------------------------------------
# integer kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _min_sq(b: np.ndarray, N: int) -> int:
    """Minimum squared integer toroidal norm over nonzero lattice indices.

    Indices i and N-i give mirrored points with equal norms, so scanning
    i = 1 .. N//2 covers every nonzero lattice point.
    """
    d = b.shape[0]
    best = _INT_MAX
    for i in range(1, N // 2 + 1):
        s = 0
        for j in range(d):
            m = (i * b[j]) % N
            dm = m if m <= N - m else N - m
            s += dm * dm
            if s >= best:
                break
        if s < best:
            best = s
    return best


@njit(cache=True)
def _min_sq_cutoff(b: np.ndarray, N: int, cutoff: int) -> int:
    """Like _min_sq but gives up early once the result cannot exceed cutoff.

    The return value is exact whenever it is > cutoff; otherwise it is some
    value <= cutoff, which is all a strict-improvement comparison needs.
    """
    d = b.shape[0]
    best = _INT_MAX
    for i in range(1, N // 2 + 1):
        s = 0
        for j in range(d):
            m = (i * b[j]) % N
            dm = m if m <= N - m else N - m
            s += dm * dm
            if s >= best:
                break
        if s < best:
            best = s
            if best <= cutoff:
                return best
    return best


@njit(cache=True)
def _scs_refine_int(b, N, sweeps, D2, F, S, cur):
    """In-place coordinate refinement of base b; returns final min square.

    Each sweep visits coordinates 2..d in order and replaces the coordinate
    with the value in {1, .., N-1} that maximizes the minimum squared norm,
    keeping the current value on ties.  Values v and N-v generate mirrored
    columns, so only v = 1 .. N//2 is scanned; rows are processed in order
    of increasing partial norm so the scan can stop as soon as no remaining
    row can lower any candidate's minimum.
    """
    d = b.shape[0]
    H = N // 2
    for idx in range(H):
        i = idx + 1
        s = 0
        for j in range(d):
            s += D2[(i * b[j]) % N]
        F[idx] = s
    for _ in range(sweeps):
        improved = False
        for j in range(1, d):
            bj = b[j] % N
            for idx in range(H):
                S[idx] = F[idx] - D2[((idx + 1) * bj) % N]
            order = np.argsort(S)
            for vv in range(H):
                cur[vv] = _INT_MAX
            curmax = _INT_MAX
            for oi in range(H):
                idx = order[oi]
                si = S[idx]
                if si >= curmax:
                    break
                i = idx + 1
                m = 0
                newmax = 0
                for vv in range(H):
                    m += i
                    if m >= N:
                        m -= N
                    val = si + D2[m]
                    if val < cur[vv]:
                        cur[vv] = val
                    if cur[vv] > newmax:
                        newmax = cur[vv]
                curmax = newmax
            # keep-current-on-ties: the incumbent's score is min(F)
            best_val = _INT_MAX
            for idx in range(H):
                if F[idx] < best_val:
                    best_val = F[idx]
            best_v = b[j]
            for vv in range(H):
                if cur[vv] > best_val:
                    best_val = cur[vv]
                    best_v = vv + 1
            if best_v != b[j]:
                b[j] = best_v
                improved = True
                for idx in range(H):
                    F[idx] = S[idx] + D2[((idx + 1) * best_v) % N]
        if not improved:
            break
    best = _INT_MAX
    for idx in range(H):
        if F[idx] < best:
            best = F[idx]
    return best


@njit(cache=True)
def _scan_plain(bases: np.ndarray, N: int) -> tuple[int, int]:
    """Best candidate index and its exact min square, strict-first-best."""
    best_s = -1
    best_c = -1
    for c in range(bases.shape[0]):
        s = _min_sq_cutoff(bases[c], N, best_s)
        if s > best_s:
            best_s = s
            best_c = c
    return best_c, best_s


@njit(cache=True)
def _scan_refined(bases: np.ndarray, N: int, sweeps: int):
    """Refine every candidate, keep the strictly best refined base."""
    n, d = bases.shape
    H = N // 2
    D2 = np.empty(N, np.int64)
    for m in range(N):
        dm = m if m <= N - m else N - m
        D2[m] = dm * dm
    F = np.empty(H, np.int64)
    S = np.empty(H, np.int64)
    cur = np.empty(H, np.int64)
    b = np.empty(d, np.int64)
    best_b = np.zeros(d, np.int64)
    best_s = -1
    for c in range(n):
        for j in range(d):
            b[j] = bases[c, j]
        s = _scs_refine_int(b, N, sweeps, D2, F, S, cur)
        if s > best_s:
            best_s = s
            for j in range(d):
                best_b[j] = b[j]
    return best_b, best_s


# ---------------------------------------------------------------------------
# domain types and elementary operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rank1Lattice:
    """A generated rank-1 lattice point set with its packing radius."""

    base: np.ndarray       # (d,) integers, reduced mod n_points
    n_points: int
    dimension: int
    points: np.ndarray     # (N, d) floats in [0, 1)
    separation: float      # packing radius rho

    def __post_init__(self):
        self.base.setflags(write=False)
        self.points.setflags(write=False)


@dataclass(frozen=True)
class LatticeSearchConfig:
    """Inputs of the prime/offset searches."""

    dimension: int
    n_points: int
    n_primes: int = 50
    scs_iterations: int = 3

    def __post_init__(self):
        if self.dimension < 2:
            raise InputError("search requires dimension >= 2")
        if self.n_points < 2:
            raise InputError("lattice needs at least 2 points")
        if self.n_primes < 1:
            raise InputError("need at least one prime")
        if self.scs_iterations < 0:
            raise InputError("scs_iterations must be nonnegative")

    @property
    def first_prime_floor(self) -> int:
        return 2 * self.dimension + 1


def generate(base: np.ndarray, N: int) -> Rank1Lattice:
    """Build the N-point lattice generated by an integer base vector."""
    if N < 2:
        raise InputError(f"lattice needs at least 2 points, got {N}")
    b = np.atleast_1d(np.asarray(base)).astype(np.int64) % N
    if b.ndim != 1 or b.size < 1:
        raise InputError("base must be a nonempty integer vector")
    pts = (np.arange(N, dtype=np.int64)[:, None] * b[None, :]) % N
    sep = 0.5 * np.sqrt(_min_sq(b, N)) / N
    return Rank1Lattice(b, N, b.size, pts.astype(float) / N, float(sep))


def toroidal_norm(x: np.ndarray) -> float:
    """Euclidean norm on the unit torus of a point in [0, 1)^d.

    Interpreting x as a difference vector, each coordinate contributes
    min(|x_i|, 1 - |x_i|)^2, which is symmetric under x_i -> 1 - x_i.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0) or np.any(x >= 1.0):
        raise InputError("toroidal norm expects coordinates in [0, 1)")
    w = np.minimum(x, 1.0 - x)
    return float(np.sqrt(np.sum(w * w)))


def separation_distance(lat: Rank1Lattice) -> float:
    """Packing radius via the O(N d) single-point formula.

    Exactly equals half the minimum pairwise toroidal distance; a lattice
    with coinciding points (degenerate base) reports 0.
    """
    return 0.5 * np.sqrt(_min_sq(lat.base, lat.n_points)) / lat.n_points


def primes_at_least(floor: int, count: int) -> np.ndarray:
    """The `count` smallest primes >= floor, by deterministic sieve."""
    if count < 1:
        raise InputError("count must be positive")
    lo = max(2, floor)
    # upper bound via prime counting heuristics, grown on demand
    span = max(64, int(count * (np.log(lo + count) + 2) + lo))
    while True:
        sieve = np.ones(span + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, int(span**0.5) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        found = np.flatnonzero(sieve)
        found = found[found >= lo]
        if found.size >= count:
            return found[:count].astype(np.int64)
        span *= 2


def _cosine_bases(p: int, d: int, N: int) -> np.ndarray:
    """All p offset candidates for one prime: b = [1, round(N frac|2cos(2 pi g/p)|)]."""
    q = np.arange(1, d, dtype=np.float64)
    g = np.mod(q[None, :] + np.arange(p, dtype=np.float64)[:, None], p)
    v = np.abs(2.0 * np.cos(2.0 * np.pi * g / p))
    tail = np.floor(N * np.mod(v, 1.0) + 0.5).astype(np.int64)
    return np.hstack([np.ones((p, 1), dtype=np.int64), tail])


def _candidate_bases(cfg: LatticeSearchConfig) -> np.ndarray:
    primes = primes_at_least(cfg.first_prime_floor, cfg.n_primes)
    return np.vstack([_cosine_bases(int(p), cfg.dimension, cfg.n_points) for p in primes])


def search_alg6(cfg: LatticeSearchConfig) -> tuple[Rank1Lattice, np.ndarray]:
    """Prime/offset sweep keeping the strictly best separation."""
    bases = _candidate_bases(cfg)
    best_c, _ = _scan_plain(bases, cfg.n_points)
    lat = generate(bases[best_c], cfg.n_points)
    return lat, lat.base


def search_alg7(cfg: LatticeSearchConfig) -> tuple[Rank1Lattice, np.ndarray]:
    """Prime/offset sweep with coordinate refinement of every candidate.

    Dominates search_alg6 for the same config: each candidate is refined
    before comparison and refinement never lowers the separation.
    """
    sweeps = cfg.scs_iterations
    if sweeps == 0:
        return search_alg6(cfg)
    bases = _candidate_bases(cfg)
    best_b, _ = _scan_refined(bases, cfg.n_points, sweeps)
    lat = generate(best_b, cfg.n_points)
    return lat, lat.base


def search_korobov(
    d: int, N: int, generators: np.ndarray | None = None
) -> tuple[Rank1Lattice, np.ndarray]:
    """Exhaustive search over bases (1, a, a^2, ..., a^(d-1)) mod N."""
    if N < 2:
        raise InputError(f"lattice needs at least 2 points, got {N}")
    if generators is None:
        generators = np.arange(1, N, dtype=np.int64)
    else:
        generators = np.asarray(generators, dtype=np.int64)
        if generators.size == 0:
            raise InputError("empty generator range")
    bases = np.empty((generators.size, d), dtype=np.int64)
    bases[:, 0] = 1
    for j in range(1, d):
        bases[:, j] = (bases[:, j - 1] * generators) % N
    best_c, _ = _scan_plain(bases, N)
    lat = generate(bases[best_c], N)
    return lat, lat.base


def scs_refine(base: np.ndarray, N: int, iterations: int) -> tuple[np.ndarray, float]:
    """Coordinate-sweep refinement of a base vector.

    Runs `iterations` sweeps over coordinates 2..d, each replacing the
    coordinate by the exhaustive best value in {1, .., N-1} (current value
    kept on ties).  The separation never decreases.
    """
    if iterations < 1:
        raise InputError("iterations must be at least 1")
    if N < 2:
        raise InputError(f"lattice needs at least 2 points, got {N}")
    b = np.atleast_1d(np.asarray(base)).astype(np.int64) % N
    H = N // 2
    D2 = np.minimum(np.arange(N, dtype=np.int64), N - np.arange(N, dtype=np.int64)) ** 2
    F = np.empty(H, np.int64)
    S = np.empty(H, np.int64)
    cur = np.empty(H, np.int64)
    s = _scs_refine_int(b, N, iterations, D2, F, S, cur)
    return b, float(0.5 * np.sqrt(s) / N)


def search_scs(
    d: int, N: int, iterations: int = 150, start: np.ndarray | None = None
) -> tuple[Rank1Lattice, np.ndarray]:
    """Pure coordinate-search baseline from a fixed starting base."""
    if start is None:
        start = np.ones(d, dtype=np.int64)
    b, _ = scs_refine(start, N, iterations)
    lat = generate(b, N)
    return lat, lat.base


# ---------------------------------------------------------------------------
# covering radius and resizing
# ---------------------------------------------------------------------------


def covering_radius_estimate(points: np.ndarray, probes: int, seed: int) -> float:
    """Monte-Carlo lower bound of the covering radius under the toroidal metric.

    Maximum over seeded uniform probes of the distance to the nearest set
    point.  Probe sequences are nested in the count, so the estimate is
    nondecreasing in `probes` for a fixed seed.
    """
    if probes < 1:
        raise InputError("need at least one probe")
    pts = np.atleast_2d(np.asarray(points, dtype=float)) % 1.0
    tree = cKDTree(pts, boxsize=1.0)
    rng = generator(seed)
    worst = 0.0
    chunk = 1 << 16
    remaining = probes
    while remaining > 0:
        m = min(chunk, remaining)
        probe = rng.uniform(size=(m, pts.shape[1]))
        dist, _ = tree.query(probe)
        worst = max(worst, float(np.max(dist)))
        remaining -= m
    return worst


def resize_to_box(points: np.ndarray, box: Box) -> np.ndarray:
    """Affine map of unit-cube points into an arbitrary box."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != box.dimension:
        raise InputError(
            f"points have dimension {pts.shape[1]}, box has {box.dimension}"
        )
    return box.lower + pts * box.width
