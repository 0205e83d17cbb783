import numpy as np
import pytest

from batchbo.errors import InputError
from batchbo.inner_opt import Box
from batchbo.lattice import (
    LatticeSearchConfig,
    covering_radius_estimate,
    generate,
    primes_at_least,
    resize_to_box,
    scs_refine,
    search_alg6,
    search_alg7,
    search_korobov,
    search_scs,
    separation_distance,
    toroidal_norm,
)


def _pairwise_separation(base, N):
    """O(N^2 d) oracle over integer coordinates, same final float ops."""
    b = np.asarray(base, dtype=np.int64) % N
    M = (np.arange(N)[:, None] * b[None, :]) % N
    best = None
    for i in range(N):
        for j in range(i + 1, N):
            m = (M[i] - M[j]) % N
            dm = np.minimum(m, N - m)
            s = int(np.sum(dm * dm))
            best = s if best is None else min(best, s)
    return 0.5 * np.sqrt(best) / N


class TestGenerate:
    def test_small_two_dimensional_lattice(self):
        lat = generate(np.array([1, 2]), 5)
        expect = np.array([[0.0, 0.0], [0.2, 0.4], [0.4, 0.8], [0.6, 0.2], [0.8, 0.6]])
        np.testing.assert_allclose(lat.points, expect, atol=0)

    def test_one_dimensional_lattice(self):
        lat = generate(np.array([1]), 4)
        np.testing.assert_allclose(lat.points.ravel(), [0.0, 0.25, 0.5, 0.75], atol=0)

    def test_all_ones_base_is_diagonal(self):
        lat = generate(np.ones(5, dtype=int), 7)
        for row in lat.points:
            assert np.all(row == row[0])

    def test_origin_is_first_point(self):
        lat = generate(np.array([3, 5, 7]), 11)
        np.testing.assert_array_equal(lat.points[0], np.zeros(3))

    def test_coordinates_in_unit_interval(self):
        lat = generate(np.array([2, 9, 4]), 13)
        assert np.all(lat.points >= 0.0) and np.all(lat.points < 1.0)

    def test_too_few_points_rejected(self):
        with pytest.raises(InputError):
            generate(np.array([1, 2]), 1)


class TestToroidalNorm:
    def test_origin(self):
        assert toroidal_norm(np.zeros(3)) == 0.0

    def test_midpoint(self):
        assert toroidal_norm(np.array([0.5, 0.5])) == pytest.approx(np.sqrt(0.5), rel=1e-15)

    def test_hand_computed(self):
        assert toroidal_norm(np.array([0.2, 0.4])) == pytest.approx(np.sqrt(0.2), rel=1e-12)

    def test_wrap_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(0, 1, size=4)
            y = (1.0 - x) % 1.0
            assert toroidal_norm(x) == pytest.approx(toroidal_norm(y), rel=1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            toroidal_norm(np.array([1.0]))
        with pytest.raises(InputError):
            toroidal_norm(np.array([-0.1]))


class TestSeparation:
    def test_small_lattice(self):
        lat = generate(np.array([1, 2]), 5)
        assert lat.separation == pytest.approx(np.sqrt(0.2) / 2, rel=1e-12)
        assert separation_distance(lat) == lat.separation

    def test_one_dimensional(self):
        lat = generate(np.array([1]), 4)
        assert separation_distance(lat) == pytest.approx(0.125, abs=0)

    def test_two_point_diagonal(self):
        lat = generate(np.array([1, 1]), 2)
        assert separation_distance(lat) == pytest.approx(np.sqrt(0.5) / 2, rel=1e-12)

    def test_matches_pairwise_bruteforce_exactly(self):
        rng = np.random.default_rng(123)
        for _ in range(200):
            d = int(rng.integers(1, 11))
            N = int(rng.integers(2, 201))
            base = rng.integers(0, N, size=d)
            lat = generate(base, N)
            assert separation_distance(lat) == _pairwise_separation(base, N)

    def test_matches_float_toroidal_pipeline(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            d = int(rng.integers(1, 5))
            N = int(rng.integers(2, 40))
            base = rng.integers(0, N, size=d)
            lat = generate(base, N)
            best = np.inf
            for i in range(N):
                for j in range(i + 1, N):
                    diff = np.abs(lat.points[i] - lat.points[j]) % 1.0
                    best = min(best, toroidal_norm(diff))
            assert separation_distance(lat) == pytest.approx(0.5 * best, rel=1e-12)

    def test_degenerate_base_reports_zero(self):
        # base sharing a factor with N duplicates points
        lat = generate(np.array([2, 2]), 4)
        assert separation_distance(lat) == 0.0


class TestPrimes:
    def test_first_primes_from_floor(self):
        np.testing.assert_array_equal(primes_at_least(21, 5), [23, 29, 31, 37, 41])
        np.testing.assert_array_equal(primes_at_least(2, 4), [2, 3, 5, 7])

    def test_large_count(self):
        ps = primes_at_least(101, 50)
        assert len(ps) == 50 and ps[0] == 101
        for p in ps:
            assert all(p % k for k in range(2, int(p**0.5) + 1))


class TestSearches:
    def test_alg6_deterministic(self):
        cfg = LatticeSearchConfig(dimension=4, n_points=64, n_primes=5)
        lat1, b1 = search_alg6(cfg)
        lat2, b2 = search_alg6(cfg)
        np.testing.assert_array_equal(b1, b2)
        assert lat1.separation == lat2.separation

    def test_korobov_small_case_matches_bruteforce(self):
        d, N = 2, 5
        lat, base = search_korobov(d, N)
        best = -1.0
        for a in range(1, N):
            b = np.array([1, a]) % N
            s = separation_distance(generate(b, N))
            if s > best:
                best = s
        assert lat.separation == best

    def test_korobov_base_form(self):
        lat, base = search_korobov(4, 17)
        a = base[1]
        np.testing.assert_array_equal(base, [1, a, (a * a) % 17, (a * a * a) % 17])

    def test_alg7_dominates_alg6_small(self):
        for d, N in [(2, 16), (3, 32), (5, 50)]:
            cfg = LatticeSearchConfig(dimension=d, n_points=N, n_primes=3, scs_iterations=3)
            lat6, _ = search_alg6(cfg)
            lat7, _ = search_alg7(cfg)
            assert lat7.separation >= lat6.separation

    def test_alg7_zero_sweeps_is_alg6(self):
        cfg = LatticeSearchConfig(dimension=3, n_points=30, n_primes=3, scs_iterations=0)
        lat7, b7 = search_alg7(cfg)
        lat6, b6 = search_alg6(
            LatticeSearchConfig(dimension=3, n_points=30, n_primes=3)
        )
        np.testing.assert_array_equal(b7, b6)

    def test_alg7_at_least_best_korobov_tiny(self):
        cfg = LatticeSearchConfig(dimension=2, n_points=16, n_primes=3, scs_iterations=3)
        lat7, _ = search_alg7(cfg)
        korobov_best = max(
            separation_distance(generate(np.array([1, a]), 16)) for a in range(1, 16)
        )
        assert lat7.separation >= korobov_best

    def test_prime_floor(self):
        cfg = LatticeSearchConfig(dimension=10, n_points=100, n_primes=1)
        assert cfg.first_prime_floor == 21

    def test_invalid_configs(self):
        with pytest.raises(InputError):
            LatticeSearchConfig(dimension=1, n_points=10)
        with pytest.raises(InputError):
            LatticeSearchConfig(dimension=2, n_points=1)
        with pytest.raises(InputError):
            LatticeSearchConfig(dimension=2, n_points=10, n_primes=0)


class TestScsRefine:
    def test_never_decreases_separation(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            d = int(rng.integers(2, 6))
            N = int(rng.integers(8, 60))
            base = rng.integers(0, N, size=d)
            base[0] = 1
            before = separation_distance(generate(base, N))
            refined, after = scs_refine(base, N, iterations=2)
            assert after >= before

    def test_single_sweep_matches_exhaustive_coordinate_update(self):
        # d=2: one sweep updates only coordinate 2 by exhaustive search
        N = 8
        base = np.array([1, 1])
        refined, sep = scs_refine(base, N, iterations=1)
        scores = {}
        for v in range(1, N):
            scores[v] = separation_distance(generate(np.array([1, v]), N))
        best_score = max(scores.values())
        current_score = separation_distance(generate(base, N))
        assert sep == best_score or (sep == current_score and current_score == best_score)
        assert sep == best_score  # exhaustive single-coordinate optimum
        assert scores[int(refined[1])] == best_score

    def test_keeps_current_on_ties(self):
        # starting from an already-optimal coordinate, the base is unchanged
        N = 8
        start = np.array([1, 3])
        refined1, s1 = scs_refine(start, N, iterations=1)
        refined2, s2 = scs_refine(refined1, N, iterations=1)
        if s1 == separation_distance(generate(start, N)):
            np.testing.assert_array_equal(refined1, start % N)
        np.testing.assert_array_equal(refined2, refined1)
        assert s2 == s1

    def test_fixed_point_on_own_output(self):
        rng = np.random.default_rng(5)
        base = rng.integers(0, 40, size=4)
        base[0] = 1
        refined, sep = scs_refine(base, 40, iterations=5)
        refined2, sep2 = scs_refine(refined, 40, iterations=1)
        assert sep2 == sep
        np.testing.assert_array_equal(refined2, refined)

    def test_search_scs_baseline_runs(self):
        lat, base = search_scs(3, 16, iterations=4)
        assert base[0] == 1
        assert lat.separation > 0


class TestCoveringRadius:
    def test_single_origin_point_1d(self):
        est = covering_radius_estimate(np.zeros((1, 1)), probes=100_000, seed=0)
        assert est == pytest.approx(0.5, abs=0.01)

    def test_regular_grid_1d(self):
        pts = np.array([[0.0], [0.25], [0.5], [0.75]])
        est = covering_radius_estimate(pts, probes=100_000, seed=1)
        assert est == pytest.approx(0.125, abs=0.01)
        assert est <= 0.125 + 1e-12  # estimator lower-bounds the truth

    def test_monotone_in_probe_count(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0, 1, size=(30, 2))
        estimates = [
            covering_radius_estimate(pts, probes=n, seed=42)
            for n in (10, 100, 1000, 10_000)
        ]
        assert all(b >= a for a, b in zip(estimates, estimates[1:]))

    def test_lattice_covers_better_than_random_typically(self):
        cfg = LatticeSearchConfig(dimension=2, n_points=100, n_primes=10)
        lat, _ = search_alg6(cfg)
        lat_est = covering_radius_estimate(lat.points, probes=20_000, seed=7)
        wins = 0
        for draw in range(5):
            rnd = np.random.default_rng(100 + draw).uniform(0, 1, size=(100, 2))
            if lat_est < covering_radius_estimate(rnd, probes=20_000, seed=7):
                wins += 1
        assert wins >= 3

    def test_probe_count_validated(self):
        with pytest.raises(InputError):
            covering_radius_estimate(np.zeros((1, 2)), probes=0, seed=0)


class TestResize:
    def test_identity_box(self):
        pts = np.array([[0.1, 0.9], [0.5, 0.5]])
        box = Box.cube(0.0, 1.0, 2)
        np.testing.assert_array_equal(resize_to_box(pts, box), pts)

    def test_center_maps_to_center(self):
        box = Box.cube(-2.0, 2.0, 3)
        out = resize_to_box(np.full((1, 3), 0.5), box)
        np.testing.assert_allclose(out, 0.0, atol=0)

    def test_small_lattice_example(self):
        lat = generate(np.array([1, 2]), 5)
        box = Box.cube(-2.0, 2.0, 2)
        out = resize_to_box(lat.points, box)
        np.testing.assert_allclose(out[1], [-1.2, -0.4], rtol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            resize_to_box(np.zeros((2, 3)), Box.cube(0, 1, 2))
