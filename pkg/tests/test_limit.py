import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shotmax.fbm import GridPath, fbm_path
from shotmax.limit import (
    FddQuery,
    QueryError,
    _segment_values,
    fdd_estimate,
    limit_path_from,
    psi_curve,
    psi_estimate,
    sample_limit_path,
    sample_limit_values,
    self_similarity_test,
    shot_scale,
)
from shotmax.noise import PointSet
from shotmax.rng import generator


def points(eta, u, eps=None, H=0.5):
    eta = np.asarray(eta, dtype=float)
    eps = np.ones(eta.size, dtype=np.int8) if eps is None else np.asarray(eps, dtype=np.int8)
    return PointSet(eta, np.asarray(u, dtype=float), eps, eta ** (-1 / H), H)


class TestFddQuery:
    @pytest.mark.parametrize(
        "times,x",
        [((), ()), ((0.5,), (1.0, 2.0)), ((0.0,), (1.0,)), ((0.5, 0.5), (1, 1)),
         ((0.7, 0.3), (1, 1)), ((1.2,), (1,)), ((0.5,), (float("nan"),))],
    )
    def test_invalid(self, times, x):
        with pytest.raises(QueryError):
            FddQuery(times, x)

    def test_suffix_minima(self):
        q = FddQuery((0.2, 0.5, 1.0), (3.0, 1.0, 2.0))
        assert q.suffix_mins == (1.0, 1.0, 2.0)
        assert q.d == 3

    def test_grid_snapping(self):
        q = FddQuery((0.25, 1.0), (1, 1))
        np.testing.assert_array_equal(q.grid_indices(8), [2, 8])
        with pytest.raises(QueryError):
            FddQuery((0.01, 0.02), (1, 1)).grid_indices(8)


class TestLimitPath:
    def test_hand_example(self):
        base = GridPath(np.zeros(5))
        ps = points([2.0, 1.0, 0.5], [0.5, 0.1, 0.9], [1, 1, -1])
        z = limit_path_from(base, ps, scale=1.5)
        # u = 0.1 snaps to index 1 (clipped away from 0), u = 0.5 to 2; the
        # negative point is ignored
        np.testing.assert_array_equal(z.values, [0, 1.5, 3, 3, 3])

    def test_shot_scale(self):
        assert shot_scale(0.5, 2.0, 0.5) == pytest.approx(2.0)

    @given(st.integers(0, 2**32), st.floats(0.1, 0.9))
    def test_dominates_fbm_and_nondecreasing(self, seed, H):
        z, ps = sample_limit_path(H, 1.0, k=8, n_points=64, seed=seed)
        assert np.all(np.diff(z.values) >= 0) and z.values[0] == 0.0
        bare, _ = sample_limit_path(H, 1.0, k=0, n_points=64, seed=seed)
        # without points the limit is the running maximum of the same fBm path
        np.testing.assert_array_equal(bare.values, np.maximum.accumulate(fbm_path(H, 64, generator(seed)).values))
        assert np.all(z.values >= bare.values)

    def test_truncation_bound_between_k(self):
        H, kappa = 0.6, 2.0
        for seed in range(30):
            small, ps = sample_limit_path(H, kappa, k=4, n_points=256, seed=seed)
            big, _ = sample_limit_path(H, kappa, k=200, n_points=256, seed=seed)
            gap = np.max(big.values - small.values)
            assert 0.0 <= gap <= ps.truncation_bound(shot_scale(H, kappa)) + 1e-12

    def test_values_shape_and_threads(self):
        a = sample_limit_values(0.5, 1.0, (0.25, 1.0), reps=300, k=8, grid_points=128, seed=4)
        b = sample_limit_values(0.5, 1.0, (0.25, 1.0), reps=300, k=8, grid_points=128, seed=4, threads=3)
        assert a.shape == (300, 2)
        np.testing.assert_array_equal(a, b)
        assert np.all(a[:, 0] <= a[:, 1])


class TestSegmentValues:
    def test_flat_path_gives_frechet(self):
        H, kappa, x, G = 0.4, 1.7, 1.3, 64
        b = np.zeros((1, G + 1))
        v = _segment_values(b, np.array([0, G]), np.array([x]), kappa, H, G)
        assert v[0] == pytest.approx(math.exp(-kappa * x ** (-1 / H)), rel=1e-12)

    def test_matches_loop(self):
        rng = np.random.default_rng(0)
        G, H, kappa = 16, 0.7, 0.8
        b = np.cumsum(rng.normal(0, 0.2, size=(20, G + 1)), axis=1)
        b[:, 0] = 0.0
        bounds, levels = np.array([0, 4, 16]), np.array([0.9, 1.4])
        got = _segment_values(b, bounds, levels, kappa, H, G)
        for path, val in zip(b, got):
            total, hit = 0.0, False
            for q in range(2):
                for i in range(bounds[q], bounds[q + 1] + 1):
                    hit |= path[i] >= levels[q]
                if not hit:
                    for i in range(bounds[q], bounds[q + 1]):
                        total += (levels[q] - path[i]) ** (-1 / H) / G
            assert val == (0.0 if hit else pytest.approx(math.exp(-kappa * total), rel=1e-12))


class TestPsi:
    def test_nonpositive_exact_zero(self):
        est = psi_curve(0.5, 1.0, [-1.0, 0.0, 1.0], replicates=200, grid_points=64)
        assert (est[0].value, est[0].std_error) == (0.0, 0.0)
        assert (est[1].value, est[1].std_error) == (0.0, 0.0)
        assert 0.0 < est[2].value < 1.0 and est[2].std_error > 0

    def test_monotone_common_random_numbers(self):
        xs = [0.1, 0.3, 0.6, 1.2, 2.5, 5.0]
        vals = [e.value for e in psi_curve(0.3, 1.0, xs, replicates=400, grid_points=128, seed=2)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_thread_invariant(self):
        a = psi_curve(0.7, 2.0, [0.5, 1.5], replicates=300, grid_points=64, seed=8)
        b = psi_curve(0.7, 2.0, [0.5, 1.5], replicates=300, grid_points=64, seed=8, threads=4)
        assert a == b

    def test_fdd_single_time_is_psi(self):
        p = psi_estimate(0.5, 1.0, 1.3, replicates=500, grid_points=128, seed=6)
        f = fdd_estimate(0.5, 1.0, FddQuery((1.0,), (1.3,)), replicates=500, grid_points=128, seed=6)
        assert (f.value, f.std_error) == (p.value, p.std_error)

    def test_redundant_constraint_drops_out(self):
        # Z is nondecreasing, so Z_1 <= 1 implies Z_0.5 <= 2
        q2 = FddQuery((0.5, 1.0), (2.0, 1.0))
        q1 = FddQuery((1.0,), (1.0,))
        kw = dict(replicates=300, grid_points=64, seed=1)
        assert fdd_estimate(0.5, 1.0, q2, **kw).value == fdd_estimate(0.5, 1.0, q1, **kw).value

    def test_fdd_nonpositive_level(self):
        assert fdd_estimate(0.5, 1.0, FddQuery((0.5, 1.0), (0.0, 3.0)), 50, 32).value == 0.0

    def test_fdd_decreases_with_more_constraints(self):
        kw = dict(replicates=300, grid_points=64, seed=3)
        one = fdd_estimate(0.5, 1.0, FddQuery((1.0,), (2.0,)), **kw).value
        two = fdd_estimate(0.5, 1.0, FddQuery((0.5, 1.0), (0.8, 2.0)), **kw).value
        assert two <= one

    @pytest.mark.parametrize("kw", [dict(replicates=0), dict(grid_points=1), dict(kappa=0.0)])
    def test_invalid_mc_settings(self, kw):
        args = dict(H=0.5, kappa=1.0, xs=[1.0], replicates=10, grid_points=16) | kw
        with pytest.raises(ValueError):
            psi_curve(**args)


class TestSelfSimilarity:
    def test_rejects_bad_scale(self):
        with pytest.raises(QueryError):
            self_similarity_test(0.5, 1.0, 1.5, samples=10)
        with pytest.raises(QueryError):
            self_similarity_test(0.5, 1.0, 1e-4, samples=10, grid_points=64)

    def test_trivial_scale(self):
        r = self_similarity_test(0.5, 1.0, 1.0, samples=200, grid_points=64)
        assert r.p_value > 1e-4


class TestGridRefinement:
    @pytest.mark.parametrize("H", [0.3, 0.5, 0.7])
    def test_halving_grid_moves_psi_less_than_two_errors(self, H):
        # every other value of a fine fBm path is an exact fBm path on the
        # coarse grid, so the comparison isolates the discretisation error
        G, reps = 2048, 1500
        b = np.stack([fbm_path(H, G, generator(np.random.SeedSequence(21, spawn_key=(r,)))).values
                      for r in range(reps)])
        for x in (0.5, 1.0, 2.0):
            fine = _segment_values(b, np.array([0, G]), np.array([x]), 1.0, H, G)
            coarse = _segment_values(b[:, ::2], np.array([0, G // 2]), np.array([x]), 1.0, H, G // 2)
            se = fine.std(ddof=1) / math.sqrt(reps)
            assert abs(coarse.mean() - fine.mean()) < 2 * se
