"""The maximum process of fractional Brownian motion with shot noise.

``Z_t = sup_{s<=t} (B_s + kappa^H sum_i eta_i 1{U_i = s})`` is sampled on a
uniform grid from an fBm path and the ``k`` largest Poisson points, and its
finite-dimensional distributions

``P(Z_{t_1} <= x_1, ..., Z_{t_d} <= x_d)
    = E exp(-sum_q int_{t_{q-1}}^{t_q} kappa (m_q - B_t)_+^(-1/H) dt)``,
``m_q = min_{j>=q} x_j``,

are estimated by Monte Carlo with left-endpoint Riemann sums.  A replicate in
which ``B`` reaches the level ``m_q`` anywhere on ``[t_{q-1}, t_q]`` (ties
included) contributes exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from shotmax.fbm import GridPath, Hurst, fbm_path
from shotmax.noise import NoiseParams, PointSet, sample_point_process
from shotmax.rng import (
    LIMIT_PATHS,
    PSI_PATHS,
    SELF_SIMILARITY,
    SeedLike,
    as_seed_sequence,
    child,
    concat,
    generator,
    map_chunks,
    stream,
)
from shotmax.stats import KsReport, ks_two_sample

DEFAULT_K = 64
DEFAULT_GRID = 4096
GAP_FLOOR = 1e-12


class QueryError(ValueError):
    """Invalid finite-dimensional query."""


@dataclass(frozen=True)
class FddQuery:
    times: tuple
    thresholds: tuple

    def __post_init__(self):
        t = tuple(float(v) for v in np.atleast_1d(self.times))
        x = tuple(float(v) for v in np.atleast_1d(self.thresholds))
        if len(t) == 0 or len(t) != len(x):
            raise QueryError("times and thresholds must be nonempty and of equal length")
        if t[0] <= 0.0 or t[-1] > 1.0 or any(b <= a for a, b in zip(t, t[1:])):
            raise QueryError("times must be strictly increasing in (0, 1]")
        if any(math.isnan(v) for v in x):
            raise QueryError("thresholds must not be NaN")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "thresholds", x)

    @property
    def d(self) -> int:
        return len(self.times)

    @property
    def suffix_mins(self) -> tuple:
        return tuple(np.minimum.accumulate(self.thresholds[::-1])[::-1].tolist())

    def grid_indices(self, grid_points: int) -> np.ndarray:
        """Snap the query times to the nearest grid index."""
        idx = np.floor(np.asarray(self.times) * grid_points + 0.5).astype(int)
        if idx[0] < 1 or np.any(np.diff(idx) < 1):
            raise QueryError(
                f"query times {self.times} are not resolved by a grid of {grid_points} points"
            )
        return idx


@dataclass(frozen=True)
class PsiEstimate:
    x: float
    value: float
    std_error: float
    replicates: int
    grid_points: int


@dataclass(frozen=True)
class FddEstimate:
    query: FddQuery = field(repr=False)
    value: float
    std_error: float
    replicates: int
    grid_points: int


def shot_scale(H, kappa: float, theta: float = 1.0) -> float:
    """Height multiplier for positive points: ``(kappa / theta)^H``."""
    return (kappa / theta) ** float(H)


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not kappa > 0 or not math.isfinite(kappa):
        raise ValueError(f"kappa must be positive, got {kappa}")
    return kappa


def limit_path_from(path: GridPath, ps: PointSet, scale: float) -> GridPath:
    """Glue the positive points of ``ps`` onto ``path`` and take the running max.

    Point locations are snapped to the nearest grid index in ``1..n_points``.
    """
    b = path.values
    n = path.n_points
    lifted = b.copy()
    if ps.k:
        keep = ps.epsilon > 0
        idx = np.clip(np.floor(ps.u[keep] * n + 0.5).astype(int), 1, n)
        heights = b[idx] + scale * ps.eta[keep]
        np.maximum.at(lifted, idx, heights)
    return GridPath(np.maximum.accumulate(lifted))


def sample_limit_path(
    H,
    kappa: float,
    k: int = DEFAULT_K,
    n_points: int = DEFAULT_GRID,
    seed: SeedLike = 0,
    theta: float = 1.0,
) -> tuple[GridPath, PointSet]:
    """Sample ``Z`` on ``n_points + 1`` grid values together with its point set.

    The fBm path is drawn first, then the points; the first ``k`` points are
    the same for every larger ``k`` under a fixed seed.  Points with negative
    sign (``theta < 1``) never enter the maximum.  The sup-norm error from the
    omitted points is at most ``ps.truncation_bound(shot_scale(H, kappa, theta))``.
    """
    H = Hurst(H)
    kappa = _check_kappa(kappa)
    k, n_points = int(k), int(n_points)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    rng = generator(seed)
    path = fbm_path(H, n_points, rng)
    ps = sample_point_process(NoiseParams.auto(H, kappa, theta), k, rng)
    return limit_path_from(path, ps, shot_scale(H, kappa, theta)), ps


def sample_limit_values(
    H,
    kappa: float,
    times=(1.0,),
    reps: int = 1000,
    k: int = DEFAULT_K,
    grid_points: int = DEFAULT_GRID,
    seed: SeedLike = 0,
    theta: float = 1.0,
    threads: int = 1,
    stream_key: int = LIMIT_PATHS,
) -> np.ndarray:
    """Values of independent limit paths at ``times``; shape ``(reps, len(times))``.

    Replicate ``r`` uses the stream ``(seed, stream_key, r)``.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    ss = as_seed_sequence(seed)

    def run(chunk: range) -> np.ndarray:
        out = np.empty((len(chunk), times.size))
        for row, r in enumerate(chunk):
            z, _ = sample_limit_path(H, kappa, k, grid_points, stream(ss, stream_key, r), theta)
            out[row] = z.at(times)
        return out

    return concat(map_chunks(run, int(reps), threads=threads)).reshape(-1, times.size)


def _segment_values(
    b: np.ndarray, bounds: np.ndarray, levels: np.ndarray, kappa: float, H: float, grid_points: int
) -> np.ndarray:
    """Per-path ``exp(-kappa * Riemann sum)`` for piecewise-constant levels.

    ``b`` has shape ``(paths, grid_points + 1)``; segment ``q`` covers grid
    indices ``bounds[q]..bounds[q+1]`` (closed for the hitting check, left
    endpoints for the sum) and carries level ``levels[q]``.
    """
    end = bounds[-1]
    level = np.repeat(levels, np.diff(bounds))
    gap = level[None, :] - b[:, :end]
    hit = (gap < GAP_FLOOR).any(axis=1)
    right = levels[None, :] - b[:, bounds[1:]]
    hit |= (right < GAP_FLOOR).any(axis=1)
    gap = np.where(gap < GAP_FLOOR, np.inf, gap)
    integral = np.sum(gap ** (-1.0 / H), axis=1) * (kappa / grid_points)
    out = np.exp(-integral)
    out[hit] = 0.0
    return out


def _mean_and_error(values: np.ndarray) -> tuple[float, float]:
    r = values.size
    mean = math.fsum(values) / r
    if r < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (r - 1)
    return mean, math.sqrt(var / r)


def _fbm_chunk(H, grid_points: int, ss, chunk: range) -> np.ndarray:
    return np.stack([fbm_path(H, grid_points, stream(ss, PSI_PATHS, r)).values for r in chunk])


def _functional_samples(H, kappa, grid_points, replicates, seed, threads, specs) -> np.ndarray:
    """Evaluate each ``(bounds, levels)`` spec on common fBm replicates."""
    ss = as_seed_sequence(seed)

    def run(chunk: range) -> np.ndarray:
        b = _fbm_chunk(H, grid_points, ss, chunk)
        return np.stack(
            [_segment_values(b, bounds, levels, kappa, float(H), grid_points) for bounds, levels in specs],
            axis=1,
        )

    return concat(map_chunks(run, replicates, chunk_size=128, threads=threads))


def _check_mc(replicates: int, grid_points: int) -> tuple[int, int]:
    replicates, grid_points = int(replicates), int(grid_points)
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    return replicates, grid_points


def psi_curve(
    H,
    kappa: float,
    xs,
    replicates: int = 10_000,
    grid_points: int = DEFAULT_GRID,
    seed: SeedLike = 0,
    threads: int = 1,
) -> list[PsiEstimate]:
    """Estimate ``Psi_H(x) = P(Z_1 <= x)`` at every ``x`` on common fBm paths.

    ``x <= 0`` yields value 0 and standard error 0 without sampling.
    """
    H = Hurst(H)
    kappa = _check_kappa(kappa)
    replicates, grid_points = _check_mc(replicates, grid_points)
    xs = [float(x) for x in np.atleast_1d(xs)]
    positive = [x for x in xs if x > 0]
    bounds = np.array([0, grid_points])
    est = {}
    if positive:
        specs = [(bounds, np.array([x])) for x in positive]
        samples = _functional_samples(H, kappa, grid_points, replicates, seed, threads, specs)
        for j, x in enumerate(positive):
            est[x] = _mean_and_error(samples[:, j])
    return [
        PsiEstimate(x, *(est[x] if x > 0 else (0.0, 0.0)), replicates, grid_points) for x in xs
    ]


def psi_estimate(
    H,
    kappa: float,
    x: float,
    replicates: int = 10_000,
    grid_points: int = DEFAULT_GRID,
    seed: SeedLike = 0,
    threads: int = 1,
) -> PsiEstimate:
    return psi_curve(H, kappa, [x], replicates, grid_points, seed, threads)[0]


def fdd_estimate(
    H,
    kappa: float,
    q: FddQuery,
    replicates: int = 10_000,
    grid_points: int = DEFAULT_GRID,
    seed: SeedLike = 0,
    threads: int = 1,
) -> FddEstimate:
    """Monte Carlo estimate of ``P(Z_{t_1} <= x_1, ..., Z_{t_d} <= x_d)``.

    Uses the same fBm replicate streams as :func:`psi_curve`, so ``d = 1``,
    ``t_1 = 1`` reproduces ``psi_estimate`` under the same seed.
    """
    H = Hurst(H)
    kappa = _check_kappa(kappa)
    replicates, grid_points = _check_mc(replicates, grid_points)
    if not isinstance(q, FddQuery):
        raise QueryError("q must be an FddQuery")
    idx = q.grid_indices(grid_points)
    levels = np.asarray(q.suffix_mins)
    if levels[0] <= 0:
        # B_0 = 0 already reaches the first level
        return FddEstimate(q, 0.0, 0.0, replicates, grid_points)
    bounds = np.concatenate([[0], idx])
    samples = _functional_samples(H, kappa, grid_points, replicates, seed, threads, [(bounds, levels)])
    return FddEstimate(q, *_mean_and_error(samples[:, 0]), replicates, grid_points)


def fdd_probability(H, kappa, q, replicates=10_000, grid_points=DEFAULT_GRID, seed=0, threads=1) -> float:
    return fdd_estimate(H, kappa, q, replicates, grid_points, seed, threads).value


def self_similarity_test(
    H,
    kappa: float,
    a: float,
    samples: int = 2000,
    seed: SeedLike = 0,
    k: int = DEFAULT_K,
    grid_points: int = DEFAULT_GRID,
    theta: float = 1.0,
    threads: int = 1,
) -> KsReport:
    """Two-sample KS of ``Z_a`` against ``a^H Z_1`` from independent paths."""
    H = Hurst(H)
    a = float(a)
    if not 0.0 < a <= 1.0:
        raise QueryError("a must lie in (0, 1]")
    if a * grid_points < 1.0:
        raise QueryError(f"a={a} is below the grid resolution 1/{grid_points}")
    ss = as_seed_sequence(seed)
    z_a = sample_limit_values(
        H, kappa, (a,), samples, k, grid_points, child(ss, SELF_SIMILARITY, 0), theta, threads
    )[:, 0]
    z_1 = sample_limit_values(
        H, kappa, (1.0,), samples, k, grid_points, child(ss, SELF_SIMILARITY, 1), theta, threads
    )[:, 0]
    return ks_two_sample(z_a, a ** float(H) * z_1)
