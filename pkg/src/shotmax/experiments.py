"""Monte Carlo experiments comparing the discrete maximum process with its limit.

Every experiment is a pure function of ``(cfg, seed)``.  Replicate ``r`` at
walk length ``n`` draws from the stream keyed ``(experiment, n, r)``, so
tables do not depend on the thread count or on which other ``n`` are run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from shotmax.discrete import (
    WalkSpec,
    longest_nonneg_gap,
    max_process,
    one_sided_paths,
    simulate_walk,
    truncated_scaled_path,
    scaled_path,
)
from shotmax.fbm import Hurst
from shotmax.limit import DEFAULT_GRID, DEFAULT_K, sample_limit_values
from shotmax.noise import NoiseParams, sample_perturbation
from shotmax.rng import (
    DISCRETE_EXPERIMENT,
    LEPAGE_DISCRETE,
    LEPAGE_LIMIT,
    LIMIT_PATHS,
    SANDWICH_EXPERIMENT,
    SeedLike,
    as_seed_sequence,
    child,
    concat,
    generator,
    map_chunks,
)
from shotmax.stats import ks_two_sample, ks_vs_cdf

PROBE_TIMES = (0.25, 0.5, 1.0)


@dataclass(frozen=True)
class ModelParams:
    """Model and Monte Carlo settings shared by the experiments.

    ``law=None`` picks pure Pareto noise for ``theta == 1`` and signed noise
    otherwise; ``increments=None`` picks i.i.d. Gaussian steps at ``H = 1/2``
    and exact fGn otherwise.
    """

    H: float = 0.5
    kappa: float = 1.0
    theta: float = 1.0
    law: str | None = None
    negative_tail: str = "light"
    increments: str | None = None
    k: int = DEFAULT_K
    grid_points: int = DEFAULT_GRID
    memory_lags: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "H", Hurst(self.H))
        self.noise()  # validate eagerly
        if int(self.k) < 0:
            raise ValueError("k must be nonnegative")
        if int(self.grid_points) < 2:
            raise ValueError("grid_points must be at least 2")

    def noise(self) -> NoiseParams:
        if self.law is None:
            return NoiseParams.auto(self.H, self.kappa, self.theta, self.negative_tail)
        return NoiseParams(self.H, self.kappa, self.theta, self.law, self.negative_tail)

    def walk(self, n: int) -> WalkSpec:
        inc = self.increments or ("iid-gaussian" if self.H == 0.5 else "fgn")
        return WalkSpec(inc, self.H, n, self.memory_lags)


def _check_reps(reps: int) -> int:
    reps = int(reps)
    if reps < 1:
        raise ValueError(f"reps must be a positive integer, got {reps}")
    return reps


def _check_n_list(n_list) -> list[int]:
    n_list = [int(n) for n in n_list]
    if not n_list or any(n < 1 for n in n_list) or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be a nonempty increasing list of positive integers")
    return n_list


def discrete_samples(
    cfg: ModelParams, n: int, reps: int, seed: SeedLike, times=PROBE_TIMES, threads: int = 1
) -> np.ndarray:
    """``Z_{n,t}`` at ``times`` for ``reps`` independent walks; shape ``(reps, len(times))``.

    The running maximum includes the origin term ``S_0 + Y_0 = 0``.
    """
    reps = _check_reps(reps)
    ss = as_seed_sequence(seed)
    spec, noise = cfg.walk(n), cfg.noise()
    idx = np.floor(np.asarray(times, dtype=float) * n + 1e-9).astype(int)
    scale = float(n) ** (-float(cfg.H))

    def run(chunk: range) -> np.ndarray:
        out = np.empty((len(chunk), idx.size))
        for row, r in enumerate(chunk):
            w = simulate_walk(spec, noise, child(ss, DISCRETE_EXPERIMENT, n, r))
            out[row] = max_process(w, include_origin=True)[idx] * scale
        return out

    return concat(map_chunks(run, reps, threads=threads)).reshape(-1, idx.size)


def limit_samples(cfg: ModelParams, reps: int, seed: SeedLike, times=PROBE_TIMES, threads: int = 1):
    return sample_limit_values(
        cfg.H, cfg.kappa, times, _check_reps(reps), cfg.k, cfg.grid_points,
        child(as_seed_sequence(seed), LIMIT_PATHS), cfg.theta, threads,
    )


def convergence_experiment(
    cfg: ModelParams, n_list, reps: int, seed: SeedLike, times=PROBE_TIMES, threads: int = 1
) -> list[dict]:
    """KS distance between ``Z_{n,t}`` and the limit ``Z_t`` for each ``n``.

    ``ks_statistic``/``p_value`` refer to the terminal time ``t = 1``; the
    ``ks_t=...`` entries give the two-sample statistic at every probe time
    against the same sample of limit paths.
    """
    n_list = _check_n_list(n_list)
    reps = _check_reps(reps)
    times = tuple(float(t) for t in times)
    if 1.0 not in times:
        times = times + (1.0,)
    limit = limit_samples(cfg, reps, seed, times, threads)
    rows = []
    for n in n_list:
        disc = discrete_samples(cfg, n, reps, seed, times, threads)
        per_time = [ks_two_sample(disc[:, j], limit[:, j]) for j in range(len(times))]
        final = per_time[times.index(1.0)]
        row = {"n": n, "ks_statistic": final.statistic, "p_value": final.p_value, "reps": reps}
        for t, rep in zip(times, per_time):
            row[f"ks_t={t:g}"] = rep.statistic
        rows.append(row)
    return rows


def limit_rank_cdf(cfg: ModelParams, rank: int):
    """CDF of ``kappa^H Gamma_rank^-H``: ``P(Gamma_rank >= kappa x^(-1/H))``."""

    def cdf(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = gammaincc(rank, cfg.kappa * x[pos] ** (-1.0 / float(cfg.H)))
        return out

    return cdf


def lepage_check(cfg: ModelParams, n: int, k: int, reps: int, seed: SeedLike, threads: int = 1) -> list[dict]:
    """Compare the top ``k`` order statistics ``Y_{i,n} / n^H`` with ``kappa^H Gamma_i^-H``."""
    n, k = int(n), int(k)
    reps = _check_reps(reps)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n={n}]")
    noise = cfg.noise()
    ss = as_seed_sequence(seed)
    H = float(cfg.H)
    scale = float(n) ** (-H)

    def run(chunk: range) -> np.ndarray:
        out = np.empty((len(chunk), k))
        for row, r in enumerate(chunk):
            y = sample_perturbation(noise, generator(child(ss, LEPAGE_DISCRETE, n, r)).random(n))
            top = np.partition(y, n - k)[n - k :]
            out[row] = np.sort(top)[::-1] * scale
        return out

    disc = concat(map_chunks(run, reps, threads=threads)).reshape(-1, k)
    gam = np.stack(
        [np.cumsum(generator(child(ss, LEPAGE_LIMIT, r)).standard_exponential(k)) for r in range(reps)]
    )
    lim = cfg.kappa**H * gam ** (-H)
    rows = []
    for i in range(k):
        two = ks_two_sample(disc[:, i], lim[:, i])
        one = ks_vs_cdf(disc[:, i], limit_rank_cdf(cfg, i + 1))
        rows.append(
            {
                "rank": i + 1,
                "ks_statistic": two.statistic,
                "p_value": two.p_value,
                "ks_vs_limit_cdf": one.statistic,
                "p_value_vs_limit_cdf": one.p_value,
                "mean_scaled": float(np.mean(disc[:, i])),
                "mean_limit": float(np.mean(lim[:, i])),
                "reps": reps,
            }
        )
    return rows


def sandwich_samples(cfg: ModelParams, n: int, reps: int, seed: SeedLike, threads: int = 1) -> np.ndarray:
    """Per replicate: ``sup_t (Z^0 - Z^-inf)``, sandwich violations and the longest gap.

    Returns an array of shape ``(reps, 3)``.
    """
    reps = _check_reps(reps)
    ss = as_seed_sequence(seed)
    spec, noise = cfg.walk(n), cfg.noise()

    def run(chunk: range) -> np.ndarray:
        out = np.empty((len(chunk), 3))
        for row, r in enumerate(chunk):
            w = simulate_walk(spec, noise, child(ss, SANDWICH_EXPERIMENT, n, r))
            z = max_process(w, include_origin=True)
            low, high = one_sided_paths(w, cfg.H)
            zs = scaled_path(z, n, cfg.H).values
            bad = np.any(low.values > zs) or np.any(zs > high.values)
            out[row] = (np.max(high.values - low.values), float(bad), longest_nonneg_gap(w.y))
        return out

    return concat(map_chunks(run, reps, threads=threads)).reshape(-1, 3)


def sandwich_experiment(cfg: ModelParams, n_list, reps: int, seed: SeedLike, threads: int = 1) -> list[dict]:
    """Percentile table of ``sup_t (Z^0_{n,t} - Z^-inf_{n,t})`` across ``n``."""
    n_list = _check_n_list(n_list)
    p = cfg.noise().p_negative
    rows = []
    for n in n_list:
        s = sandwich_samples(cfg, n, reps, seed, threads)
        gap = s[:, 2]
        if 0.0 < p < 1.0:
            gap = gap - math.log(n * (1.0 - p)) / math.log(1.0 / p)
        q25, q75 = np.quantile(gap, [0.25, 0.75])
        rows.append(
            {
                "n": n,
                "q95": float(np.quantile(s[:, 0], 0.95)),
                "mean": float(np.mean(s[:, 0])),
                "max": float(np.max(s[:, 0])),
                "violations": int(s[:, 1].sum()),
                "gap_iqr": float(q75 - q25),
                "reps": int(s.shape[0]),
            }
        )
    return rows


def truncation_check(cfg: ModelParams, n: int, k: int, reps: int, seed: SeedLike) -> dict:
    """Count walks where ``sup|Z_n - Z_n^(k)| > Y_{k+1,n} / n^H`` (nonnegative noise)."""
    noise = cfg.noise()
    if noise.p_negative > 0:
        raise ValueError("the truncation bound is stated for nonnegative noise")
    spec = cfg.walk(n)
    ss = as_seed_sequence(seed)
    violations, worst = 0, -np.inf
    for r in range(_check_reps(reps)):
        w = simulate_walk(spec, noise, child(ss, DISCRETE_EXPERIMENT, n, r))
        full = scaled_path(max_process(w), n, cfg.H).values
        trunc = truncated_scaled_path(w, k, cfg.H).values
        scale = float(n) ** (-float(cfg.H))
        bound = np.sort(w.y[1:])[::-1][k] * scale if k < n else 0.0
        err = np.max(np.abs(full - trunc))
        # the bound is attained with equality whenever the (k+1)-th point sets
        # the maximum, so allow the rounding of S_i + Y_i
        tol = 4 * np.finfo(float).eps * float(np.max(np.abs(w.s) + np.abs(w.y))) * scale
        worst = max(worst, err - bound)
        violations += int(err > bound + tol)
    return {"reps": reps, "violations": violations, "max_excess": float(worst)}
