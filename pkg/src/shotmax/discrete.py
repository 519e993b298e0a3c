"""Perturbed random walk ``S_i + Y_i``, its running maximum and the scaled
maximum process ``Z_{n,t} = M_floor(nt) / n^H`` with its truncated and
one-sided variants."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from shotmax.fbm import GridPath, Hurst, sample_fgn
from shotmax.noise import NoiseParams, sample_perturbation
from shotmax.rng import WALK_INCREMENTS, WALK_NOISE, SeedLike, as_seed_sequence, child, generator

INCREMENTS = ("iid-gaussian", "fgn", "linear")


@dataclass(frozen=True)
class WalkSpec:
    """Increment model for ``S_n``.

    ``linear`` is the moving average ``X_t = c * sum_{j=0}^{L} a_j eps_{t-j}``
    with ``a_0 = 1``, ``a_j = j^(H - 3/2)`` and Gaussian innovations, which
    needs ``1/2 < H < 1``.  ``L`` defaults to ``4 n`` and ``c`` is chosen so that
    ``Var(S_n) = n^2H`` exactly for the truncated filter.
    """

    increments: str = "iid-gaussian"
    H: float = 0.5
    n: int = 1024
    memory_lags: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "H", Hurst(self.H))
        if self.increments not in INCREMENTS:
            raise ValueError(f"unknown increments {self.increments!r}; choose from {INCREMENTS}")
        if int(self.n) < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if self.increments == "iid-gaussian" and self.H != 0.5:
            raise ValueError("iid-gaussian increments scale with H = 0.5 only")
        if self.increments == "linear" and not 0.5 < self.H < 1.0:
            raise ValueError("linear long-memory increments need 1/2 < H < 1")

    @property
    def lags(self) -> int:
        return self.memory_lags if self.memory_lags is not None else 4 * self.n


@dataclass(eq=False)
class PerturbedWalk:
    """``s[i] = S_i`` and ``y[i] = Y_i`` for ``i = 0..n`` with ``S_0 = Y_0 = 0``."""

    s: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.s.shape != self.y.shape or self.s.ndim != 1 or self.s.size < 2:
            raise ValueError("s and y must be 1-d arrays of equal length n + 1 >= 2")
        if self.s[0] != 0 or self.y[0] != 0:
            raise ValueError("s[0] and y[0] must be 0")

    @property
    def n(self) -> int:
        return self.s.size - 1

    def __repr__(self) -> str:
        return f"PerturbedWalk(n={self.n})"


@lru_cache(maxsize=32)
def _linear_filter(H: float, n: int, lags: int) -> np.ndarray:
    a = np.ones(lags + 1)
    a[1:] = np.arange(1, lags + 1, dtype=float) ** (H - 1.5)
    # S_n = sum_m b_m eps_m with b_m a window sum of the filter
    c = np.cumsum(np.concatenate([a, np.zeros(n - 1)]))
    b = c.copy()
    b[n:] -= c[:-n]
    return a * (n**H / np.sqrt(np.sum(b * b)))


def sample_increments(spec: WalkSpec, seed: SeedLike) -> np.ndarray:
    if spec.increments == "fgn":
        return sample_fgn(spec.H, spec.n, seed)
    rng = generator(seed)
    if spec.increments == "iid-gaussian":
        return rng.standard_normal(spec.n)
    a = _linear_filter(float(spec.H), spec.n, spec.lags)
    eps = rng.standard_normal(spec.n + spec.lags)
    return fftconvolve(eps, a, mode="valid")


def simulate_walk(spec: WalkSpec, noise: NoiseParams, seed: SeedLike) -> PerturbedWalk:
    """Simulate ``S`` and ``Y`` from disjoint sub-streams of ``seed``."""
    ss = as_seed_sequence(seed)
    x = sample_increments(spec, child(ss, WALK_INCREMENTS))
    rng_y = generator(child(ss, WALK_NOISE))
    s = np.zeros(spec.n + 1)
    np.cumsum(x, out=s[1:])
    y = np.zeros(spec.n + 1)
    y[1:] = sample_perturbation(noise, rng_y.random(spec.n))
    return PerturbedWalk(s, y)


def _running_max(z: np.ndarray, include_origin: bool) -> np.ndarray:
    out = np.empty_like(z)
    out[0] = 0.0
    np.maximum.accumulate(z[1:], out=out[1:])
    if include_origin:
        np.maximum(out, 0.0, out=out)
    return out


def max_process(w: PerturbedWalk, include_origin: bool = False) -> np.ndarray:
    """Running maximum ``M_i = max_{1<=j<=i} (S_j + Y_j)`` with ``M_0 = 0``.

    With ``include_origin=True`` the maximum also runs over ``j = 0``, i.e.
    ``M_i = max_{0<=j<=i} (S_j + Y_j) >= 0``; this is the form the truncation
    and one-sided constructions are stated for.
    """
    return _running_max(w.s + w.y, include_origin)


def scaled_path(m, n: int, H) -> GridPath:
    m = np.asarray(m, dtype=float)
    if m.ndim != 1 or m.size != int(n) + 1:
        raise ValueError(f"expected {int(n) + 1} running-max values, got shape {m.shape}")
    return GridPath(m * float(n) ** (-float(Hurst(H))))


def kth_largest(y: np.ndarray, k: int) -> float:
    return float(np.partition(y, y.size - k)[y.size - k])


def truncated_scaled_path(w: PerturbedWalk, k: int, H, include_origin: bool = False) -> GridPath:
    """Scaled maximum process keeping only perturbations ``>= Y_{k,n}``.

    Entries tied with the k-th largest value are all kept.
    """
    k = int(k)
    if not 1 <= k <= w.n:
        raise ValueError(f"k must lie in [1, n={w.n}], got {k}")
    level = kth_largest(w.y[1:], k)
    y = np.where(w.y >= level, w.y, 0.0)
    y[0] = 0.0
    return scaled_path(_running_max(w.s + y, include_origin), w.n, H)


def one_sided_paths(w: PerturbedWalk, H) -> tuple[GridPath, GridPath]:
    """Return ``(Z^-inf, Z^0)``.

    ``Z^-inf`` runs the maximum of ``(S_i + Y_i) 1{Y_i >= 0}`` and ``Z^0`` that
    of ``S_i + Y_i 1{Y_i >= 0}``, both over ``i = 0..floor(nt)``.  Together
    with ``max_process(w, include_origin=True)`` they satisfy
    ``Z^-inf <= Z <= Z^0`` pathwise.
    """
    nonneg = w.y >= 0
    low = _running_max(np.where(nonneg, w.s + w.y, 0.0), include_origin=True)
    high = _running_max(w.s + np.where(nonneg, w.y, 0.0), include_origin=True)
    return scaled_path(low, w.n, H), scaled_path(high, w.n, H)


def longest_nonneg_gap(y) -> int:
    """Largest gap between consecutive indices ``tau`` with ``y[tau] >= 0``.

    The index set always starts at ``tau_1 = 0`` and is closed by
    ``tau_{K+1} = n``.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need y[0..n] with n >= 1")
    if y[0] < 0:
        raise ValueError("y[0] must be nonnegative")
    n = y.size - 1
    taus = np.append(np.flatnonzero(y >= 0), n)
    return int(np.diff(taus).max())
