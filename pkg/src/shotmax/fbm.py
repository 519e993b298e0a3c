"""Exact fractional Gaussian noise and fractional Brownian motion on uniform grids.

Synthesis uses circulant embedding of the fGn autocovariance (Davies-Harte).
When the embedding has eigenvalues below ``-EIG_RTOL * max_eigenvalue`` the
generator falls back to a Cholesky factor of the ``n x n`` Toeplitz covariance,
which is only attempted for ``n <= CHOLESKY_MAX``.

Covariance convention: ``Cov(B_s, B_t) = (s^2H + t^2H - |s - t|^2H) / 2``.
The variant with ``+ |s - t|^2H`` sometimes seen in print is not positive
semidefinite (at H = 1/2 it would give ``Var(B_t - B_s) = -|t - s|``), so the
standard sign is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import cholesky, toeplitz

from shotmax.rng import SeedLike, generator

EIG_RTOL = 1e-8
CHOLESKY_MAX = 4096


class SynthesisError(RuntimeError):
    """Raised when no exact synthesis route is available."""

    def __init__(self, message: str, eigenvalue: float | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class Hurst(float):
    """Hurst index, a float restricted to the open interval (0, 1)."""

    def __new__(cls, value):
        value = float(value)
        if not 0.0 < value < 1.0:
            raise ValueError(f"Hurst index must lie in the open interval (0, 1), got {value}")
        return super().__new__(cls, value)

    @property
    def value(self) -> float:
        return float(self)


@dataclass(eq=False)
class GridPath:
    """Piecewise-constant cadlag path on the grid ``t_j = j / n_points``.

    ``values[j]`` is the value on ``[t_j, t_{j+1})``; ``values[-1]`` is the
    value at ``t = 1``.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("a GridPath needs at least two grid values")

    @property
    def n_points(self) -> int:
        return self.values.size - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) / self.n_points

    def at(self, t):
        """Evaluate the cadlag path at time(s) ``t`` in [0, 1]."""
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("times must lie in [0, 1]")
        idx = np.floor(t * self.n_points + 1e-9).astype(int)
        return self.values[np.minimum(idx, self.n_points)]

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"GridPath(n_points={self.n_points})"


def fbm_covariance(H, s: float, t: float) -> float:
    """Covariance of standard fractional Brownian motion at times ``s`` and ``t``."""
    H = Hurst(H)
    if s < 0 or t < 0:
        raise ValueError("fBm covariance is defined for nonnegative times")
    h2 = 2.0 * H
    return 0.5 * (s**h2 + t**h2 - abs(s - t) ** h2)


def fgn_autocovariance(H, lags) -> np.ndarray:
    """Autocovariance of unit-variance fGn at integer ``lags``."""
    H = Hurst(H)
    k = np.abs(np.asarray(lags, dtype=float))
    h2 = 2.0 * H
    return 0.5 * ((k + 1) ** h2 - 2 * k**h2 + np.abs(k - 1) ** h2)


@lru_cache(maxsize=64)
def _embedding(H: float, n: int, rtol: float):
    """Square-rooted circulant eigenvalues, or None when the embedding fails."""
    gamma = fgn_autocovariance(H, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[n - 1:0:-1]])
    eig = np.fft.fft(row).real
    floor = -rtol * eig.max()
    worst = float(eig.min())
    if worst < floor:
        return None, worst
    eig = np.where(eig < 0.0, 0.0, eig)
    return np.sqrt(eig / row.size), worst


@lru_cache(maxsize=16)
def _cholesky_factor(H: float, n: int) -> np.ndarray:
    return cholesky(toeplitz(fgn_autocovariance(H, np.arange(n))), lower=True)


def sample_fgn(H, n: int, seed: SeedLike, method: str = "auto", rtol: float = EIG_RTOL) -> np.ndarray:
    """Draw ``n`` stationary fGn increments with unit variance.

    Parameters
    ----------
    H : float
        Hurst index.
    n : int
        Number of increments.
    seed : int, SeedSequence or Generator
        Seed token; a ``Generator`` is advanced in place.
    method : {"auto", "circulant", "cholesky"}
        ``"auto"`` tries circulant embedding and falls back to Cholesky.
    rtol : float
        Relative tolerance below which negative embedding eigenvalues are
        clamped to zero.

    Returns
    -------
    numpy.ndarray
        Increments ``X_1..X_n`` with ``Cov(X_i, X_{i+k}) = gamma(k)``.
    """
    H = Hurst(H)
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if method not in ("auto", "circulant", "cholesky"):
        raise ValueError(f"unknown fGn method {method!r}")
    rng = generator(seed)
    if method != "cholesky":
        root, worst = _embedding(float(H), n, rtol)
        if root is not None:
            z = rng.standard_normal((2, root.size))
            return np.fft.fft(root * (z[0] + 1j * z[1])).real[:n]
        if method == "circulant" or n > CHOLESKY_MAX:
            raise SynthesisError(
                f"circulant embedding for H={float(H)}, n={n} has eigenvalue {worst:.3e} "
                f"and n exceeds the Cholesky limit {CHOLESKY_MAX}"
                if n > CHOLESKY_MAX
                else f"circulant embedding has negative eigenvalue {worst:.3e}",
                eigenvalue=worst,
            )
    if n > CHOLESKY_MAX:
        raise SynthesisError(f"Cholesky fallback limited to n <= {CHOLESKY_MAX}, got {n}")
    return _cholesky_factor(float(H), n) @ rng.standard_normal(n)


def fbm_path(H, n_points: int, seed: SeedLike, method: str = "auto") -> GridPath:
    """Fractional Brownian motion on ``j / n_points``, ``j = 0..n_points``."""
    H = Hurst(H)
    n_points = int(n_points)
    if n_points < 1:
        raise ValueError("n_points must be a positive integer")
    x = sample_fgn(H, n_points, seed, method=method)
    values = np.empty(n_points + 1)
    values[0] = 0.0
    np.cumsum(x, out=values[1:])
    values[1:] *= float(n_points) ** (-float(H))
    return GridPath(values)
