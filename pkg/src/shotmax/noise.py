"""Heavy-tailed perturbations, the Poisson point process of shot sizes, and
the Frechet extremal process it generates.

Laws (``u`` is a uniform variate on [0, 1)):

``pure-pareto``
    ``Y = kappa^H (1 - u)^-H``, so ``P(Y > x) = kappa x^(-1/H)`` exactly for
    ``x >= kappa^H``.
``shifted-pareto``
    ``Y = kappa^H ((1 - u)^-H - 1)``, so ``P(Y > x) = (1 + kappa^-H x)^(-1/H)``:
    the same tail constant, reached only asymptotically.
``pareto-with-negative-part``
    With probability ``theta`` a pure Pareto value with constant
    ``kappa0 = kappa / theta``, otherwise a negative value.  The negative part
    is ``-Exp(1)`` (``negative_tail="light"``) or ``-kappa0^H (1 - v)^-H``
    (``negative_tail="heavy"``, a balanced two-sided regularly varying tail).
    The map from ``u`` is the monotone inverse CDF of the mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from shotmax.fbm import Hurst
from shotmax.rng import SeedLike, generator

LAWS = ("pure-pareto", "shifted-pareto", "pareto-with-negative-part")
NEGATIVE_TAILS = ("light", "heavy")


@dataclass(frozen=True)
class NoiseParams:
    H: float
    kappa: float = 1.0
    theta: float = 1.0
    law: str = "pure-pareto"
    negative_tail: str = "light"

    def __post_init__(self):
        object.__setattr__(self, "H", Hurst(self.H))
        if not self.kappa > 0 or not np.isfinite(self.kappa):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.law not in LAWS:
            raise ValueError(f"unknown noise law {self.law!r}; choose from {LAWS}")
        if self.negative_tail not in NEGATIVE_TAILS:
            raise ValueError(f"negative_tail must be one of {NEGATIVE_TAILS}")
        if self.law == "pareto-with-negative-part":
            if not 0.0 < self.theta <= 1.0:
                raise ValueError(f"theta must lie in (0, 1] for signed noise, got {self.theta}")
        elif self.theta != 1.0:
            raise ValueError(f"law {self.law!r} is nonnegative; theta must be 1")

    @property
    def kappa0(self) -> float:
        """Two-sided tail constant, ``kappa / theta``."""
        return self.kappa / self.theta

    @property
    def p_negative(self) -> float:
        return 1.0 - self.theta if self.law == "pareto-with-negative-part" else 0.0

    @classmethod
    def auto(cls, H, kappa=1.0, theta=1.0, negative_tail="light") -> "NoiseParams":
        """Pure Pareto when ``theta == 1``, signed noise otherwise."""
        law = "pure-pareto" if theta == 1.0 else "pareto-with-negative-part"
        return cls(H, kappa, theta, law, negative_tail)


def sample_perturbation(params: NoiseParams, u):
    """Map uniform variate(s) ``u`` in [0, 1) to perturbation value(s)."""
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u >= 1.0)) or np.any(np.isnan(u)):
        raise ValueError("uniform variates must lie in [0, 1)")
    H = float(params.H)
    if params.law == "pure-pareto":
        y = params.kappa**H * (1.0 - u) ** (-H)
    elif params.law == "shifted-pareto":
        y = params.kappa**H * ((1.0 - u) ** (-H) - 1.0)
    else:
        q = 1.0 - params.theta
        scale = params.kappa0**H
        y = np.empty_like(u)
        neg = u < q
        # u -> 0 gives the most negative value so the map stays increasing
        v = np.maximum(u[neg] / q, np.finfo(float).tiny) if q > 0 else u[neg]
        if params.negative_tail == "light":
            y[neg] = np.log(v)
        else:
            y[neg] = -scale * v ** (-H)
        w = (u[~neg] - q) / params.theta
        y[~neg] = scale * (1.0 - w) ** (-H)
    return float(y) if scalar else y


def sample_perturbations(params: NoiseParams, size, seed: SeedLike) -> np.ndarray:
    rng = generator(seed)
    return sample_perturbation(params, rng.random(size))


def max_order_statistic_cdf(params: NoiseParams, n: int, x):
    """Limit law ``exp(-kappa x^(-1/H))`` of ``max_{i<=n} Y_i / n^H``.

    ``n`` is accepted for interface symmetry; the returned value is the
    ``n -> infinity`` limit.  Zero for ``x <= 0``.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-params.kappa * x[pos] ** (-1.0 / float(params.H)))
    return float(out) if scalar else out


@dataclass(eq=False)
class PointSet:
    """The ``k`` largest points of the Poisson process ``{(eta_i, U_i, eps_i)}``.

    ``eta_i = Gamma_i^-H`` with ``Gamma`` the arrival times of a unit-rate
    Poisson process, hence ``eta`` is strictly decreasing.  Every omitted point
    has ``eta < gamma_k^-H``.
    """

    eta: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    epsilon: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    H: float = 0.5

    @property
    def k(self) -> int:
        return self.eta.size

    @property
    def gamma_k(self) -> float:
        return float(self.gamma[-1]) if self.k else 0.0

    def truncation_bound(self, scale: float = 1.0) -> float:
        """Largest possible height ``scale * eta`` of any omitted point."""
        if self.k == 0:
            return np.inf
        return scale * self.gamma_k ** (-float(self.H))

    def __len__(self) -> int:
        return self.k

    def __repr__(self) -> str:
        return f"PointSet(k={self.k}, gamma_k={self.gamma_k:.4g})"


def sample_point_process(params: NoiseParams, k: int, seed: SeedLike) -> PointSet:
    """Draw the ``k`` largest points of the PPP with intensity ``H^-1 x^(-1-1/H) dx du``."""
    k = int(k)
    if k < 0:
        raise ValueError("k must be nonnegative")
    rng = generator(seed)
    # one row per point so the first k points do not depend on k
    draws = rng.random((k, 3))
    gamma = np.cumsum(-np.log1p(-draws[:, 0]))
    u = draws[:, 1]
    signs = np.where(draws[:, 2] < params.theta, 1, -1).astype(np.int8)
    return PointSet(gamma ** (-float(params.H)), u, signs, gamma, float(params.H))


def extremal_process(ps: PointSet, t):
    """``V_t = max{eta_i : U_i <= t}``, zero when no point qualifies."""
    if ps.k == 0:
        raise ValueError("point set is empty")
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    hits = ps.u[None, :] <= t[:, None]
    out = np.where(hits, ps.eta[None, :], 0.0).max(axis=1)
    return float(out[0]) if scalar else out
