"""Empirical distribution summaries and Kolmogorov-Smirnov statistics.

p-values come from the asymptotic Kolmogorov distribution evaluated at
``sqrt(n_eff) * D`` with ``n_eff = n1 n2 / (n1 + n2)`` (or ``n`` for the
one-sample test).  Both the alternating series (used for ``lambda >= 1``) and
the Jacobi-theta form (used below 1) are truncated at 100 terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SERIES_TERMS = 100


class ContractError(ValueError):
    """A caller-supplied function broke its documented contract."""


@dataclass(frozen=True)
class KsReport:
    statistic: float
    p_value: float
    n1: int
    n2: int
    mode: str

    @property
    def effective_size(self) -> float:
        if self.mode == "one-sample-vs-cdf":
            return float(self.n1)
        return self.n1 * self.n2 / (self.n1 + self.n2)


@dataclass(eq=False)
class EcdfSummary:
    sorted_sample: np.ndarray = field(repr=False)

    @classmethod
    def from_sample(cls, sample) -> "EcdfSummary":
        a = np.sort(np.asarray(sample, dtype=float).ravel())
        if a.size == 0:
            raise ValueError("empty sample")
        return cls(a)

    @property
    def n(self) -> int:
        return self.sorted_sample.size

    def quantile(self, p):
        return np.quantile(self.sorted_sample, p)

    def cdf(self, x):
        return np.searchsorted(self.sorted_sample, x, side="right") / self.n

    def __repr__(self) -> str:
        return f"EcdfSummary(n={self.n})"


def kolmogorov_sf(lam: float) -> float:
    """``P(K > lam)`` for the Kolmogorov distribution."""
    lam = float(lam)
    if lam <= 0.0:
        return 1.0
    k = np.arange(1, SERIES_TERMS + 1, dtype=float)
    if lam < 1.0:
        terms = np.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8 * lam * lam))
        cdf = math.sqrt(2 * math.pi) / lam * math.fsum(terms)
        sf = 1.0 - cdf
    else:
        signs = np.where(k % 2 == 1, 1.0, -1.0)
        sf = 2.0 * math.fsum(signs * np.exp(-2.0 * k * k * lam * lam))
    return min(1.0, max(0.0, sf))


def _as_sample(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise ValueError(f"{name} is empty")
    if np.isnan(a).any():
        raise ValueError(f"{name} contains NaN")
    return a


def ks_two_sample(a, b) -> KsReport:
    """Two-sample KS statistic (exact sup of the ECDF difference) and p-value."""
    a = np.sort(_as_sample(a, "first sample"))
    b = np.sort(_as_sample(b, "second sample"))
    n1, n2 = a.size, b.size
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / n1
    fb = np.searchsorted(b, pooled, side="right") / n2
    d = float(np.max(np.abs(fa - fb)))
    p = kolmogorov_sf(math.sqrt(n1 * n2 / (n1 + n2)) * d)
    return KsReport(d, p, n1, n2, "two-sample")


def ks_vs_cdf(a, cdf: Callable) -> KsReport:
    """One-sample KS statistic of ``a`` against the continuous CDF ``cdf``."""
    x = np.sort(_as_sample(a, "sample"))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    if f.shape != x.shape:
        f = np.array([float(cdf(v)) for v in x])
    if np.isnan(f).any() or f.min() < 0.0 or f.max() > 1.0:
        raise ContractError("cdf returned values outside [0, 1]")
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    return KsReport(d, kolmogorov_sf(math.sqrt(n) * d), n, 0, "one-sample-vs-cdf")
