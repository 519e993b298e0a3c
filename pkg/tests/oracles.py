"""Brute-force reference implementations used only by the tests."""

import math
from itertools import combinations

import numpy as np


def j1_exhaustive(x, y):
    """Cheapest monotone grid alignment, by enumerating every alignment.

    Depth-first over all lattice paths from (0, 0) to (n, n) with steps
    (1, 0), (0, 1), (1, 1); no memoisation, so it shares nothing with the
    dynamic program under test.  Branches whose running cost already reaches
    the best complete alignment are cut, which never changes the minimum.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size - 1
    h = 1.0 / n
    best = math.inf

    def cost(i, j):
        return max(abs(i - j) * h, abs(x[i] - y[j]))

    stack = [(0, 0, cost(0, 0))]
    while stack:
        i, j, worst = stack.pop()
        if worst >= best:
            continue
        if i == n and j == n:
            best = min(best, worst)
            continue
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a <= n and b <= n:
                stack.append((a, b, max(worst, cost(a, b))))
    return best


def partition_modulus_exhaustive(values, delta):
    """Minimum over every grid partition with all pieces longer than delta."""
    v = np.asarray(values, dtype=float)[:-1]
    n = v.size
    best = math.inf
    inner = range(1, n)
    for r in range(0, n):
        for cuts in combinations(inner, r):
            pts = (0,) + cuts + (n,)
            if any((b - a) <= round(delta * n, 9) for a, b in zip(pts, pts[1:])):
                continue
            osc = max(float(v[a:b].max() - v[a:b].min()) for a, b in zip(pts, pts[1:]))
            best = min(best, osc)
    return best


def random_step_values(rng, n_points, jump_prob=0.4, scale=1.0):
    """Values of a random step path with ``n_points + 1`` grid values."""
    jumps = np.where(rng.random(n_points) < jump_prob, rng.normal(0.0, scale, n_points), 0.0)
    return np.concatenate([[rng.normal()], rng.normal() + np.cumsum(jumps)])


def uniform_modulus_pairs(values, delta):
    v = np.asarray(values, dtype=float)
    n = v.size - 1
    lag = math.floor(round(delta * n, 9))
    best = 0.0
    for i in range(n + 1):
        for j in range(i, min(n, i + lag) + 1):
            best = max(best, abs(v[i] - v[j]))
    return best
