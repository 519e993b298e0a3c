"""Distances and regularity statistics for grid step paths.

The Skorohod J1 distance is computed over grid-aligned time changes: a
monotone alignment of the two grids, from ``(a, a)`` to ``(b, b)``, moving
by ``(1, 0)``, ``(0, 1)`` or ``(1, 1)`` per step.  Each aligned pair
``(i, j)`` costs ``max(|t_i - t_j|, |x_i - y_j|)`` and an alignment costs the
largest pair cost; the distance is the cheapest alignment.  The diagonal
alignment is the identity time change, so the result never exceeds the sup
distance.
"""

from __future__ import annotations

import math

import numba
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from shotmax.fbm import GridPath


class ShapeError(ValueError):
    """Paths live on incompatible grids."""


def _grid_steps(delta: float, n: int) -> float:
    # rounding guards against 0.1 * 30 = 3.0000000000000004 style artefacts
    return round(delta * n, 9)


def _index_range(n: int, a: float, b: float) -> tuple[int, int]:
    if not 0.0 <= a < b <= 1.0:
        raise ValueError(f"need 0 <= a < b <= 1, got a={a}, b={b}")
    ia = int(math.floor(round(a * n, 9)))
    ib = int(math.floor(round(b * n, 9)))
    if ib <= ia:
        raise ShapeError(f"[{a}, {b}] contains no grid step at resolution 1/{n}")
    return ia, ib


def refine(x: GridPath, n_points: int) -> GridPath:
    """Re-express a step path on a finer grid whose size is a multiple of its own."""
    if n_points % x.n_points:
        raise ShapeError(f"grid {n_points} does not refine grid {x.n_points}")
    r = n_points // x.n_points
    return GridPath(np.append(np.repeat(x.values[:-1], r), x.values[-1]))


def common_refinement(x: GridPath, y: GridPath) -> tuple[GridPath, GridPath]:
    """Both paths on the coarsest uniform grid containing both grids."""
    if x.n_points == y.n_points:
        return x, y
    n = math.lcm(x.n_points, y.n_points)
    return refine(x, n), refine(y, n)


def sup_distance(x: GridPath, y: GridPath, a: float = 0.0, b: float = 1.0) -> float:
    if x.n_points != y.n_points:
        raise ShapeError(f"grid mismatch: {x.n_points} vs {y.n_points}")
    ia, ib = _index_range(x.n_points, a, b)
    return float(np.max(np.abs(x.values[ia : ib + 1] - y.values[ia : ib + 1])))


@numba.njit(cache=True)
def _alignment_cost(x, y, h):
    n = x.size
    prev = np.empty(n)
    cur = np.empty(n)
    for i in range(n):
        for j in range(n):
            c = max(abs(i - j) * h, abs(x[i] - y[j]))
            if i == 0 and j == 0:
                best = 0.0
            elif i == 0:
                best = cur[j - 1]
            elif j == 0:
                best = prev[j]
            else:
                best = min(prev[j], prev[j - 1], cur[j - 1])
            cur[j] = max(c, best)
        prev, cur = cur, prev
    return prev[n - 1]


def skorohod_j1(x: GridPath, y: GridPath, a: float = 0.0, b: float = 1.0) -> float:
    """J1 distance between step paths restricted to ``[a, b]``.

    Paths on different grids are first refined to a common grid.
    """
    x, y = common_refinement(x, y)
    ia, ib = _index_range(x.n_points, a, b)
    xs = np.ascontiguousarray(x.values[ia : ib + 1])
    ys = np.ascontiguousarray(y.values[ia : ib + 1])
    return float(_alignment_cost(xs, ys, 1.0 / x.n_points))


def uniform_modulus(x: GridPath, delta: float) -> float:
    """Largest ``|x_s - x_t|`` over grid pairs with ``|s - t| <= delta``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    lag = min(int(math.floor(_grid_steps(delta, x.n_points))), x.n_points)
    if lag == 0:
        return 0.0
    windows = sliding_window_view(x.values, lag + 1)
    return float(np.max(windows.max(axis=1) - windows.min(axis=1)))


def max_jump(x: GridPath) -> float:
    """Largest jump ``|x_t - x_{t-}|`` of the step path."""
    return float(np.max(np.abs(np.diff(x.values))))


@numba.njit(cache=True)
def _partition_feasible(v, m, eps):
    # can [0, n) be cut at grid points into pieces of length >= m, each with
    # oscillation <= eps?
    n = v.size
    reach_count = np.zeros(n + 2, dtype=np.int64)  # reachable starts in [0, s)
    reach_count[1] = 1  # start 0 is reachable
    qmax = np.empty(n, dtype=np.int64)
    qmin = np.empty(n, dtype=np.int64)
    hmax = tmax = hmin = tmin = 0
    lo = 0
    reach_end = False
    for g in range(1, n + 1):
        k = g - 1
        while tmax > hmax and v[qmax[tmax - 1]] <= v[k]:
            tmax -= 1
        qmax[tmax] = k
        tmax += 1
        while tmin > hmin and v[qmin[tmin - 1]] >= v[k]:
            tmin -= 1
        qmin[tmin] = k
        tmin += 1
        while v[qmax[hmax]] - v[qmin[hmin]] > eps:
            lo += 1
            if qmax[hmax] < lo:
                hmax += 1
            if qmin[hmin] < lo:
                hmin += 1
        reach = False
        hi = g - m
        if hi >= lo:
            reach = reach_count[hi + 1] - reach_count[lo] > 0
        if g == n:
            reach_end = reach
        reach_count[g + 1] = reach_count[g] + (1 if reach else 0)
    return reach_end


def partition_modulus(x: GridPath, delta: float) -> float:
    """``inf max_i sup_{s,t in [t_{i-1}, t_i)} |x_s - x_t|`` over grid partitions
    of [0, 1] whose intervals are all longer than ``delta``.

    Binary search on the answer with an exact linear-time feasibility check;
    the search runs to adjacent floats, so the result is exactly the optimal
    oscillation.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("partition modulus needs 0 < delta < 1")
    v = np.ascontiguousarray(x.values[:-1])
    m = int(math.floor(_grid_steps(delta, x.n_points))) + 1
    if _partition_feasible(v, m, 0.0):
        return 0.0
    lo, hi = 0.0, float(v.max() - v.min())
    while True:
        mid = lo + (hi - lo) / 2
        if mid <= lo or mid >= hi:
            return hi
        if _partition_feasible(v, m, mid):
            hi = mid
        else:
            lo = mid
