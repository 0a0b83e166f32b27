"""Matching distances between finite configurations.

Three distances live here: the full matching distance (infinite across different
point counts), the window-localised partial matching distance where points may be
discarded at the window boundary, and the glued distance on a window whose
boundary is collapsed to a single point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .configspace import Configuration
from .errors import InfiniteDistance, OutOfWindow, TooLarge

INFINITE = math.inf

# exhaustive tie-breaking costs O(n^2) extra solves, so it is limited to small problems
LEX_TIEBREAK_MAX = 8
BRUTE_FORCE_MAX = 8


@dataclass(frozen=True)
class MatchPlan:
    pairs: tuple[tuple[int, int], ...]
    killed_left: tuple[int, ...] = ()
    killed_right: tuple[int, ...] = ()


def _as_points(gamma) -> np.ndarray:
    """Return an (n, d) array of points from a Configuration or array-like."""
    if isinstance(gamma, Configuration):
        arr = gamma.array
    else:
        arr = np.asarray(gamma, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("points must be a 1-D sequence or an (n, d) array")
    return arr


def _norms(points: np.ndarray) -> np.ndarray:
    if points.shape[1] == 1:
        return np.abs(points[:, 0])
    return np.linalg.norm(points, axis=1)


def _pairwise_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def solve_assignment(cost: np.ndarray, lexicographic: bool | None = None) -> tuple[np.ndarray, float]:
    """Exact minimum-cost perfect assignment on a square matrix.

    Returns ``(perm, value)`` with row ``i`` assigned to column ``perm[i]``. For
    small problems the lexicographically smallest optimal permutation is returned.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int), 0.0
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(n, dtype=int)
    perm[rows] = cols
    value = float(cost[rows, cols].sum())
    if lexicographic is None:
        lexicographic = n <= LEX_TIEBREAK_MAX
    if not lexicographic or n == 1:
        return perm, value
    return _lexicographic_optimum(cost, value), value


def _lexicographic_optimum(cost: np.ndarray, value: float) -> np.ndarray:
    n = cost.shape[0]
    tol = 1e-12 * max(1.0, abs(value))
    free_rows = list(range(n))
    free_cols = list(range(n))
    fixed = 0.0
    perm = np.empty(n, dtype=int)
    for i in range(n):
        free_rows.remove(i)
        for j in sorted(free_cols):
            rest_cols = [c for c in free_cols if c != j]
            rest = 0.0
            if free_rows:
                sub = cost[np.ix_(free_rows, rest_cols)]
                r, c = linear_sum_assignment(sub)
                rest = float(sub[r, c].sum())
            if fixed + cost[i, j] + rest <= value + tol:
                perm[i] = j
                fixed += cost[i, j]
                free_cols.remove(j)
                break
        else:  # pragma: no cover - the optimal column always exists
            raise RuntimeError("tie-break search lost the optimum")
    return perm


def optimal_matching(gamma, eta, p: float = 2.0) -> tuple[np.ndarray, float]:
    """Optimal permutation ``sigma`` (gamma[sigma[i]] paired with eta[i]) and its p-cost sum."""
    x = _as_points(gamma)
    y = _as_points(eta)
    if len(x) != len(y):
        raise InfiniteDistance(f"point counts differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n == 0:
        return np.zeros(0, dtype=int), 0.0
    if x.shape[1] == 1 and p >= 1:
        # convex cost on the line: sorted order is optimal
        ox = np.argsort(x[:, 0], kind="stable")
        oy = np.argsort(y[:, 0], kind="stable")
        sigma = np.empty(n, dtype=int)
        sigma[oy] = ox
        total = float(np.sum(np.abs(x[sigma, 0] - y[:, 0]) ** p))
        return sigma, total
    dist = np.sqrt(_pairwise_sq(y, x))
    perm, total = solve_assignment(dist**p)
    return perm, total


def matching_distance(gamma, eta, p: float = 2.0) -> float:
    """l^p matching distance; ``INFINITE`` when the point counts differ."""
    if p < 1:
        raise ValueError("exponent p must be at least 1")
    if len(_as_points(gamma)) != len(_as_points(eta)):
        return INFINITE
    _, total = optimal_matching(gamma, eta, p)
    return total ** (1.0 / p)


def glued_distance(x: float, y: float, r: float) -> float:
    """Distance on [-r, r] with both endpoints identified."""
    if abs(x) > r or abs(y) > r:
        raise OutOfWindow(f"points {x}, {y} outside [-{r}, {r}]")
    return min(abs(x - y), (r - abs(x)) + (r - abs(y)))


def glued_distance_array(x: np.ndarray, y: np.ndarray, r: float) -> np.ndarray:
    """Vectorised glued distance; assumes all inputs already lie in [-r, r]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.minimum(np.abs(x - y), (r - np.abs(x)) + (r - np.abs(y)))


def _interior(gamma, r: float) -> np.ndarray:
    pts = _as_points(gamma)
    return pts[_norms(pts) < r]


def partial_matching_plan(gamma, eta, r: float) -> tuple[float, MatchPlan]:
    """Partial matching distance inside the ball of radius r, with its plan.

    Each interior point is either paired with an interior point of the other side
    at cost |x-y|^2 or sent to the boundary at cost (r-|x|)^2. The choice is an
    assignment on an (n+m) x (n+m) matrix whose lower-right block of unused
    slots is free.
    """
    x = _interior(gamma, r)
    y = _interior(eta, r)
    n, m = len(x), len(y)
    if n + m == 0:
        return 0.0, MatchPlan(())
    kill_x = (r - _norms(x)) ** 2
    kill_y = (r - _norms(y)) ** 2
    cost = np.zeros((n + m, n + m))
    if n and m:
        cost[:n, :m] = _pairwise_sq(x, y)
    cost[:n, m:] = kill_x[:, None]
    cost[n:, :m] = kill_y[None, :]
    perm, value = solve_assignment(cost, lexicographic=False)
    pairs = tuple((i, int(perm[i])) for i in range(n) if perm[i] < m)
    killed_left = tuple(i for i in range(n) if perm[i] >= m)
    matched_right = {j for _, j in pairs}
    killed_right = tuple(j for j in range(m) if j not in matched_right)
    return math.sqrt(max(value, 0.0)), MatchPlan(pairs, killed_left, killed_right)


def partial_matching_distance(gamma, eta, r: float) -> float:
    return partial_matching_plan(gamma, eta, r)[0]


def brute_force_partial(gamma, eta, r: float) -> float:
    """Exhaustive partial matching distance, independent of the assignment solver.

    Left points are scanned in order; each is either killed or paired with one of
    the still-free right points. The minimum over all such partial injections is
    accumulated by a table indexed by the set of used right points, which visits
    every injection without listing them one by one.
    """
    x = _interior(gamma, r)
    y = _interior(eta, r)
    n, m = len(x), len(y)
    if n > BRUTE_FORCE_MAX or m > BRUTE_FORCE_MAX:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX} points per side, got {n} and {m}")
    kill_x = [float((r - v) ** 2) for v in _norms(x)]
    kill_y = [float((r - v) ** 2) for v in _norms(y)]
    pair = [[float(np.sum((x[i] - y[j]) ** 2)) for j in range(m)] for i in range(n)]

    full = 1 << m
    best = [math.inf] * full
    best[0] = 0.0
    for i in range(n):
        nxt = [math.inf] * full
        for used in range(full):
            base = best[used]
            if base == math.inf:
                continue
            c = base + kill_x[i]
            if c < nxt[used]:
                nxt[used] = c
            for j in range(m):
                bit = 1 << j
                if not used & bit:
                    c = base + pair[i][j]
                    if c < nxt[used | bit]:
                        nxt[used | bit] = c
        best = nxt
    total = math.inf
    for used in range(full):
        if best[used] == math.inf:
            continue
        rest = sum(kill_y[j] for j in range(m) if not used >> j & 1)
        total = min(total, best[used] + rest)
    return math.sqrt(total)


def glued_product_distance(gamma, eta, r: float) -> float:
    """Permutation-minimised root sum of squared glued distances.

    Both configurations are first restricted to the window and must then have the
    same number of points. Computed by enumerating permutations (k <= 8).
    """
    x = _interior(gamma, r)[:, 0]
    y = _interior(eta, r)[:, 0]
    if len(x) != len(y):
        raise InfiniteDistance("glued product distance needs equal counts inside the window")
    if len(x) > BRUTE_FORCE_MAX:
        raise TooLarge("permutation enumeration limited to 8 points")
    g = glued_distance_array(x[:, None], y[None, :], r) ** 2
    best = math.inf
    idx = range(len(y))
    for perm in itertools.permutations(idx):
        best = min(best, sum(g[i, perm[i]] for i in idx))
    return math.sqrt(best) if len(x) else 0.0


def pair_or_kill_distance(gamma, eta, r: float) -> float:
    """Permutation-minimised root sum of min(|x-y|^2, (r-|x|)^2 + (r-|y|)^2).

    On equal window counts this is exactly the partial matching distance: a killed
    point on one side can always be grouped with a killed point on the other.
    """
    x = _interior(gamma, r)[:, 0]
    y = _interior(eta, r)[:, 0]
    if len(x) != len(y):
        raise InfiniteDistance("needs equal counts inside the window")
    if len(x) > BRUTE_FORCE_MAX:
        raise TooLarge("permutation enumeration limited to 8 points")
    direct = (x[:, None] - y[None, :]) ** 2
    killed = (r - np.abs(x))[:, None] ** 2 + (r - np.abs(y))[None, :] ** 2
    g = np.minimum(direct, killed)
    best = math.inf
    idx = range(len(y))
    for perm in itertools.permutations(idx):
        best = min(best, sum(g[i, perm[i]] for i in idx))
    return math.sqrt(best) if len(x) else 0.0


def interpolate(gamma, eta, t: float) -> Configuration:
    """Point on the matching geodesic from gamma (t=0) to eta (t=1)."""
    x = _as_points(gamma)
    y = _as_points(eta)
    if len(x) != len(y):
        raise InfiniteDistance(f"cannot interpolate between {len(x)} and {len(y)} points")
    if x.shape[1] != 1:
        raise ValueError("interpolate returns a line configuration; points must be 1-D")
    sigma, _ = optimal_matching(x, y, 2.0)
    pts = (1.0 - t) * x[sigma, 0] + t * y[:, 0]
    return Configuration(tuple(pts))


def distance_matrix(left: Sequence, right: Sequence, ground: str = "full", r: float | None = None, p: float = 2.0) -> np.ndarray:
    """Matrix of ground distances between two lists of configurations."""
    out = np.empty((len(left), len(right)))
    for i, g in enumerate(left):
        for j, h in enumerate(right):
            if ground == "full":
                out[i, j] = matching_distance(g, h, p)
            elif ground == "partial":
                if r is None:
                    raise ValueError("partial ground needs a radius")
                out[i, j] = partial_matching_distance(g, h, r)
            else:
                raise ValueError(f"unknown ground {ground!r}")
    return out
