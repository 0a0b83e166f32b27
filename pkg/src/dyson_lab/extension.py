"""Parallel extension of symmetric functions on the glued interval.

A symmetric function of k points in [-r, r] (with -r and r identified) is
extended to k + l points. Going down (l < 0) the missing points are placed at
the boundary r. Going up one level, the closest pair of the k + 1 points is
pushed apart along the ray from its midpoint until one of them reaches the
boundary; that point is dropped and the original function is applied to the
remaining k. Iterating gives every upward level.

The construction is piecewise affine. Its pieces are labelled by a branch
signature: at each level, the closest pair and the index that hits the
boundary. Across branch boundaries the extension can jump, so Lipschitz
estimates only compare points that share a signature and stay at least
``TIE_MARGIN`` away from ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateDiagonal, OutOfWindow
from .matching import glued_distance_array

TIE_MARGIN = 1e-9

Signature = Optional[tuple]


def _no_branches(x: np.ndarray) -> Signature:
    return ()


@dataclass(frozen=True)
class SymmetricFunction:
    k: int
    radius: float
    evaluator: Callable[[np.ndarray], float]
    lipschitz: float
    signature: Callable[[np.ndarray], Signature] = field(default=_no_branches)

    def __call__(self, x) -> float:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.k,):
            raise ValueError(f"expected {self.k} coordinates, got shape {arr.shape}")
        if np.any(np.abs(arr) > self.radius):
            raise OutOfWindow(f"coordinates must lie in [-{self.radius}, {self.radius}]")
        return float(self.evaluator(arr))


def closest_pair(x: np.ndarray) -> tuple[int, int, float]:
    """Indices (i < j) of the closest pair, smallest indices first on ties, and its gap."""
    n = len(x)
    best = (0, 1, math.inf)
    for i in range(n):
        for j in range(i + 1, n):
            g = abs(x[i] - x[j])
            if g < best[2]:
                best = (i, j, g)
    return best


def _on_boundary(x: np.ndarray, r: float) -> bool:
    return bool(np.any(np.abs(x) >= r))


def boundary_projection(x, r: float) -> np.ndarray:
    """Where the ray from the nearest diagonal point through x leaves the cube."""
    x = np.array(x, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two coordinates")
    if np.any(np.abs(x) > r):
        raise OutOfWindow(f"coordinates must lie in [-{r}, {r}]")
    if _on_boundary(x, r):
        return x
    i, j, gap = closest_pair(x)
    if gap == 0.0:
        raise DegenerateDiagonal("point lies on the diagonal; the ray direction is undefined")
    hi, lo = (i, j) if x[i] > x[j] else (j, i)
    up = r - x[hi]
    down = x[lo] + r
    s = min(up, down)
    x[hi] += s
    x[lo] -= s
    # pin the coordinate(s) that reached the boundary exactly
    if up <= down:
        x[hi] = r
    if down <= up:
        x[lo] = -r
    return x


def boundary_nearest(x: np.ndarray, r: float) -> int:
    """Coordinate closest to the boundary, largest index on ties."""
    dist = r - np.abs(x)
    best = np.min(dist)
    return int(np.nonzero(dist == best)[0][-1])


def _level_signature(x: np.ndarray, r: float) -> Signature:
    if _on_boundary(x, r):
        return ("boundary", boundary_nearest(x, r))
    n = len(x)
    gaps = sorted((abs(x[a] - x[b]), a, b) for a in range(n) for b in range(a + 1, n))
    if len(gaps) > 1 and gaps[1][0] - gaps[0][0] < TIE_MARGIN:
        return None
    _, i, j = gaps[0]
    mid = 0.5 * (x[i] + x[j])
    if abs(mid) < TIE_MARGIN:
        return None
    hit = (i if x[i] > x[j] else j) if mid > 0 else (j if x[i] > x[j] else i)
    return (i, j, hit)


def _reduce(x: np.ndarray, r: float) -> np.ndarray:
    y = boundary_projection(x, r)
    return np.delete(y, boundary_nearest(y, r))


def extend_one_level(u: SymmetricFunction) -> SymmetricFunction:
    r = u.radius

    def evaluator(x: np.ndarray) -> float:
        return u.evaluator(_reduce(x, r))

    def signature(x: np.ndarray) -> Signature:
        here = _level_signature(x, r)
        if here is None:
            return None
        inner = u.signature(_reduce(x, r))
        if inner is None:
            return None
        return (here,) + inner

    return SymmetricFunction(u.k + 1, r, evaluator, math.sqrt(2.0) * u.lipschitz, signature)


def restrict_down(u: SymmetricFunction, drop: int) -> SymmetricFunction:
    """u with its last ``drop`` arguments pinned to the boundary value r."""
    r = u.radius
    pad = np.full(drop, r)

    def evaluator(x: np.ndarray) -> float:
        return u.evaluator(np.concatenate([x, pad]))

    return SymmetricFunction(u.k - drop, r, evaluator, u.lipschitz)


def extend_parallel(u: SymmetricFunction, l_max: int) -> dict[int, SymmetricFunction]:
    """Levels l = -k .. l_max of the parallel extension."""
    if l_max > 4:
        raise ValueError("levels above 4 are not supported")
    family = {0: u}
    for drop in range(1, u.k + 1):
        family[-drop] = restrict_down(u, drop)
    current = u
    for level in range(1, l_max + 1):
        current = extend_one_level(current)
        family[level] = current
    return family


def glued_product_metric(r: float) -> Callable[[np.ndarray, np.ndarray], float]:
    def metric(x: np.ndarray, y: np.ndarray) -> float:
        return float(np.sqrt(np.sum(glued_distance_array(x, y, r) ** 2)))

    return metric


def _wrap(x: np.ndarray, r: float) -> np.ndarray:
    """Map onto the circle of circumference 2r represented by [-r, r)."""
    return (x + r) % (2.0 * r) - r


@dataclass(frozen=True)
class LipschitzEstimate:
    value: float
    pairs_used: int
    pairs_drawn: int


def empirical_lipschitz_detail(f, metric, n_pairs: int, rng, n: int | None = None, r: float | None = None) -> LipschitzEstimate:
    """Max ratio |f(x) - f(y)| / metric(x, y) over sampled pairs in the same branch.

    Pairs alternate between independent uniform draws and local perturbations
    at log-uniform scales between 1e-4 r and r; drawing stops once ``n_pairs`` comparable pairs have
    been seen or after 50 * n_pairs attempts.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be positive")
    g = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    n = n if n is not None else f.k
    r = r if r is not None else f.radius
    sig = getattr(f, "signature", _no_branches)
    best = 0.0
    used = drawn = 0
    while used < n_pairs and drawn < 50 * n_pairs:
        drawn += 1
        x = g.uniform(-r, r, n)
        if drawn % 2:
            y = g.uniform(-r, r, n)
        else:
            # unit direction and a scale floor keep cancellation error near 1e-11
            step = g.standard_normal(n)
            scale = r * 10.0 ** g.uniform(-4, 0)
            y = _wrap(x + scale * step / np.linalg.norm(step), r)
        sx = sig(x)
        if sx is None or sx != sig(y):
            continue
        d = metric(x, y)
        if d <= 0:
            continue
        used += 1
        best = max(best, abs(f.evaluator(x) - f.evaluator(y)) / d)
    return LipschitzEstimate(best, used, drawn)


def empirical_lipschitz(f, metric, n_pairs: int, rng, n: int | None = None, r: float | None = None) -> float:
    return empirical_lipschitz_detail(f, metric, n_pairs, rng, n, r).value


def sine_sum(k: int, r: float = 1.0) -> SymmetricFunction:
    """sum_i (r/pi) sin(pi x_i / r); Lipschitz sqrt(k) in the glued product metric."""
    c = math.pi / r
    return SymmetricFunction(k, r, lambda x: float(np.sum(np.sin(c * x)) / c), math.sqrt(k))


def sine_of_sum(k: int, r: float = 1.0) -> SymmetricFunction:
    """(r / (pi sqrt k)) sin(pi sum_i x_i / r); Lipschitz 1."""
    c = math.pi / r
    return SymmetricFunction(k, r, lambda x: float(math.sin(c * np.sum(x)) / (c * math.sqrt(k))), 1.0)


def glued_distance_sum(k: int, centre: float, r: float = 1.0) -> SymmetricFunction:
    """sum_i glued(x_i, centre); Lipschitz sqrt(k)."""
    return SymmetricFunction(k, r, lambda x: float(np.sum(glued_distance_array(x, centre, r))), math.sqrt(k))


def test_function_bank(k: int, r: float = 1.0) -> list[tuple[str, SymmetricFunction]]:
    return [
        ("sine_sum", sine_sum(k, r)),
        ("sine_of_sum", sine_of_sum(k, r)),
        ("glued_distance_sum", glued_distance_sum(k, 0.3 * r, r)),
    ]


@dataclass(frozen=True)
class LadderRow:
    function: str
    k: int
    level: int
    estimate: float
    bound: float
    pairs_used: int

    @property
    def ok(self) -> bool:
        return self.estimate <= self.bound + 1e-9


def lipschitz_ladder(k: int, l_max: int, n_pairs: int, rng, r: float = 1.0) -> list[LadderRow]:
    g = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    rows = []
    metric = glued_product_metric(r)
    for name, u in test_function_bank(k, r):
        for level, f in sorted(extend_parallel(u, l_max).items()):
            if f.k == 0:
                continue
            est = empirical_lipschitz_detail(f, metric, n_pairs, g)
            bound = u.lipschitz * (2.0 ** (level / 2.0) if level > 0 else 1.0)
            rows.append(LadderRow(name, k, level, est.value, bound, est.pairs_used))
    return rows
