"""Optimal transport between equal-size uniform empirical laws on configuration space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .configspace import Configuration, EmpiricalLaw
from .errors import InfiniteDistance, SizeMismatch
from .matching import INFINITE, interpolate, matching_distance, partial_matching_distance, solve_assignment


@dataclass(frozen=True)
class Ground:
    """Ground distance: the full matching distance, or the partial one inside radius r."""

    kind: str = "full"
    radius: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("full", "partial"):
            raise ValueError(f"unknown ground {self.kind!r}")
        if self.kind == "partial" and not (self.radius and self.radius > 0):
            raise ValueError("partial ground needs a positive radius")

    def distance(self, g, h) -> float:
        if self.kind == "full":
            return matching_distance(g, h, 2.0)
        return partial_matching_distance(g, h, self.radius)


FULL = Ground("full")


def partial(r: float) -> Ground:
    return Ground("partial", r)


@dataclass(frozen=True)
class TransportPlan:
    assignment: tuple[int, ...]
    cost: float


def _members(law) -> list:
    if isinstance(law, EmpiricalLaw):
        return list(law.members)
    if isinstance(law, np.ndarray):
        return list(law)
    return [m if isinstance(m, Configuration) else Configuration(tuple(m)) for m in law]


def ground_cost_matrix(A, B, p: float = 2.0, ground: Ground = FULL) -> np.ndarray:
    """Matrix of ground distances raised to the power p."""
    a = _members(A)
    b = _members(B)
    if isinstance(A, np.ndarray) and isinstance(B, np.ndarray) and ground.kind == "full" and A.ndim == 2 and A.shape[1] == B.shape[1]:
        # equal-size labelled states on the line: sorted matching is the plain ell^2 distance
        xa = np.sort(A, axis=1)
        xb = np.sort(B, axis=1)
        d = np.empty((len(xa), len(xb)))
        for start in range(0, len(xa), 256):
            block = xa[start : start + 256]
            d[start : start + 256] = np.sqrt(np.sum((block[:, None, :] - xb[None, :, :]) ** 2, axis=-1))
        return d**p
    out = np.empty((len(a), len(b)))
    for i, g in enumerate(a):
        for j, h in enumerate(b):
            out[i, j] = ground.distance(g, h) ** p
    return out


def _solve(cost: np.ndarray) -> tuple[np.ndarray, float]:
    finite = np.isfinite(cost)
    if not finite.all():
        # feasibility scan: fewest infinite edges any assignment must use
        r, c = linear_sum_assignment((~finite).astype(float))
        if (~finite)[r, c].any():
            return np.arange(cost.shape[0]), INFINITE
        big = (np.sum(cost[finite]) + 1.0) * 2.0
        cost = np.where(finite, cost, big)
    return solve_assignment(cost)


def optimal_plan(A, B, p: float = 2.0, ground: Ground = FULL, cost: np.ndarray | None = None) -> TransportPlan:
    n = len(_members(A))
    if n != len(_members(B)):
        raise SizeMismatch(f"laws have {n} and {len(_members(B))} members")
    cost = ground_cost_matrix(A, B, p, ground) if cost is None else cost
    perm, total = _solve(cost)
    value = INFINITE if math.isinf(total) else (total / n) ** (1.0 / p)
    return TransportPlan(tuple(int(j) for j in perm), value)


def wasserstein(A, B, p: float = 2.0, ground: Ground = FULL) -> float:
    return optimal_plan(A, B, p, ground).cost


def displacement(A, B, t: float) -> EmpiricalLaw:
    """Member-wise matching geodesic along an optimal W2 plan."""
    a = _members(A)
    b = _members(B)
    plan = optimal_plan(A, B, 2.0, FULL)
    if math.isinf(plan.cost):
        raise InfiniteDistance("laws are at infinite distance")
    return EmpiricalLaw(tuple(interpolate(a[i], b[j], t) for i, j in enumerate(plan.assignment)))


def brute_force_wasserstein(A, B, p: float = 2.0, ground: Ground = FULL) -> float:
    """Exhaustive minimum over all assignments (test oracle, N <= 8)."""
    cost = ground_cost_matrix(A, B, p, ground)
    n = cost.shape[0]
    if n > 8:
        raise ValueError("brute force limited to 8 members")
    best = min(sum(cost[i, perm[i]] for i in range(n)) for perm in permutations(range(n)))
    return (best / n) ** (1.0 / p)


def wasserstein_arrays(X: np.ndarray, Y: np.ndarray, p: float = 2.0) -> tuple[float, np.ndarray]:
    """W_p between two (N, k) samples of labelled states, with its assignment."""
    cost = ground_cost_matrix(np.asarray(X), np.asarray(Y), p, FULL)
    r, c = linear_sum_assignment(cost)
    return float(np.mean(cost[r, c])) ** (1.0 / p), c
