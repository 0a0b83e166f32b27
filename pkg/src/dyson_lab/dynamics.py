"""Adaptive Euler-Maruyama integration of the finite-k Dyson-type SDE.

Full speed is dX = -grad H dt + sqrt(2) dB; half speed is dX = -1/2 grad H dt + dB.
A step is redone as two half steps, with Brownian-bridge refinement of its noise,
whenever it breaks the particle order or some gap (before or after the step) is
below 10 * sqrt(h) * k for the current substep h. Paths are integrated as a batch
array of shape (paths, copies, k): copies share their noise, which realises the
synchronous coupling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .configspace import EmpiricalLaw, WeylPoint
from .errors import SubstepExhausted
from .model import ModelSpec, confinement_grad, grad_hamiltonian, interaction_grad
from ._kernels import ORDER_LOST, integrate_batch
from .sampling import _rng

# re-exported for callers that think of these as dynamics quantities
from .model import hamiltonian, hessian, hessian_min_eigenvalue  # noqa: F401


class Speed(enum.Enum):
    FULL = "full"
    HALF = "half"


@dataclass(frozen=True)
class SdeConfig:
    dt: float = 1e-3
    t_end: float = 1.0
    speed: Speed = Speed.FULL
    max_substeps: int = 30
    literal_confinement: bool = False
    gap_factor: float = 10.0

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.max_substeps < 1:
            raise ValueError("max_substeps must be at least 1")
        if not isinstance(self.speed, Speed):
            object.__setattr__(self, "speed", Speed(str(self.speed).lower()))


@dataclass(frozen=True)
class CoupledTrace:
    times: np.ndarray
    distances: np.ndarray


def drift(model: ModelSpec, x: np.ndarray, cfg: SdeConfig) -> np.ndarray:
    if cfg.literal_confinement:
        # the confinement term doubled relative to the invariant-density drift
        g = interaction_grad(x) + 2.0 * confinement_grad(model, x)
    else:
        g = grad_hamiltonian(model, x, check=False)
    return -g if cfg.speed is Speed.FULL else -0.5 * g


def _noise_scale(cfg: SdeConfig) -> float:
    return math.sqrt(2.0) if cfg.speed is Speed.FULL else 1.0


def _min_gap(x: np.ndarray) -> np.ndarray:
    """Smallest gap per path over all copies; +inf for one particle."""
    if x.shape[-1] < 2:
        return np.full(x.shape[0], np.inf)
    return np.min(x[..., :-1] - x[..., 1:], axis=(-1, -2))


def _advance(model: ModelSpec, x: np.ndarray, dw: np.ndarray, h: float, cfg: SdeConfig, g: np.random.Generator) -> np.ndarray:
    """Move batch x (n, m, k) across one base step of length h with increments dw (n, k).

    Rejected segments are split in two, the second half going under the first on
    a per-path stack, so each path walks its own halving tree in time order while
    all paths share one vectorised update per iteration.
    """
    n, _, k = x.shape
    depth_cap = cfg.max_substeps
    x = x.copy()
    stack_dw = np.empty((n, depth_cap + 2, k))
    stack_h = np.empty((n, depth_cap + 2))
    stack_depth = np.zeros((n, depth_cap + 2), dtype=int)
    stack_dw[:, 0] = dw
    stack_h[:, 0] = h
    size = np.ones(n, dtype=int)
    active = np.arange(n)
    sigma = _noise_scale(cfg)
    while active.size:
        top = size[active] - 1
        seg_dw = stack_dw[active, top]
        seg_h = stack_h[active, top]
        seg_depth = stack_depth[active, top]
        xa = x[active]
        new = xa + seg_h[:, None, None] * drift(model, xa, cfg) + sigma * seg_dw[:, None, :]
        threshold = cfg.gap_factor * np.sqrt(seg_h) * model.k
        gap_new = _min_gap(new)
        ordered = gap_new > 0
        ok = ordered & (gap_new >= threshold) & (_min_gap(xa) >= threshold)
        exhausted = ~ok & (seg_depth >= depth_cap)
        if np.any(exhausted & ~ordered):
            raise SubstepExhausted(f"order still violated after {depth_cap} halvings")
        done = ok | exhausted
        x[active[done]] = new[done]
        size[active[done]] -= 1
        split = ~done
        if split.any():
            idx = active[split]
            pos = top[split]
            half = seg_h[split] / 2.0
            z = g.standard_normal((idx.size, k))
            first = 0.5 * seg_dw[split] + np.sqrt(half / 2.0)[:, None] * z
            second = seg_dw[split] - first
            stack_dw[idx, pos] = second
            stack_dw[idx, pos + 1] = first
            stack_h[idx, pos] = half
            stack_h[idx, pos + 1] = half
            stack_depth[idx, pos] = seg_depth[split] + 1
            stack_depth[idx, pos + 1] = seg_depth[split] + 1
            size[idx] += 1
        active = active[size[active] > 0]
    return x


def step(model: ModelSpec, w, dt: float, noise: np.ndarray, cfg: SdeConfig, rng=None) -> WeylPoint:
    """One adaptive step; ``noise`` is the Brownian increment over dt (variance dt)."""
    x = np.asarray(getattr(w, "coords", w), dtype=float).reshape(1, 1, -1)
    dw = np.asarray(noise, dtype=float).reshape(1, -1)
    out = _advance(model, x, dw, dt, cfg, _rng(rng if rng is not None else 0))
    return WeylPoint(tuple(out[0, 0]))


def _grid(t: float, dt: float) -> tuple[int, float]:
    n = int(math.ceil(t / dt - 1e-9)) if t > 0 else 0
    return n, (t / n if n else 0.0)


def integrate(model: ModelSpec, x0: np.ndarray, t: float, cfg: SdeConfig, rng, record: bool = False):
    """Integrate a batch (n, m, k) to time t with the compiled kernel.

    With ``record`` the per-step ell^2 distance between copy 0 and copy 1 is also
    returned as an array (steps + 1, n).
    """
    g = _rng(rng)
    x = np.array(x0, dtype=float)
    if x.ndim == 2:
        x = x[:, None, :]
    x = np.ascontiguousarray(x)
    n_steps, h = _grid(t, cfg.dt)
    trace = np.empty((n_steps + 1 if record else 0, x.shape[0]))
    scale = 1.0 if cfg.speed is Speed.FULL else 0.5
    status = integrate_batch(
        x, n_steps, h, _noise_scale(cfg), scale, model.confinement_curvature,
        2.0 if cfg.literal_confinement else 1.0, model.center, cfg.gap_factor, cfg.max_substeps, g, trace,
    )
    if status == ORDER_LOST:
        raise SubstepExhausted(f"order still violated after {cfg.max_substeps} halvings")
    if record:
        return x, trace
    return x


def evolve(model: ModelSpec, w0, t: float, cfg: SdeConfig, rng) -> WeylPoint:
    x = np.asarray(getattr(w0, "coords", w0), dtype=float).reshape(1, 1, -1)
    out = integrate(model, x, t, cfg, rng)
    return WeylPoint(tuple(out[0, 0]))


def evolve_batch(model: ModelSpec, x0: np.ndarray, t: float, cfg: SdeConfig, rng) -> np.ndarray:
    """Evolve independent paths; x0 has shape (n, k)."""
    return integrate(model, np.asarray(x0, dtype=float)[:, None, :], t, cfg, rng)[:, 0, :]


def evolve_coupled(model: ModelSpec, w0, v0, t: float, cfg: SdeConfig, rng) -> CoupledTrace:
    x = np.stack([np.asarray(getattr(w0, "coords", w0), dtype=float), np.asarray(getattr(v0, "coords", v0), dtype=float)])
    _, trace = integrate(model, x[None], t, cfg, rng, record=True)
    n_steps, h = _grid(t, cfg.dt)
    return CoupledTrace(np.arange(n_steps + 1) * h, trace[:, 0])


def evolve_coupled_batch(model: ModelSpec, x0: np.ndarray, y0: np.ndarray, t: float, cfg: SdeConfig, rng, record: bool = False):
    """Synchronously coupled pairs; returns terminal (x, y) and optionally the distance trace."""
    pair = np.stack([np.asarray(x0, dtype=float), np.asarray(y0, dtype=float)], axis=1)
    if record:
        out, trace = integrate(model, pair, t, cfg, rng, record=True)
        return out[:, 0], out[:, 1], trace
    out = integrate(model, pair, t, cfg, rng)
    return out[:, 0], out[:, 1]


def evolve_ensemble(model: ModelSpec, law: EmpiricalLaw | Sequence, t: float, cfg: SdeConfig, rng) -> EmpiricalLaw:
    """Evolve every member of a law of labelled states; members are stored decreasing."""
    members = [np.sort(np.asarray(getattr(m, "points", m), dtype=float))[::-1] for m in law]
    out = evolve_batch(model, np.stack(members), t, cfg, rng)
    return EmpiricalLaw.from_arrays(out)
