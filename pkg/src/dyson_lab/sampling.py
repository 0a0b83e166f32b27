"""Samplers for the finite-k equilibrium laws and for sine/Airy window approximations.

GUE spectra come from the beta=2 tridiagonal Hermite model, whose eigenvalue
density is proportional to prod |l_i - l_j|^2 exp(-sum l^2 / 2). The bulk
equilibrium is an exact rescaling of it; the edge equilibrium is sampled with
Metropolis-adjusted Langevin moves on exp(-H).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .configspace import Configuration, Window, WeylPoint
from .errors import NoConvergence
from .model import ModelSpec, Regime, grad_hamiltonian, hamiltonian

MIN_ACCEPTANCE = 0.05


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_index),))
        return np.random.Generator(np.random.PCG64(ss))


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def gue_eigenvalues(k: int, rng, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Eigenvalues (decreasing) of one tridiagonal GUE draw, optionally only those in (lo, hi]."""
    g = _rng(rng)
    diag = g.standard_normal(k)
    if k == 1:
        vals = diag
    else:
        off = np.sqrt(g.chisquare(2.0 * np.arange(k - 1, 0, -1))) / math.sqrt(2.0)
        if lo is None and hi is None:
            vals = eigvalsh_tridiagonal(diag, off)
        else:
            lo_v = -np.inf if lo is None else lo
            hi_v = np.inf if hi is None else hi
            vals = eigvalsh_tridiagonal(diag, off, select="v", select_range=(lo_v, hi_v))
    if k == 1 and (lo is not None or hi is not None):
        keep = np.ones(1, dtype=bool)
        if lo is not None:
            keep &= vals > lo
        if hi is not None:
            keep &= vals <= hi
        vals = vals[keep]
    return np.sort(vals)[::-1]


def sample_gue_spectrum(k: int, rng) -> WeylPoint:
    return WeylPoint(tuple(gue_eigenvalues(k, rng)))


def dense_gue_eigenvalues(k: int, rng) -> np.ndarray:
    """Eigenvalues of a dense Hermitian matrix with the same normalisation (test oracle)."""
    g = _rng(rng)
    a = g.standard_normal((k, k)) + 1j * g.standard_normal((k, k))
    h = (a + a.conj().T) / 2.0
    return np.sort(np.linalg.eigvalsh(h))[::-1]


def bulk_from_gue(model: ModelSpec, lam: np.ndarray) -> np.ndarray:
    return math.sqrt(model.k) * lam


def _exact_scale(model: ModelSpec) -> float:
    return math.sqrt(1.0 / model.confinement_curvature)


def exact_rescaled_sample(model: ModelSpec, rng, size: int) -> np.ndarray:
    """Draw (size, k) states by rescaling GUE spectra to the quadratic confinement.

    Both regimes have a Gaussian confinement, so x = center + sqrt(1/curvature) * lambda
    maps the GUE law onto exp(-H) exactly. Used for the bulk sampler and as an
    independent check of the edge Markov chain.
    """
    g = _rng(rng)
    scale = _exact_scale(model)
    out = np.empty((size, model.k))
    for i in range(size):
        out[i] = model.center + scale * gue_eigenvalues(model.k, g)
    return out


@dataclass(frozen=True)
class McmcResult:
    states: np.ndarray
    acceptance_rate: float


def _initial_states(model: ModelSpec, n_chains: int) -> np.ndarray:
    k = model.k
    scale = _exact_scale(model)
    if k == 1:
        base = np.zeros(1)
    else:
        base = 1.8 * math.sqrt(k) * np.linspace(1.0, -1.0, k)
    return np.tile(model.center + scale * base, (n_chains, 1))


def run_mala(model: ModelSpec, steps: int, step_size: float, rng, n_chains: int = 1, init: np.ndarray | None = None) -> McmcResult:
    """Vectorised Metropolis-adjusted Langevin chains targeting exp(-H)."""
    if steps < 1 or step_size <= 0:
        raise ValueError("need steps >= 1 and step_size > 0")
    g = _rng(rng)
    x = _initial_states(model, n_chains) if init is None else np.array(init, dtype=float).reshape(n_chains, model.k)
    h = float(step_size)
    hx = hamiltonian(model, x)
    gx = grad_hamiltonian(model, x)
    accepted = 0
    for _ in range(steps):
        y = x - h * gx + math.sqrt(2.0 * h) * g.standard_normal(x.shape)
        u = np.log(g.uniform(size=n_chains))
        ordered = np.all(y[:, :-1] > y[:, 1:], axis=1) if model.k > 1 else np.ones(n_chains, dtype=bool)
        hy = np.full(n_chains, np.inf)
        gy = np.zeros_like(y)
        if ordered.any():
            hy[ordered] = hamiltonian(model, y[ordered])
            gy[ordered] = grad_hamiltonian(model, y[ordered])
        fwd = np.sum((y - x + h * gx) ** 2, axis=1) / (4.0 * h)
        bwd = np.sum((x - y + h * gy) ** 2, axis=1) / (4.0 * h)
        with np.errstate(invalid="ignore"):
            log_alpha = -hy + hx - bwd + fwd
        acc = ordered & (u < log_alpha)
        x[acc] = y[acc]
        hx[acc] = hy[acc]
        gx[acc] = gy[acc]
        accepted += int(acc.sum())
    return McmcResult(x, accepted / (steps * n_chains))


def sample_mcmc(model: ModelSpec, steps: int, step_size: float, rng) -> WeylPoint:
    res = run_mala(model, steps, step_size, rng, n_chains=1)
    if res.acceptance_rate < MIN_ACCEPTANCE:
        raise NoConvergence(f"acceptance rate {res.acceptance_rate:.3f} below {MIN_ACCEPTANCE}")
    return WeylPoint(tuple(res.states[0]))


def default_mcmc_step(model: ModelSpec) -> float:
    # local Hessian scale is about the inverse squared typical gap
    return 0.05 * _exact_scale(model) ** 2 / max(model.k, 1)


def sample_mu_k(model: ModelSpec, rng, steps: int = 2000, step_size: float | None = None) -> WeylPoint:
    """One draw from the finite-k equilibrium exp(-H)/Z."""
    if model.regime is Regime.BULK:
        return WeylPoint(tuple(bulk_from_gue(model, gue_eigenvalues(model.k, rng))))
    return sample_mcmc(model, steps, step_size or default_mcmc_step(model), rng)


def sample_mu_k_batch(model: ModelSpec, rng, size: int, steps: int = 2000, step_size: float | None = None) -> np.ndarray:
    """(size, k) draws: exact rescaling for bulk, independent MALA chains for edge."""
    if model.regime is Regime.BULK:
        return exact_rescaled_sample(model, rng, size)
    res = run_mala(model, steps, step_size or default_mcmc_step(model), rng, n_chains=size)
    if res.acceptance_rate < MIN_ACCEPTANCE:
        raise NoConvergence(f"acceptance rate {res.acceptance_rate:.3f} below {MIN_ACCEPTANCE}")
    return res.states


def bulk_unit_scale(k: int) -> float:
    """Factor taking GUE eigenvalues to unit intensity at the spectrum centre."""
    return math.sqrt(k) / math.pi


def sample_sine_window(k: int, window: Window | float, rng) -> Configuration:
    r = window.radius if isinstance(window, Window) else float(window)
    s = bulk_unit_scale(k)
    lam = gue_eigenvalues(k, rng, lo=-r / s, hi=r / s)
    u = lam * s
    return Configuration(tuple(u[np.abs(u) < r]))


def airy_scaled(k: int, lam: np.ndarray) -> np.ndarray:
    return k ** (1.0 / 6.0) * (lam - 2.0 * math.sqrt(k))


def sample_airy_window(k: int, window: tuple[float, float], rng) -> Configuration:
    """Edge-rescaled GUE eigenvalues that land in the half-open window [a, b)."""
    a, b = window
    lo = 2.0 * math.sqrt(k) + a / k ** (1.0 / 6.0)
    hi = 2.0 * math.sqrt(k) + b / k ** (1.0 / 6.0)
    lam = gue_eigenvalues(k, rng, lo=lo - 1e-12, hi=hi)
    s = airy_scaled(k, lam)
    return Configuration(tuple(s[(s >= a) & (s < b)]))
