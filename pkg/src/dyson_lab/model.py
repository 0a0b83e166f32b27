"""Finite-k bulk and edge models: Hamiltonian, gradient and Hessian.

The energy is H = Psi + Phi with Psi = -2 sum_{i<j} log|x_i - x_j| and a quadratic
confinement Phi, either sum x^2/(2k) (bulk) or sum (x + 2k^{2/3})^2/(4k^{1/3}) (edge).
All functions accept a single state of shape (k,) or a batch (..., k).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import Collision


class Regime(enum.Enum):
    BULK = "bulk"
    EDGE = "edge"


@dataclass(frozen=True)
class ModelSpec:
    regime: Regime
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.regime, Regime):
            object.__setattr__(self, "regime", Regime(str(self.regime).lower()))
        if int(self.k) < 1:
            raise ValueError("k must be at least 1")
        object.__setattr__(self, "k", int(self.k))

    @property
    def center(self) -> float:
        """Minimiser of the one-particle confinement."""
        return 0.0 if self.regime is Regime.BULK else -2.0 * self.k ** (2.0 / 3.0)

    @property
    def confinement_curvature(self) -> float:
        """Second derivative of the one-particle confinement."""
        if self.regime is Regime.BULK:
            return 1.0 / self.k
        return 1.0 / (2.0 * self.k ** (1.0 / 3.0))


def _gaps(x: np.ndarray) -> np.ndarray:
    return x[..., :-1] - x[..., 1:]


def _check_order(x: np.ndarray) -> None:
    if x.shape[-1] > 1 and np.any(_gaps(x) <= 0):
        raise Collision("state is not strictly decreasing")


def confinement(model: ModelSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 0.5 * model.confinement_curvature * np.sum((x - model.center) ** 2, axis=-1)


def confinement_grad(model: ModelSpec, x: np.ndarray) -> np.ndarray:
    return model.confinement_curvature * (x - model.center)


def interaction(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    k = x.shape[-1]
    iu, ju = np.triu_indices(k, 1)
    return -2.0 * np.sum(np.log(np.abs(x[..., iu] - x[..., ju])), axis=-1)


def hamiltonian(model: ModelSpec, w) -> float | np.ndarray:
    """H(w) for a strictly ordered state or batch of states."""
    x = np.asarray(getattr(w, "coords", w), dtype=float)
    _check_order(x)
    out = interaction(x) + confinement(model, x)
    return float(out) if np.ndim(out) == 0 else out


def interaction_grad(x: np.ndarray) -> np.ndarray:
    """Gradient of Psi, accumulated over index offsets to avoid k x k temporaries."""
    out = np.zeros_like(x)
    k = x.shape[-1]
    for s in range(1, k):
        inv = 2.0 / (x[..., :-s] - x[..., s:])
        out[..., :-s] -= inv
        out[..., s:] += inv
    return out


def grad_hamiltonian(model: ModelSpec, w, check: bool = True) -> np.ndarray:
    x = np.asarray(getattr(w, "coords", w), dtype=float)
    if check:
        _check_order(x)
    return interaction_grad(x) + confinement_grad(model, x)


def hessian(model: ModelSpec, w) -> np.ndarray:
    x = np.asarray(getattr(w, "coords", w), dtype=float)
    _check_order(x)
    k = x.shape[-1]
    diff = x[..., :, None] - x[..., None, :]
    eye = np.eye(k, dtype=bool)
    off = np.where(eye, 0.0, -2.0 / np.where(eye, 1.0, diff) ** 2)
    hess = off.copy()
    idx = np.arange(k)
    hess[..., idx, idx] = -off.sum(axis=-1) + model.confinement_curvature
    return hess


def hessian_min_eigenvalue(model: ModelSpec, w) -> float | np.ndarray:
    ev = np.linalg.eigvalsh(hessian(model, w))[..., 0]
    return float(ev) if np.ndim(ev) == 0 else ev
