"""Exact Gaussian calculus for the one-particle bulk model.

With k = 1 the bulk energy is x^2/2, the equilibrium is N(0, 1) and the flow is
an Ornstein-Uhlenbeck process, so entropy, Fisher information, the Wasserstein
distance and their time derivatives all have closed forms.

Fisher information is normalised as F(nu) = int |d/dx log(dnu/dmu)|^2 dnu, the
value for which dH/dt = -F along the full-speed flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Speed


@dataclass(frozen=True)
class GaussianLaw:
    mean: float
    var: float

    def __post_init__(self) -> None:
        if not self.var > 0:
            raise ValueError("variance must be positive")

    @property
    def sd(self) -> float:
        return math.sqrt(self.var)


STANDARD = GaussianLaw(0.0, 1.0)


def _rate(speed: Speed | str) -> float:
    speed = Speed(speed) if not isinstance(speed, Speed) else speed
    return 1.0 if speed is Speed.FULL else 0.5


def ou_evolve(g: GaussianLaw, t: float, speed: Speed | str = Speed.FULL) -> GaussianLaw:
    if t < 0:
        raise ValueError("t must be nonnegative")
    c = _rate(speed)
    decay = math.exp(-c * t)
    return GaussianLaw(g.mean * decay, 1.0 + (g.var - 1.0) * decay * decay)


def ou_velocity(g: GaussianLaw, speed: Speed | str = Speed.FULL) -> tuple[float, float]:
    """Time derivatives (dm/dt, dv/dt) of the flow at g."""
    c = _rate(speed)
    return -c * g.mean, -2.0 * c * (g.var - 1.0)


def gaussian_w2(g1: GaussianLaw, g2: GaussianLaw) -> float:
    return math.hypot(g1.mean - g2.mean, g1.sd - g2.sd)


def gaussian_entropy(nu: GaussianLaw, mu: GaussianLaw = STANDARD) -> float:
    """Relative entropy of nu with respect to mu."""
    ratio = nu.var / mu.var
    return 0.5 * ((nu.mean - mu.mean) ** 2 / mu.var + ratio - 1.0 - math.log(ratio))


def gaussian_fisher(nu: GaussianLaw, mu: GaussianLaw = STANDARD) -> float:
    """int |d/dx log(dnu/dmu)|^2 dnu.

    The score difference is affine, a x + b with a = 1/v_mu - 1/v_nu, so the
    integral is a^2 v_nu + ((m_nu - m_mu)/v_mu)^2.
    """
    a = 1.0 / mu.var - 1.0 / nu.var
    return a * a * nu.var + ((nu.mean - mu.mean) / mu.var) ** 2


def fisher_by_quadrature(nu: GaussianLaw, mu: GaussianLaw = STANDARD, nodes: int = 80) -> float:
    """Same integral by Gauss-Hermite quadrature of the log-density derivative."""
    z, w = np.polynomial.hermite_e.hermegauss(nodes)
    x = nu.mean + nu.sd * z
    score = -(x - nu.mean) / nu.var + (x - mu.mean) / mu.var
    return float(np.sum(w * score**2) / math.sqrt(2.0 * math.pi))


def entropy_rate(g: GaussianLaw, speed: Speed | str = Speed.FULL) -> float:
    """d/dt of the entropy relative to N(0, 1) along the flow, by the chain rule."""
    dm, dv = ou_velocity(g, speed)
    return g.mean * dm + 0.5 * dv * (1.0 - 1.0 / g.var)


def w2_sq_rate(g: GaussianLaw, target: GaussianLaw, speed: Speed | str = Speed.FULL) -> float:
    """d/dt of W2^2(g_t, target) along the flow."""
    dm, dv = ou_velocity(g, speed)
    ds = dv / (2.0 * g.sd)
    return 2.0 * (g.mean - target.mean) * dm + 2.0 * (g.sd - target.sd) * ds


def energy_identity_residual(g0: GaussianLaw, T: float, n_steps: int) -> float:
    """Max over an equispaced grid of |dH/dt + F| along the full-speed flow."""
    worst = 0.0
    for t in np.linspace(0.0, T, n_steps + 1):
        g = ou_evolve(g0, float(t))
        worst = max(worst, abs(entropy_rate(g) + gaussian_fisher(g)))
    return worst


def entropy_along(g0: GaussianLaw, t: float, speed: Speed | str = Speed.FULL) -> float:
    return gaussian_entropy(ou_evolve(g0, t, speed))


def slope(g: GaussianLaw) -> float:
    """Descending slope of the entropy at g.

    Gaussians form a flat, totally geodesic family in which W2 is Euclidean in
    (mean, sd), and the entropy's Wasserstein gradient at a Gaussian is affine, so
    the slope is the Euclidean gradient norm of H(mean, sd).
    """
    return math.hypot(g.mean, g.sd - 1.0 / g.sd)


def numerical_slope(g: GaussianLaw, eps: float = 1e-6, directions: int = 720) -> float:
    """Max over perturbation directions of (H(g) - H(g')) / W2(g, g') at step eps."""
    h0 = gaussian_entropy(g)
    best = 0.0
    for theta in np.linspace(0.0, 2.0 * math.pi, directions, endpoint=False):
        dm, ds = eps * math.cos(theta), eps * math.sin(theta)
        s = g.sd + ds
        if s <= 0:
            continue
        other = GaussianLaw(g.mean + dm, s * s)
        best = max(best, (h0 - gaussian_entropy(other)) / gaussian_w2(g, other))
    return best


def metric_slope_check(g: GaussianLaw, tol: float = 1e-10) -> tuple[float, float]:
    s = slope(g)
    root_f = math.sqrt(gaussian_fisher(g))
    assert abs(s - root_f) <= tol, f"slope {s} differs from sqrt Fisher {root_f}"
    return s, root_f
