"""Finite point configurations on the line, windows, and uniform empirical laws."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInterval, NonFiniteInput


def _finite_floats(values: Iterable[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise NonFiniteInput(f"non-finite coordinate in {out!r}")
    return out


@dataclass(frozen=True)
class Configuration:
    """A finite multiset of real positions, stored sorted nondecreasing."""

    points: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        pts = _finite_floats(self.points)
        object.__setattr__(self, "points", tuple(sorted(pts)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def to_json(self) -> str:
        return json.dumps(list(self.points))


@dataclass(frozen=True)
class Window:
    """The open ball (-radius, radius)."""

    radius: float

    def __post_init__(self) -> None:
        r = float(self.radius)
        if not math.isfinite(r) or r <= 0:
            raise InvalidInterval(f"window radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "radius", r)

    def contains(self, x: float) -> bool:
        return abs(x) < self.radius


@dataclass(frozen=True)
class WeylPoint:
    """Labelled k-particle state with strictly decreasing coordinates."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        c = _finite_floats(self.coords)
        if len(c) < 1:
            raise ValueError("a Weyl point needs at least one coordinate")
        if any(a <= b for a, b in zip(c, c[1:])):
            raise ValueError(f"coordinates must be strictly decreasing: {c!r}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_unsorted(cls, values: Iterable[float]) -> "WeylPoint":
        return cls(tuple(sorted((float(v) for v in values), reverse=True)))

    @property
    def k(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def to_configuration(self) -> Configuration:
        return Configuration(self.coords)


@dataclass(frozen=True)
class EmpiricalLaw:
    """Uniformly weighted finite family of configurations."""

    members: tuple[Configuration, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        members = tuple(m if isinstance(m, Configuration) else Configuration(tuple(m)) for m in self.members)
        if not members:
            raise ValueError("an empirical law needs at least one member")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def from_arrays(cls, rows: Iterable[Sequence[float]]) -> "EmpiricalLaw":
        return cls(tuple(Configuration(tuple(r)) for r in rows))

    def to_json(self) -> str:
        return json.dumps([list(m.points) for m in self.members])


def from_points(values: Iterable[float]) -> Configuration:
    return Configuration(tuple(values))


def restrict(gamma: Configuration, window: Window | float) -> Configuration:
    """Keep the points strictly inside the window."""
    r = window.radius if isinstance(window, Window) else float(window)
    return Configuration(tuple(x for x in gamma.points if abs(x) < r))


def count(gamma: Configuration, a: float, b: float) -> int:
    """Number of points in the half-open interval [a, b)."""
    if a > b:
        raise InvalidInterval(f"interval [{a}, {b}) has a > b")
    pts = gamma.points
    lo = np.searchsorted(pts, a, side="left")
    hi = np.searchsorted(pts, b, side="left")
    return int(hi - lo)


def configuration_from_json(text: str) -> Configuration:
    return from_points(json.loads(text))


def law_from_json(text: str) -> EmpiricalLaw:
    return EmpiricalLaw.from_arrays(json.loads(text))
