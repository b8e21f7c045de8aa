"""Spatial domains: symmetric intervals and balls of dimension 1 to 3.

Both reduce to a radial coordinate r in [0, R] with a regular center and a
Dirichlet boundary at r = R; an interval (-L, L) is the n = 1 ball of
radius L.  The measures |Omega| and |dOmega| enter the nonlocal coupling
and the critical threshold 2*|dOmega|^2, so they are exposed as derived
properties (unit_ball_volume = pi^(n/2) / Gamma(n/2 + 1)).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi

from .errors import DomainError


def _unit_ball_volume(n: int) -> float:
    return pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class Interval:
    """The interval (-L, L) in one dimension."""

    half_length: float

    def __post_init__(self):
        if self.half_length <= 0:
            raise DomainError("interval half-length must be positive")

    @property
    def radial_dim(self) -> int:
        return 1

    @property
    def radius(self) -> float:
        return self.half_length

    @property
    def volume(self) -> float:
        return 2.0 * self.half_length

    @property
    def boundary_measure(self) -> float:
        # two endpoints, counting measure
        return 2.0


@dataclass(frozen=True)
class Ball:
    """The n-ball of radius R, n in {1, 2, 3}."""

    dim: int
    radius: float

    def __post_init__(self):
        if not (1 <= self.dim <= 3):
            raise DomainError("supported ball dimensions are 1, 2 and 3")
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")

    @property
    def radial_dim(self) -> int:
        return self.dim

    @property
    def volume(self) -> float:
        return _unit_ball_volume(self.dim) * self.radius ** self.dim

    @property
    def boundary_measure(self) -> float:
        return self.dim * _unit_ball_volume(self.dim) * self.radius ** (self.dim - 1)


DomainSpec = Interval | Ball


def critical_lambda_p2(dom: DomainSpec) -> float:
    """The p = 2 existence threshold 2*|dOmega|^2."""
    return 2.0 * dom.boundary_measure ** 2
