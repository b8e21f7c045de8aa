"""Quasi-steady comparison envelopes.

A time-parametrized family w(x; mu(t)) of local steady profiles is an
upper (lower) solution of the nonlocal problem when mu(t) solves the
scalar ODE

    mu'(t) = (lambda - lambda(mu)) / I(mu)^p * inf_x f(w)/w_mu,

started above (below) the solution with lambda <= lambda(mu0)
(lambda >= lambda(mu0)).  The infimum is taken over interior nodes: the
ratio diverges at the boundary, where w_mu -> 0 while f(w) -> f(0), so
the continuum infimum is interior and the node next to the boundary is
excluded as a discretization artifact.

Roots of lambda(mu) = lambda are equilibria of the ODE and coincide with
the steady states of the nonlocal problem; an envelope either relaxes to
such a root, escapes to mu -> infinity (the supercritical signature), or
runs out its time budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .domain import DomainSpec
from .errors import DomainError, NumericsError
from .nonlinearity import Nonlinearity
from .steady import (
    BranchTable,
    _profile_grid,
    _volume_integral,
    default_mu_grid,
    solve_branch_table,
    solve_radial_steady,
)

UPPER = "upper"
LOWER = "lower"

TERMINAL_ROOT = "reached_root"
TERMINAL_ESCAPED = "escaped"
TERMINAL_MAX_TIME = "max_time"


@dataclass(frozen=True)
class SensitivityProfile:
    """Central-difference dw/dmu on the profile grid."""

    mu: float
    delta: float  # relative step actually used
    r: np.ndarray
    values: np.ndarray


def dw_dmu(nl: Nonlinearity, mu: float, dom: DomainSpec,
           grid_size: int = 512, delta: float = 1e-4) -> SensitivityProfile:
    """dw/dmu by central differencing of two steady solves at mu(1 +- delta).

    Positive at all interior nodes and zero at the boundary; a sign
    violation triggers one retry at delta/10 before failing.
    """
    if mu <= 0:
        raise DomainError("mu must be positive")
    grid = _profile_grid(dom, mu, grid_size)
    for d in (delta, delta / 10.0):
        hi = solve_radial_steady(nl, mu * (1.0 + d), dom, grid_size, grid=grid)
        lo = solve_radial_steady(nl, mu * (1.0 - d), dom, grid_size, grid=grid)
        vals = (hi.w - lo.w) / (2.0 * mu * d)
        vals[-1] = 0.0
        if np.all(vals[:-1] > 0.0):
            return SensitivityProfile(float(mu), d, grid, vals)
    raise NumericsError(
        f"dw/dmu has non-positive interior values at mu={mu:g} even after "
        "shrinking the difference step"
    )


def _inf_reaction_ratio(nl: Nonlinearity, w: np.ndarray,
                        wmu: np.ndarray) -> float:
    # interior nodes only, excluding the layer adjacent to the boundary
    # where the discrete ratio is a 0/0 artifact
    interior = slice(0, len(w) - 2)
    return float(np.min(nl.f(w[interior]) / wmu[interior]))


def mu_ode_rhs(mu: float, lam: float, p: float, nl: Nonlinearity,
               dom: DomainSpec, grid_size: int = 512) -> float:
    """Right-hand side of the envelope ODE at a single mu (uncached)."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    prof = solve_radial_steady(nl, mu, dom, grid_size)
    I = _volume_integral(nl, prof, dom)
    lam_mu = mu * I**p
    sens = dw_dmu(nl, mu, dom, grid_size)
    return (lam - lam_mu) / I**p * _inf_reaction_ratio(nl, prof.w, sens.values)


class EnvelopeModel:
    """Cached branch interpolants for fast envelope integration.

    lambda(mu), I(mu) and the infimum ratio are tabulated on a log-spaced
    mu grid and interpolated monotone-cubically in ln(mu); the ODE right
    hand side is then evaluated without fresh steady solves.
    """

    def __init__(self, nl: Nonlinearity, p: float, dom: DomainSpec,
                 mu_min: float = 1e-4, mu_max: float = 1e9,
                 points_per_decade: int = 30, grid_size: int = 256,
                 table: BranchTable | None = None):
        if table is None:
            table = solve_branch_table(
                nl, dom, default_mu_grid(mu_min, mu_max, points_per_decade),
                grid_size)
        self.nl, self.p, self.dom = nl, float(p), dom
        self.table = table
        self.mu_min = float(table.mu[0])
        self.mu_max = float(table.mu[-1])
        ratios = np.empty_like(table.mu)
        for i, mu in enumerate(table.mu):
            grid = _profile_grid(dom, float(mu), grid_size)
            prof = solve_radial_steady(nl, float(mu), dom, grid_size,
                                       grid=grid, _M_hint=float(table.M[i]))
            sens = dw_dmu(nl, float(mu), dom, grid_size)
            ratios[i] = _inf_reaction_ratio(nl, prof.w, sens.values)
        x = np.log(table.mu)
        self._lam = PchipInterpolator(x, np.log(table.mu * table.I**self.p))
        self._I = PchipInterpolator(x, np.log(table.I))
        self._ratio = PchipInterpolator(x, np.log(ratios))

    def _x(self, mu: float) -> float:
        return math.log(min(max(mu, self.mu_min), self.mu_max))

    def lam(self, mu: float) -> float:
        return math.exp(float(self._lam(self._x(mu))))

    def I(self, mu: float) -> float:
        return math.exp(float(self._I(self._x(mu))))

    def ratio(self, mu: float) -> float:
        return math.exp(float(self._ratio(self._x(mu))))

    def rhs(self, mu: float, lam_target: float) -> float:
        return (lam_target - self.lam(mu)) / self.I(mu) ** self.p \
            * self.ratio(mu)

    def lam_roots(self, lam_target: float) -> list[float]:
        """Sign-change roots of lambda(mu) = lam_target on the cached branch.

        For p = 2 a target at or above 2|dOmega|^2 has no root (the branch
        saturates strictly below it); quadrature noise at the saturated tail
        must not fabricate crossings there.
        """
        from scipy.optimize import brentq

        from .domain import critical_lambda_p2

        if self.p == 2.0 and lam_target >= critical_lambda_p2(self.dom) * (1.0 - 1e-6):
            return []
        lam_tab = self.table.mu * self.table.I ** self.p
        diff = lam_tab - lam_target
        roots = [float(self.table.mu[j]) for j in np.where(diff == 0.0)[0]]
        for j in np.where(diff[:-1] * diff[1:] < 0.0)[0]:
            roots.append(brentq(lambda m: self.lam(m) - lam_target,
                                float(self.table.mu[j]),
                                float(self.table.mu[j + 1]),
                                xtol=1e-14, rtol=1e-13))
        return sorted(roots)


@dataclass
class EnvelopePath:
    """One integrated envelope: mu(t) and how it ended."""

    mu0: float
    direction: str
    lam: float
    times: np.ndarray
    mu_series: np.ndarray
    terminal: str
    mu_root: float | None = None  # set when terminal == reached_root


def evolve_envelope(mu0: float, direction: str, lam: float, p: float,
                    nl: Nonlinearity, dom: DomainSpec, t_max: float,
                    model: EnvelopeModel | None = None, tol: float = 1e-5,
                    mu_cap: float = 1e8, n_out: int = 200) -> EnvelopePath:
    """Integrate the envelope ODE from mu0 until it reaches a root of
    lambda(mu) = lambda (within tol*lambda), escapes past mu_cap, or hits
    t_max.

    ``direction`` must be consistent with the sign of lambda - lambda(mu0):
    an upper envelope starts with lambda <= lambda(mu0) and decreases, a
    lower envelope with lambda >= lambda(mu0) and increases.
    """
    if direction not in (UPPER, LOWER):
        raise DomainError(f"direction must be '{UPPER}' or '{LOWER}'")
    if mu0 <= 0 or lam <= 0 or t_max <= 0:
        raise DomainError("mu0, lambda and t_max must be positive")
    if model is None:
        model = EnvelopeModel(nl, p, dom, mu_min=min(1e-4, mu0 / 10.0),
                              mu_max=max(mu_cap, mu0 * 10.0))

    lam0 = model.lam(mu0)
    if direction == UPPER and lam > lam0 * (1.0 + 1e-12):
        raise DomainError(
            f"upper envelope needs lambda <= lambda(mu0) = {lam0:g}, "
            f"got lambda = {lam:g}")
    if direction == LOWER and lam < lam0 * (1.0 - 1e-12):
        raise DomainError(
            f"lower envelope needs lambda >= lambda(mu0) = {lam0:g}, "
            f"got lambda = {lam:g}")

    band = tol * lam
    # the proximity band may only terminate the run near a genuine
    # sign-change root; an asymptotic approach of lambda(mu) to the target
    # (the critical-threshold escape) must not masquerade as one
    has_roots = bool(model.lam_roots(lam))

    events = []

    def root_event(t, y):
        return abs(model.lam(float(y[0])) - lam) - band

    root_event.terminal = True
    root_event.direction = -1
    if has_roots:
        events.append(root_event)

    def escape_event(t, y):
        return mu_cap - float(y[0])

    escape_event.terminal = True
    escape_event.direction = -1
    events.append(escape_event)

    sol = solve_ivp(
        lambda t, y: (model.rhs(float(y[0]), lam),),
        (0.0, t_max),
        (float(mu0),),
        method="RK45",
        rtol=1e-8,
        atol=1e-12 * mu0,
        events=tuple(events),
        dense_output=True,
        max_step=t_max / 10.0,
    )
    if not sol.success:
        raise NumericsError(f"envelope integration failed: {sol.message}")

    t_end = float(sol.t[-1])
    times = np.linspace(0.0, t_end, n_out)
    mu_series = sol.sol(times)[0]

    mu_root = None
    if has_roots and sol.t_events[0].size:
        terminal = TERMINAL_ROOT
        mu_root = float(sol.y_events[0][0][0])
    elif sol.t_events[-1].size:
        terminal = TERMINAL_ESCAPED
    else:
        terminal = TERMINAL_MAX_TIME

    return EnvelopePath(
        mu0=float(mu0), direction=direction, lam=float(lam),
        times=times, mu_series=mu_series, terminal=terminal, mu_root=mu_root,
    )
