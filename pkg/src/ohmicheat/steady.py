"""Steady states and the bifurcation curve lambda(mu).

The local problem

    Delta w + mu f(w) = 0 in Omega,   w = 0 on the boundary,

has a unique positive radial solution on intervals and balls.  Its center
value M, nonlocal integral I(mu) = int_Omega f(w) dx and boundary flux
|w'(R)| parametrize the bifurcation curve

    lambda(mu) = mu * I(mu)^p,

whose roots against a target lambda enumerate the steady states of the
nonlocal problem.  Two independent routes to lambda are maintained at all
times: the volume form above and the flux form
mu^(1-p) * (|dOmega| * |w'(R)|)^p obtained by integrating the equation over
Omega; they must agree to 0.5% or the computation is rejected as
under-resolved.

Numerics
--------
* On the interval, mu(M) follows from the first integral
  w_r^2 = 2 mu (F(w) - F(M)) as a one-dimensional quadrature with an
  inverse-square-root endpoint singularity, removed exactly by the
  substitution s = M - M t^2.
* Radial profiles are shot in the scaled variable rho = sqrt(mu) r, which
  makes the IVP mu-independent: v'' + ((n-1)/rho) v' + f(v) = 0 from
  v(0) = M, v'(0) = 0, with the center regularized by v''(0) = -f(M)/n.
* The profile grid is boundary-graded once sqrt(mu) R is large, so the
  composite-Simpson volume integral still resolves the O(1/sqrt(mu))
  boundary layer.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.optimize import brentq

from .domain import Ball, DomainSpec, Interval, critical_lambda_p2
from .errors import (
    BranchRangeError,
    DomainError,
    GridResolutionError,
    QuadratureError,
    ShootingError,
)
from .nonlinearity import Nonlinearity


class CertificationWarning(UserWarning):
    """Root count could not be certified within the traced branch range."""


# 4-point Gauss-Legendre nodes/weights on (-1, 1)
_GL_X = np.array([-0.8611363115940526, -0.3399810435848563,
                  0.3399810435848563, 0.8611363115940526])
_GL_W = np.array([0.3478548451374538, 0.6521451548625461,
                  0.6521451548625461, 0.3478548451374538])

_DEFAULT_PANELS = 2048
_MAX_PANELS = 1 << 17
_SHOOT_RESID_TOL = 1e-10
_M_CAP = 700.0  # exp(M) would overflow the quadrature weights beyond this


def _gap_integrand(nl: Nonlinearity, M: float):
    """Integrand of int_0^M ds / sqrt(F(s)-F(M)) after s = M - M t^2."""

    def g(t):
        delta = M * t * t
        gap = nl.F_gap_delta(M - delta, delta)
        return 2.0 * M * t / np.sqrt(gap)

    return g


def _composite_gauss(g, panels: int) -> float:
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 / panels
    mids = edges[:-1] + half
    nodes = (mids[:, None] + half * _GL_X[None, :]).ravel()
    with np.errstate(divide="ignore", over="ignore"):
        # probes far outside the representable mu range return inf, which the
        # bracket searches interpret correctly
        vals = g(nodes)
    return float(half * np.dot(vals.reshape(-1, 4), _GL_W).sum())


def _singular_quad(nl: Nonlinearity, M: float, panels: int = _DEFAULT_PANELS):
    """Panel-doubling quadrature of the substituted integrand.

    Returns (value, estimates) where estimates is the refinement trail;
    raises QuadratureError when doubling stalls before the tolerance.
    """
    g = _gap_integrand(nl, M)
    estimates = [_composite_gauss(g, panels)]
    n = panels
    while n <= _MAX_PANELS:
        n *= 2
        estimates.append(_composite_gauss(g, n))
        if abs(estimates[-1] - estimates[-2]) <= 5e-13 * abs(estimates[-1]):
            return estimates[-1], estimates
    raise QuadratureError(
        f"quadrature did not converge for M={M:g}; last estimates "
        f"{estimates[-2]:.16g}, {estimates[-1]:.16g}",
        estimates=estimates[-2:],
    )


def mu_of_M_flat(nl: Nonlinearity, M: float, half_length: float,
                 return_estimates: bool = False):
    """Local parameter mu for which the interval profile has center value M.

    Inverts the first-integral identity
    sqrt(mu) * L = (sqrt(2)/2) int_0^M ds / sqrt(F(s) - F(M)).
    """
    if M <= 0:
        raise DomainError("center value M must be positive")
    if M > _M_CAP:
        raise DomainError(f"center value M={M:g} exceeds the overflow cap {_M_CAP:g}")
    if half_length <= 0:
        raise DomainError("half_length must be positive")
    value, estimates = _singular_quad(nl, M)
    mu = (math.sqrt(0.5) * value / half_length) ** 2
    if return_estimates:
        sq = math.sqrt(0.5) / half_length
        return mu, [(sq * e) ** 2 for e in estimates]
    return mu


def _mu_quad_fast(nl: Nonlinearity, M: float, half_length: float,
                  panels: int = 1024) -> float:
    # single-shot quadrature for root-finding iterations; the accepted root
    # is always re-verified with the panel-doubling version
    value = _composite_gauss(_gap_integrand(nl, M), panels)
    return (math.sqrt(0.5) * value / half_length) ** 2


# -- radial IVP in the scaled variable ---------------------------------------


def _scaled_rhs(nl: Nonlinearity, n: int):
    f = nl.f_scalar
    f0 = f(0.0)

    def fx(v):
        # constant extension below 0: keeps undershoot probes bounded
        # (quadratic, not exponential) over long scaled ranges, and the
        # converged solution never enters v < 0
        return f(v) if v >= 0.0 else f0

    if n == 1:
        def rhs(rho, y):
            return (y[1], -fx(y[0]))
    else:
        k = n - 1.0

        def rhs(rho, y):
            if rho == 0.0:
                return (y[1], -fx(y[0]) / n)
            return (y[1], -k / rho * y[1] - fx(y[0]))

    return rhs


def _integrate_scaled(nl, n, M, rho_end, dense=False):
    sol = solve_ivp(
        _scaled_rhs(nl, n),
        (0.0, rho_end),
        (float(M), 0.0),
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
        dense_output=dense,
    )
    if not sol.success:  # pragma: no cover - DOP853 does not fail on this RHS
        raise ShootingError(f"radial integration failed: {sol.message}")
    return sol


def _shoot_residual(nl, n, M, rho_end) -> float:
    sol = _integrate_scaled(nl, n, M, rho_end)
    return float(sol.y[0, -1])


def _find_M_ball(nl: Nonlinearity, mu: float, n: int, R: float,
                 guess: float | None) -> float:
    """Center value for the n-ball by bisection/secant shooting on v(rho_R)."""
    rho_end = R * math.sqrt(mu)
    res = lambda M: _shoot_residual(nl, n, M, rho_end)

    if guess is None:
        # torsion-problem scale for small mu, log-scale seed beyond
        seed = min(mu * nl.f_scalar(0.0) * R * R / (2.0 * n),
                   1.0 + math.log1p(mu))
        lo = max(seed * 0.25, 1e-300)
        hi = max(seed * 2.0, 1e-8)
    else:
        lo, hi = guess * 0.8, guess * 1.25
    r_lo = res(lo)
    while r_lo > 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise ShootingError("shooting bracket not found: residual positive at M -> 0")
        r_lo = res(lo)
    r_hi = res(hi)
    while r_hi < 0.0:
        hi *= 2.0
        if hi > _M_CAP:
            raise ShootingError(f"shooting bracket not found below M_cap={_M_CAP:g}")
        r_hi = res(hi)
    M = brentq(res, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    _require_shot(res, M)
    return M


def _require_shot(res, M):
    r = res(M)
    tol = _SHOOT_RESID_TOL * max(1.0, M)
    if abs(r) > tol:
        raise ShootingError(
            f"shooting residual {r:.3e} exceeds tolerance {tol:.3e} at M={M:.6g}"
        )


def _find_M_flat(nl: Nonlinearity, mu: float, L: float,
                 guess: float | None) -> float:
    """Center value on the interval from the quadrature identity, polished
    against the IVP residual so both routes agree to the shooting tolerance."""
    target = mu
    h = lambda M: _mu_quad_fast(nl, M, L) - target
    if guess is None:
        # linear estimate for small mu; beyond that the doubling search from
        # a log-scale seed converges in a few steps
        M0 = max(min(mu * nl.f_scalar(0.0) * L * L / 2.0,
                     1.0 + math.log1p(mu)), 1e-12)
    else:
        M0 = guess
    lo, hi = M0, M0
    while h(lo) > 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise ShootingError("quadrature inversion bracket not found near M -> 0")
    while h(hi) < 0.0:
        hi *= 2.0
        if hi > _M_CAP:
            raise ShootingError(f"no center value below M_cap={_M_CAP:g} matches mu={mu:g}")
    M = brentq(h, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    # polish on the IVP residual (secant), so the returned profile satisfies
    # the same |w(R)| tolerance as the shooting path
    rho_end = L * math.sqrt(mu)
    res = lambda m: _shoot_residual(nl, 1, m, rho_end)
    r0 = res(M)
    tol = _SHOOT_RESID_TOL * max(1.0, M)
    if abs(r0) <= tol:
        return M
    a, ra = M, r0
    b = M * (1.0 + 1e-7)
    for _ in range(10):
        rb = res(b)
        if abs(rb) <= tol:
            return b
        if rb == ra:
            break
        a, b, ra = b, b - rb * (b - a) / (rb - ra), rb
    raise ShootingError("secant polish failed to meet the shooting tolerance")


def _find_M(nl, mu, dom: DomainSpec, guess=None) -> float:
    n, R = dom.radial_dim, dom.radius
    if n == 1:
        return _find_M_flat(nl, mu, R, guess)
    return _find_M_ball(nl, mu, n, R, guess)


def _profile_grid(dom: DomainSpec, mu: float, grid_size: int) -> np.ndarray:
    """Radial nodes, clustered toward the boundary in dyadic blocks for
    large mu.

    The profile rises from the boundary like ~2 ln(1 + sqrt(mu/2) d), so
    f(w) varies on EVERY length scale between 1/sqrt(mu) and R.  Each
    dyadic block [d, 2d] of boundary distances sees a fixed ~2 ln 2 rise of
    w, so uniform nodes inside each block resolve the whole creep with a
    fixed budget.  Blocks are internally uniform with an even interval
    count, which keeps every composite-Simpson pair inside one block and
    the rule at full fourth order (the nonuniform pair formula degrades
    wherever spacings jump).  Uniform spacing suffices while sqrt(mu) R is
    moderate.
    """
    R = dom.radius
    if mu <= 0 or math.sqrt(mu) * R <= 40.0:
        return np.linspace(0.0, R, grid_size + 1)
    width = R / 2.0
    d_min = min(0.25 / math.sqrt(mu), width / 8.0)
    blocks = math.ceil(math.log2(width / d_min))
    n_core = max(32, 2 * ((grid_size // 4) // 2))
    per_block = max(8, 2 * round((grid_size - n_core) / (2.0 * (blocks + 1))))
    parts = [np.linspace(0.0, R - width, n_core + 1)]
    d_hi = width
    for _ in range(blocks):
        d_lo = max(d_hi / 2.0, d_min)
        parts.append(R - np.linspace(d_hi, d_lo, per_block + 1)[1:])
        d_hi = d_lo
        if d_lo <= d_min:
            break
    parts.append(R - np.linspace(d_hi, 0.0, per_block + 1)[1:])
    return np.concatenate(parts)


@dataclass(frozen=True)
class SteadyProfile:
    """Radial steady solution of the local problem at a fixed mu."""

    mu: float
    r: np.ndarray
    w: np.ndarray
    M: float
    boundary_flux: float  # |dw/dr| at r = R

    def first_integral_residual(self, nl: Nonlinearity) -> float:
        """Sup over interior nodes of |w_r^2 - 2 mu (F(w)-F(M))|, relative to
        the boundary value 2 mu (1 - F(M)).  Meaningful on intervals only."""
        wr = np.gradient(self.w, self.r)
        gap = nl.F_gap(self.w, self.M)
        scale = 2.0 * self.mu * nl.F_gap(0.0, self.M)
        resid = np.abs(wr**2 - 2.0 * self.mu * gap)[1:-1]
        return float(resid.max() / scale) if scale > 0 else float(resid.max())


def solve_radial_steady(nl: Nonlinearity, mu: float, dom: DomainSpec,
                        grid_size: int = 512, *, grid=None,
                        _M_hint: float | None = None) -> SteadyProfile:
    """Solve Delta w + mu f(w) = 0 radially with w'(0) = 0, w(R) = 0.

    Shooting on the center value M; the first bracketed root is the solution
    by uniqueness of the positive steady state.
    """
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    if grid_size < 64:
        raise DomainError("grid_size must be at least 64")
    n, R = dom.radial_dim, dom.radius
    if grid is None:
        grid = _profile_grid(dom, mu, grid_size)
    else:
        grid = np.asarray(grid, dtype=float)
    if mu == 0.0:
        return SteadyProfile(0.0, grid, np.zeros_like(grid), 0.0, 0.0)

    M = _M_hint if _M_hint is not None else _find_M(nl, mu, dom)
    root_mu = math.sqrt(mu)
    sol = _integrate_scaled(nl, n, M, R * root_mu, dense=True)
    w = sol.sol(grid * root_mu)[0]
    w[-1] = 0.0
    w = np.maximum(w, 0.0)
    flux = root_mu * abs(float(sol.sol(R * root_mu)[1]))

    slack = 1e-9 * max(1.0, M)
    if np.any(np.diff(w) > slack):
        raise GridResolutionError(
            "steady profile is not monotone nonincreasing; refine the grid"
        )
    return SteadyProfile(float(mu), grid, w, float(M), flux)


def _volume_integral(nl: Nonlinearity, profile: SteadyProfile,
                     dom: DomainSpec) -> float:
    """int_Omega f(w) dx by composite Simpson on the profile grid."""
    n = dom.radial_dim
    fw = nl.f(profile.w)
    if n == 1:
        weight = fw
        factor = 2.0  # both symmetric halves of the interval
    else:
        surface = dom.boundary_measure / dom.radius ** (n - 1)  # n * omega_n
        weight = fw * profile.r ** (n - 1)
        factor = surface
    return factor * float(simpson(weight, x=profile.r))


def _lambda_pair(mu, I, flux, p, dom: DomainSpec):
    lam_vol = mu * I**p
    lam_flux = mu ** (1.0 - p) * (dom.boundary_measure * flux) ** p
    return lam_vol, lam_flux


def _check_dual(lam_vol, lam_flux, mu):
    mean = 0.5 * (lam_vol + lam_flux)
    if abs(lam_vol - lam_flux) > 0.005 * mean:
        raise GridResolutionError(
            f"volume and flux forms of lambda disagree by more than 0.5% at "
            f"mu={mu:g}: {lam_vol:.8g} vs {lam_flux:.8g}; refine the grid"
        )


def lambda_of_mu(nl: Nonlinearity, mu: float, p: float, dom: DomainSpec,
                 grid_size: int = 512, *, profile: SteadyProfile | None = None,
                 full: bool = False):
    """Bifurcation value lambda(mu) = mu * (int_Omega f(w) dx)^p.

    Also evaluates the flux form mu^(1-p) (|dOmega| |w'(R)|)^p and raises
    GridResolutionError if the two disagree beyond 0.5%.  Returns the volume
    form (or, with ``full=True``, the tuple (lam_volume, lam_flux, profile)).
    """
    if mu <= 0:
        raise DomainError("mu must be positive")
    if profile is None:
        profile = solve_radial_steady(nl, mu, dom, grid_size)
    I = _volume_integral(nl, profile, dom)
    lam_vol, lam_flux = _lambda_pair(mu, I, profile.boundary_flux, p, dom)
    _check_dual(lam_vol, lam_flux, mu)
    if full:
        return lam_vol, lam_flux, profile
    return lam_vol


def boundary_flux_ratio(nl: Nonlinearity, mu: float, dom: DomainSpec,
                        grid_size: int = 512) -> float:
    """The scaled boundary flux |w'(R)| / sqrt(mu); strictly below sqrt(2)."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    profile = solve_radial_steady(nl, mu, dom, grid_size)
    return profile.boundary_flux / math.sqrt(mu)


def default_mu_grid(mu_min: float = 1e-4, mu_max: float = 1e6,
                    points_per_decade: int = 200) -> np.ndarray:
    """Log-spaced mu grid; the branch features span many decades."""
    decades = math.log10(mu_max / mu_min)
    count = int(round(points_per_decade * decades)) + 1
    return np.geomspace(mu_min, mu_max, count)


@dataclass(frozen=True)
class BranchTable:
    """p-independent branch data: one local solve per mu."""

    nl: Nonlinearity
    dom: DomainSpec
    grid_size: int
    mu: np.ndarray
    M: np.ndarray
    I: np.ndarray          # int_Omega f(w) dx
    flux: np.ndarray       # |w'(R)|


def solve_branch_table(nl: Nonlinearity, dom: DomainSpec, mu_grid=None,
                       grid_size: int = 512) -> BranchTable:
    if mu_grid is None:
        mu_grid = default_mu_grid()
    mu_grid = np.asarray(mu_grid, dtype=float)
    if np.any(mu_grid <= 0) or np.any(np.diff(mu_grid) <= 0):
        raise DomainError("mu grid must be positive and strictly increasing")
    Ms = np.empty_like(mu_grid)
    Is = np.empty_like(mu_grid)
    fluxes = np.empty_like(mu_grid)
    guess = None
    for i, mu in enumerate(mu_grid):
        M = _find_M(nl, float(mu), dom, guess=guess)
        profile = solve_radial_steady(nl, float(mu), dom, grid_size, _M_hint=M)
        Ms[i] = M
        Is[i] = _volume_integral(nl, profile, dom)
        fluxes[i] = profile.boundary_flux
        guess = M
    return BranchTable(nl, dom, grid_size, mu_grid, Ms, Is, fluxes)


def regime_name(p: float) -> str:
    if p <= 1:
        return "monotone"
    if p < 2:
        return "unbounded-growth"
    if p == 2:
        return "saturating"
    return "rise-then-decay"


@dataclass(frozen=True)
class BranchPoint:
    mu: float
    M: float
    lam: float
    flux_ratio: float


@dataclass(frozen=True)
class SteadyBranch:
    """Sampled bifurcation curve for fixed (kernel, p, domain)."""

    nl: Nonlinearity
    p: float
    dom: DomainSpec
    grid_size: int
    mu: np.ndarray
    M: np.ndarray
    lam: np.ndarray
    flux_ratio: np.ndarray
    regime: str
    I: np.ndarray = field(repr=False, default=None)

    def points(self):
        for i in range(self.mu.size):
            yield BranchPoint(float(self.mu[i]), float(self.M[i]),
                              float(self.lam[i]), float(self.flux_ratio[i]))

    def __len__(self):
        return int(self.mu.size)


def trace_branch(nl: Nonlinearity, p: float, dom: DomainSpec, mu_grid=None,
                 grid_size: int = 512, *,
                 table: BranchTable | None = None) -> SteadyBranch:
    """Trace lambda(mu) over a mu grid, with the dual-formula check at every
    point and the regime diagnosis attached."""
    if p <= 0:
        raise DomainError("p must be positive")
    if table is None:
        table = solve_branch_table(nl, dom, mu_grid, grid_size)
    mu, M, I, flux = table.mu, table.M, table.I, table.flux
    lam_vol, lam_flux = _lambda_pair(mu, I, flux, p, dom)
    rel = np.abs(lam_vol - lam_flux) / (0.5 * (lam_vol + lam_flux))
    worst = int(np.argmax(rel))
    if rel[worst] > 0.005:
        raise GridResolutionError(
            f"dual lambda forms disagree by {100 * rel[worst]:.3f}% at "
            f"mu={mu[worst]:g}; refine the grid"
        )
    if np.any(np.diff(M) <= 0):
        raise GridResolutionError("center values are not strictly increasing in mu")
    return SteadyBranch(
        nl=table.nl, p=float(p), dom=table.dom, grid_size=table.grid_size,
        mu=mu, M=M, lam=lam_vol, flux_ratio=flux / np.sqrt(mu),
        regime=regime_name(p), I=I,
    )


@dataclass(frozen=True)
class LambdaStar:
    """Supremum of the branch: finite with a maximizer (p > 2), finite as an
    unattained limit (p = 2), or unbounded (p < 2)."""

    bounded: bool
    value: float
    mu_at_max: float | None
    largest_computed: float
    analytic: bool  # True when the value is the closed-form 2|dOmega|^2


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def lambda_star(branch: SteadyBranch) -> LambdaStar:
    if len(branch) == 0:
        raise DomainError("branch is empty")
    lam = branch.lam
    largest = float(lam.max())
    if branch.p < 2:
        return LambdaStar(False, math.inf, None, largest, False)
    if branch.p == 2:
        # the supremum 2|dOmega|^2 is a limit, never attained
        return LambdaStar(True, critical_lambda_p2(branch.dom), math.inf,
                          largest, True)
    i = int(np.argmax(lam))
    if i == 0 or i == len(branch) - 1:
        raise BranchRangeError(
            "branch maximum sits at an endpoint of the mu grid; widen the grid"
        )
    # golden-section refinement of lambda(mu) around the discrete maximizer
    a, b = float(branch.mu[i - 1]), float(branch.mu[i + 1])
    f = lambda m: lambda_of_mu(branch.nl, m, branch.p, branch.dom,
                               branch.grid_size)
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > 1e-6 * b:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    mu_star = 0.5 * (a + b)
    return LambdaStar(True, f(mu_star), mu_star, largest, False)


def solve_nonlocal_steady(nl: Nonlinearity, lam: float, p: float,
                          dom: DomainSpec, grid_size: int = 512, *,
                          branch: SteadyBranch | None = None,
                          mu_grid=None) -> list[SteadyProfile]:
    """All steady states of the nonlocal problem at a given lambda.

    Finds the roots of lambda(mu) = lambda along the traced branch (sign
    changes refined by bisection) and returns the corresponding local
    profiles, in increasing mu order.  If the traced range cannot certify
    the regime's expected root count, a CertificationWarning is issued.
    """
    if lam <= 0:
        raise DomainError("lambda must be positive")
    if p == 2.0 and lam >= critical_lambda_p2(dom) * (1.0 - 1e-6):
        # no steady state at or above the saturation threshold; quadrature
        # noise on the saturated tail must not fabricate crossings
        return []
    if branch is None:
        branch = trace_branch(nl, p, dom, mu_grid, grid_size)
    diff = branch.lam - lam
    roots: list[float] = []
    exact = np.where(diff == 0.0)[0]
    roots.extend(float(branch.mu[j]) for j in exact)
    g = lambda m: lambda_of_mu(nl, m, p, dom, grid_size) - lam
    for j in np.where(diff[:-1] * diff[1:] < 0.0)[0]:
        roots.append(brentq(g, float(branch.mu[j]), float(branch.mu[j + 1]),
                            xtol=1e-14, rtol=1e-12, maxiter=200))
    roots.sort()

    expected = _expected_root_count(branch, lam)
    if expected is not None and len(roots) < expected:
        warnings.warn(
            f"found {len(roots)} root(s) of lambda(mu)={lam:g} but the regime "
            f"({branch.regime}) implies at least {expected}; the traced mu "
            "range may be too narrow",
            CertificationWarning,
            stacklevel=2,
        )
    return [solve_radial_steady(nl, m, dom, grid_size) for m in roots]


def _expected_root_count(branch: SteadyBranch, lam: float):
    if branch.p <= 1:
        return 1 if lam <= branch.lam[-1] else None
    if branch.p == 2:
        if lam >= critical_lambda_p2(branch.dom):
            return 0
        return 1 if lam <= branch.lam.max() else None
    if branch.p > 2 and lam < branch.lam.max():
        return 2
    return None
