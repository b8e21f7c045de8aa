"""Blow-up rate laws and the boundary-layer profile.

Near a finite blow-up time T the core of the solution follows closed-form
laws set by the kernel family and p:

* p = 2, lambda above the threshold 2|dOmega|^2, with
  Lambda_1 = (sqrt(lambda) - sqrt(2)|dOmega|) / |Omega|:

  - exponential kernel:   M ~ -ln(T-t) - 2 ln(Lambda_1)
  - algebraic kernel with tail B/s^(1+b) (B = b for the built-in family):
                          M ~ (b Lambda_1^2 / B)^(-1/b) (T-t)^(-1/b)

* p > 2, with Lambda_2 = lambda / |Omega|^p:

  - exponential kernel:   M ~ ln((p-1) Lambda_2)/(1-p) + ln(T-t)/(1-p)
  - algebraic kernel:     M ~ C (T-t)^(1/(1-(1+b)(p-1)))

These are asymptotic equivalences, not equalities; fits against observed
trajectories therefore carry generous tolerances, and the coefficient or
intercept is reported rather than asserted.

The blow-up core is separated from the boundary by a layer in which u
stays O(1); in stretched coordinates the profile U(y) solves
sqrt(2) y = int_0^U F^(-1/2)(s) ds, with U'(0) = sqrt(2) after the kernel
normalization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .domain import DomainSpec, critical_lambda_p2
from .errors import DomainError, InsufficientDataError, NumericsError
from .nonlinearity import ALGEBRAIC, EXPONENTIAL, Nonlinearity
from .steady import mu_of_M_flat


# -- rate laws ---------------------------------------------------------------


@dataclass(frozen=True)
class LogLaw:
    """M ~ slope * ln(T - t) + intercept."""

    slope: float
    intercept: float | None = None


@dataclass(frozen=True)
class PowerLaw:
    """M ~ coefficient * (T - t)^exponent."""

    exponent: float
    coefficient: float | None = None


@dataclass(frozen=True)
class NotApplicable:
    reason: str


@dataclass(frozen=True)
class RatePrediction:
    law: LogLaw | PowerLaw | NotApplicable
    lambda1: float | None = None  # (sqrt(lam) - sqrt(2)|dOmega|)/|Omega|, p = 2
    lambda2: float | None = None  # lam/|Omega|^p, p > 2


def predicted_rate(nl: Nonlinearity, p: float, lam: float,
                   dom: DomainSpec) -> RatePrediction:
    """Closed-form blow-up rate prediction for the built-in kernel families."""
    if lam <= 0 or p <= 0:
        raise DomainError("lambda and p must be positive")
    if p < 2:
        return RatePrediction(NotApplicable("globally bounded for p < 2"))
    if nl.family not in (EXPONENTIAL, ALGEBRAIC):
        return RatePrediction(NotApplicable("no closed form for tabulated kernels"))

    if p == 2:
        threshold = critical_lambda_p2(dom)
        if lam <= threshold:
            return RatePrediction(
                NotApplicable(f"no blow-up at p = 2 for lambda <= {threshold:g}"))
        lam1 = (math.sqrt(lam) - math.sqrt(2.0) * dom.boundary_measure) / dom.volume
        if nl.family == EXPONENTIAL:
            law = LogLaw(slope=-1.0, intercept=-2.0 * math.log(lam1))
        else:
            b = nl.b
            B = b  # leading tail coefficient of b(1+s)^(-1-b)
            law = PowerLaw(exponent=-1.0 / b,
                           coefficient=(b * lam1**2 / B) ** (-1.0 / b))
        return RatePrediction(law, lambda1=lam1)

    lam2 = lam / dom.volume**p
    if nl.family == EXPONENTIAL:
        law = LogLaw(slope=1.0 / (1.0 - p),
                     intercept=math.log((p - 1.0) * lam2) / (1.0 - p))
    else:
        b = nl.b
        B = b
        expo = 1.0 / (1.0 - (1.0 + b) * (p - 1.0))
        coeff = (((1.0 + b) * (p - 1.0) - 1.0) * lam2 / B ** (p - 1.0)) ** expo
        law = PowerLaw(exponent=expo, coefficient=coeff)
    return RatePrediction(law, lambda2=lam2)


# -- fitting -----------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    """Regression of a trajectory against a blow-up law."""

    T_hat: float
    slope_or_exponent: float
    intercept_or_coefficient: float
    residual: float          # rms of the linearized regression
    window: tuple            # (t_lo, t_hi) actually used


_SCAN_POINTS = 400
_ZOOM_ROUNDS = 3
_MAX_FIT_SAMPLES = 4000


def _scan_T(t: np.ndarray, y: np.ndarray, T_grid: np.ndarray):
    """Least-squares fit y = a + s*ln(T - t) for each candidate T; returns
    (rms array, slope array, intercept array)."""
    x = np.log(T_grid[:, None] - t[None, :])
    n = t.size
    sx = x.sum(axis=1)
    sxx = (x * x).sum(axis=1)
    sy = y.sum()
    syy = float((y * y).sum())
    sxy = x @ y
    denom = n * sxx - sx * sx
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    sse = (syy - 2.0 * slope * sxy - 2.0 * intercept * sy
           + slope**2 * sxx + 2.0 * slope * intercept * sx + n * intercept**2)
    rms = np.sqrt(np.maximum(sse, 0.0) / n)
    return rms, slope, intercept


def fit_blowup_rate(traj, law, window_fraction: float = 0.4) -> RateFit:
    """Fit the observed sup-norm growth against a blow-up law.

    ``law`` selects the linearization: a LogLaw fits M against ln(T - t),
    a PowerLaw fits ln M against ln(T - t).  Candidate blow-up times are
    scanned over (t_final, t_final + 2 (t_final - t_lo)] on a 400-point
    grid and the best candidate is refined by three zoom passes; the
    returned T minimizes the rms regression residual.
    """
    if getattr(traj, "status", None) not in ("blown_up", None):
        raise DomainError(f"trajectory status is {traj.status!r}, not blown_up")
    if not 0.0 < window_fraction <= 1.0:
        raise DomainError("window_fraction must lie in (0, 1]")
    is_log = isinstance(law, LogLaw) or law == "log"
    is_power = isinstance(law, PowerLaw) or law == "power"
    if not (is_log or is_power):
        raise DomainError("law must be a LogLaw or PowerLaw (or 'log'/'power')")

    ts = np.asarray(traj.step_times, dtype=float)
    Ms = np.asarray(traj.M_series, dtype=float)
    n = ts.size
    if n < 16:
        raise InsufficientDataError("fewer than 16 samples in the trajectory")
    lo = max(0, int(round(n * (1.0 - window_fraction))))
    lo = min(lo, n - 8)
    t_w, M_w = ts[lo:], Ms[lo:]

    if is_power:
        positive = Ms[Ms > 0]
        decades = math.log10(Ms[-1] / positive.min()) if positive.size else 0.0
        if decades < 1.5:
            raise InsufficientDataError(
                f"power-law fit needs >= 1.5 decades of sup-norm growth, "
                f"got {decades:.2f}")
        if np.any(M_w <= 0):
            raise InsufficientDataError("power-law fit needs positive sup norms")
        y = np.log(M_w)
    else:
        units = Ms[-1] - Ms[0]
        if units < 3.0:
            raise InsufficientDataError(
                f"log-law fit needs >= 3 units of sup-norm growth, "
                f"got {units:.2f}")
        y = M_w

    if t_w.size > _MAX_FIT_SAMPLES:
        idx = np.linspace(0, t_w.size - 1, _MAX_FIT_SAMPLES).astype(int)
        t_w, y = t_w[idx], y[idx]

    t_final = float(ts[-1])
    span = 2.0 * (t_final - float(t_w[0]))
    eps = span / _SCAN_POINTS
    T_lo, T_hi = t_final + 1e-3 * eps, t_final + span
    best = None
    for _ in range(1 + _ZOOM_ROUNDS):
        T_grid = np.linspace(T_lo, T_hi, _SCAN_POINTS)
        rms, slope, intercept = _scan_T(t_w, y, T_grid)
        k = int(np.argmin(rms))
        best = (float(T_grid[k]), float(slope[k]), float(intercept[k]),
                float(rms[k]))
        dT = (T_hi - T_lo) / (_SCAN_POINTS - 1)
        T_lo = max(t_final + 1e-6 * eps, best[0] - 2.0 * dT)
        T_hi = best[0] + 2.0 * dT

    T_hat, slope, intercept, rms = best
    coeff = math.exp(intercept) if is_power else intercept
    return RateFit(T_hat=T_hat, slope_or_exponent=slope,
                   intercept_or_coefficient=coeff, residual=rms,
                   window=(float(t_w[0]), t_final))


# -- boundary layer ------------------------------------------------------------


def _layer_coordinate(nl: Nonlinearity, U: float) -> float:
    """G(U) = int_0^U F^(-1/2)(s) ds (the stretched boundary coordinate
    times sqrt(2))."""
    val, _ = quad(lambda s: nl.F(s) ** -0.5, 0.0, U,
                  epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def boundary_layer_profile(nl: Nonlinearity, y_grid):
    """Invert sqrt(2) y = int_0^U F^(-1/2) ds for U on the given y grid.

    Returns (U values, U'(0)).  Self-checks that the stretched-layer mass
    int_0^inf f(U(y)) dy equals U'(0) = sqrt(2) within 1%.
    """
    y_grid = np.asarray(y_grid, dtype=float)
    if y_grid.size == 0 or y_grid[0] < 0 or np.any(np.diff(y_grid) <= 0):
        raise DomainError("y grid must be increasing and start at y >= 0")

    def U_of_y(y: float, lo: float = 0.0) -> float:
        if y == 0.0:
            return 0.0
        target = math.sqrt(2.0) * y
        hi = max(2.0 * y, lo + 1.0)
        while _layer_coordinate(nl, hi) < target:
            hi *= 2.0
            if hi > 1e6:
                raise NumericsError("boundary layer inversion failed to bracket")
        return brentq(lambda U: _layer_coordinate(nl, U) - target, lo, hi,
                      xtol=1e-13, rtol=8.9e-16)

    U = np.empty_like(y_grid)
    prev = 0.0
    for i, y in enumerate(y_grid):
        prev = U_of_y(float(y), lo=prev)
        U[i] = prev

    # second-order one-sided difference at internal nodes
    h0 = 1e-4
    Uprime0 = (4.0 * U_of_y(h0) - U_of_y(2.0 * h0)) / (2.0 * h0)

    # layer-mass consistency check: int f(U(y)) dy == U'(0) == sqrt(2)
    y_cut = 1.0
    while nl.f(U_of_y(y_cut)) > 1e-10:
        y_cut *= 2.0
        if y_cut > 1e6:  # pragma: no cover
            raise NumericsError("kernel tail decays too slowly along the layer")
    mass, _ = quad(lambda y: nl.f(U_of_y(y)), 0.0, y_cut,
                   epsabs=1e-10, epsrel=1e-9, limit=200)
    mass += math.sqrt(2.0 * nl.F(U_of_y(y_cut)))  # analytic remainder
    root2 = math.sqrt(2.0)
    if abs(mass - Uprime0) > 0.01 * root2 or abs(Uprime0 - root2) > 0.01 * root2:
        raise NumericsError(
            f"boundary-layer self-check failed: mass {mass:.6f}, "
            f"U'(0) {Uprime0:.6f}, expected {root2:.6f}")
    return U, float(Uprime0)


# -- growth-function diagnostics ------------------------------------------------


@dataclass(frozen=True)
class GrowthDiagnostics:
    """Tabulated g(M) = f(M) sqrt(mu(M)) / F(M) and its companion limits.

    ``sqrt_mu_f`` and ``M_over_sqrt_2mu`` must decay to zero for admissible
    kernels; whether liminf g > 0 holds is family-specific and is reported,
    not asserted.
    """

    M: np.ndarray
    g: np.ndarray
    sqrt_mu_f: np.ndarray
    mu_f: np.ndarray
    M_over_sqrt_2mu: np.ndarray

    @property
    def sqrt_mu_f_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.sqrt_mu_f) < 0))

    @property
    def ratio_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.M_over_sqrt_2mu) < 0))

    @property
    def g_tail_min(self) -> float:
        tail = self.g[self.M >= 0.5 * self.M[-1]]
        return float(tail.min()) if tail.size else float(self.g.min())


def g_diagnostic(nl: Nonlinearity, M_grid,
                 half_length: float = 1.0) -> GrowthDiagnostics:
    """Evaluate the layer growth function and its limit companions on a
    grid of center values."""
    M_grid = np.asarray(M_grid, dtype=float)
    if M_grid.size == 0 or np.any(M_grid <= 0) or np.any(np.diff(M_grid) <= 0):
        raise DomainError("M grid must be positive and increasing")
    mu = np.array([mu_of_M_flat(nl, float(M), half_length) for M in M_grid])
    fM = nl.f(M_grid)
    FM = nl.F(M_grid)
    return GrowthDiagnostics(
        M=M_grid,
        g=fM * np.sqrt(mu) / FM,
        sqrt_mu_f=np.sqrt(mu) * fM,
        mu_f=mu * fM,
        M_over_sqrt_2mu=M_grid / np.sqrt(2.0 * mu),
    )
