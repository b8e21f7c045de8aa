"""Time evolution of the nonlocal problem by the method of lines.

Space is discretized with second-order central differences on a uniform
grid (the full interval (-L, L), or the radial segment [0, R] with the
regularized center Delta u(0) ~ 2n (u_1 - u_0) / h^2), and the nonlocal
integral I(t) = int_Omega f(u) dx by composite Simpson with the domain's
radial weight.  Time stepping uses the embedded Bogacki-Shampine 3(2)
explicit pair with local error control, under the parabolic stability cap
dt <= 0.4 h^2.  Dirichlet values are pinned to zero at every stage.

A run terminates in one of four states:

* ``converged``         the semi-discrete residual dropped below the steady
                        tolerance (the profile is a fixed point);
* ``blown_up``          the sup norm is above M_big, I(t) is down by more
                        than 10x, and either dt collapsed below dt_min or
                        the reaction boundary layer (width 1/sqrt(g),
                        g = lambda/I^p) fell below the cell size.  The
                        second trigger matters: once the layer is subgrid,
                        the boundary-cell quadrature floors I at ~h f(0)
                        and the discrete system manufactures an artifact
                        steady state that has no continuum counterpart, so
                        integration past that point is meaningless.  The
                        blow-up time is extrapolated from the terminal
                        growth law;
* ``diverging``         the sup norm grew through M_big but every
                        finite-time extrapolation recedes, the
                        critical-threshold signature (heuristic);
* ``max_time_reached``  none of the above by t_max.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .domain import Ball, DomainSpec, Interval
from .errors import DomainError, NumericsError
from .nonlinearity import Nonlinearity
from .steady import SteadyProfile, solve_radial_steady

STATUS_CONVERGED = "converged"
STATUS_BLOWN_UP = "blown_up"
STATUS_DIVERGING = "diverging"
STATUS_MAX_TIME = "max_time_reached"

LABEL_CONVERGED = "Converged"
LABEL_BLOWN_UP = "BlownUp"
LABEL_DIVERGING = "Diverging"
LABEL_UNDETERMINED = "Undetermined"


# -- problem description -----------------------------------------------------


@dataclass(frozen=True)
class InitialData:
    """Initial profile tag: zero | steady(mu) | bump(amplitude) | samples."""

    kind: str
    mu: float | None = None
    amplitude: float | None = None
    x: np.ndarray | None = field(default=None, repr=False)
    u: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def zero(cls):
        return cls(kind="zero")

    @classmethod
    def steady(cls, mu: float):
        if mu <= 0:
            raise DomainError("steady initial data needs mu > 0")
        return cls(kind="steady", mu=float(mu))

    @classmethod
    def bump(cls, amplitude: float):
        if amplitude < 0:
            raise DomainError("bump amplitude must be nonnegative")
        return cls(kind="bump", amplitude=float(amplitude))

    @classmethod
    def tabulated(cls, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if x.shape != u.shape or x.ndim != 1:
            raise DomainError("tabulated initial data needs matching 1-d arrays")
        if np.any(u < 0):
            raise DomainError("initial data must be nonnegative")
        return cls(kind="tabulated", x=x, u=u)


@dataclass(frozen=True)
class ProblemSpec:
    """The evolution problem: kernel, coupling lambda and p, domain, u0."""

    nl: Nonlinearity
    lam: float
    p: float
    dom: DomainSpec
    u0: InitialData

    def __post_init__(self):
        if self.lam <= 0 or self.p <= 0:
            raise DomainError("lambda and p must be positive")


@dataclass(frozen=True)
class Controls:
    """Integration controls.

    ``tol`` is the local-error target of the embedded pair; ``dt_min`` and
    ``M_big`` gate the blow-up declaration; ``steady_tol`` is the
    semi-discrete residual, relative to the u = 0 reaction scale, below
    which the run is declared converged.
    """

    t_max: float
    dt_min: float = 1e-13
    M_big: float = 10.0
    tol: float = 1e-6
    steady_tol: float = 1e-8
    output_times: tuple = ()
    max_steps: int = 50_000_000

    def __post_init__(self):
        if min(self.t_max, self.dt_min, self.M_big, self.tol, self.steady_tol) <= 0:
            raise DomainError("all controls must be positive")


@dataclass
class Trajectory:
    """Output of one integration."""

    prob: ProblemSpec
    controls: Controls
    x: np.ndarray                 # spatial nodes
    times: np.ndarray             # snapshot times
    snapshots: list               # u profiles at the snapshot times
    step_times: np.ndarray        # accepted-step times
    M_series: np.ndarray          # sup norm per accepted step
    I_series: np.ndarray          # nonlocal integral per accepted step
    rate_series: np.ndarray       # du/dt at the argmax node per accepted step
    status: str
    steady_residual_final: float | None = None
    T_est: float | None = None
    T_ci: float | None = None
    step_log: dict = field(default_factory=dict)

    @property
    def final_profile(self) -> np.ndarray:
        return self.snapshots[-1]


# -- spatial operators -------------------------------------------------------


def _evolution_grid(dom: DomainSpec, grid_size: int) -> np.ndarray:
    if isinstance(dom, Interval):
        return np.linspace(-dom.half_length, dom.half_length, grid_size + 1)
    return np.linspace(0.0, dom.radius, grid_size + 1)


def _simpson_weights(x: np.ndarray, dom: DomainSpec) -> np.ndarray:
    """Composite-Simpson weights including the domain's radial weight."""
    n = x.size
    if n % 2 == 0:
        raise DomainError("Simpson weights need an odd node count (even grid_size)")
    h = x[1] - x[0]
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= h / 3.0
    if isinstance(dom, Ball):
        surface = dom.boundary_measure / dom.radius ** (dom.dim - 1)
        w *= surface * x ** (dom.dim - 1) if dom.dim > 1 else surface
    return w


def _reaction_scale(prob: ProblemSpec) -> float:
    # reaction magnitude at u = 0; the natural residual scale
    f0 = prob.nl.f(0.0)
    return prob.lam * f0 / (f0 * prob.dom.volume) ** prob.p


def _make_rhs(prob: ProblemSpec, x: np.ndarray):
    """Semi-discrete right-hand side.

    The returned rhs(u, out) fills du/dt into ``out`` (zero at Dirichlet
    nodes) and returns the nonlocal integral I(u).
    """
    nl, lam, p = prob.nl, prob.lam, prob.p
    radial = isinstance(prob.dom, Ball)
    h = x[1] - x[0]
    inv_h2 = 1.0 / (h * h)
    weights = _simpson_weights(x, prob.dom)
    if radial:
        n = prob.dom.dim
        center_coeff = 2.0 * n * inv_h2
        curv = np.zeros(x.size - 2)
        if n > 1:
            curv = (n - 1.0) / x[1:-1] / (2.0 * h)

    fbuf = np.empty_like(x)
    fast_exp = nl.family == "exponential"

    def rhs(u, out):
        # trial stages may undershoot slightly below zero; f only sees s >= 0
        np.maximum(u, 0.0, out=fbuf)
        if fast_exp:
            np.negative(fbuf, out=fbuf)
            np.exp(fbuf, out=fbuf)
            fu = fbuf
        else:
            fu = nl.f(fbuf)
        I = float(np.dot(weights, fu))
        g = lam / I**p
        out[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) * inv_h2
        out[1:-1] += g * fu[1:-1]
        if radial:
            if n > 1:
                out[1:-1] += curv * (u[2:] - u[:-2])
            out[0] = center_coeff * (u[1] - u[0]) + g * fu[0]
        else:
            out[0] = 0.0
        out[-1] = 0.0
        return I

    return rhs, weights, h


def materialize_u0(prob: ProblemSpec, x: np.ndarray,
                   steady_grid: int | None = None) -> np.ndarray:
    """Evaluate the initial-data tag on the evolution grid."""
    u0 = prob.u0
    dom = prob.dom
    if u0.kind == "zero":
        u = np.zeros_like(x)
    elif u0.kind == "bump":
        if isinstance(dom, Interval):
            u = u0.amplitude * np.cos(0.5 * math.pi * x / dom.half_length)
        else:
            u = u0.amplitude * (1.0 - (x / dom.radius) ** 2)
    elif u0.kind == "steady":
        prof = solve_radial_steady(prob.nl, u0.mu, dom,
                                   steady_grid or max(512, x.size - 1))
        u = profile_on_grid(prof, x, dom)
    elif u0.kind == "tabulated":
        u = np.interp(x, u0.x, u0.u)
    else:  # pragma: no cover
        raise DomainError(f"unknown initial data kind {u0.kind!r}")
    u = np.maximum(u, 0.0)
    u[-1] = 0.0
    if isinstance(dom, Interval):
        u[0] = 0.0
    return u


def profile_on_grid(prof: SteadyProfile, x: np.ndarray,
                    dom: DomainSpec) -> np.ndarray:
    """Monotone-cubic interpolation of a steady profile onto an evolution grid."""
    from scipy.interpolate import PchipInterpolator

    interp = PchipInterpolator(prof.r, prof.w, extrapolate=False)
    r = np.abs(x) if isinstance(dom, Interval) else x
    u = interp(np.clip(r, prof.r[0], prof.r[-1]))
    return np.nan_to_num(u, nan=0.0)


def steady_residual(u: np.ndarray, prob: ProblemSpec) -> float:
    """Discrete sup norm of Delta u + lambda f(u) / I(u)^p over interior nodes."""
    x = _evolution_grid(prob.dom, u.size - 1)
    rhs, _, _ = _make_rhs(prob, x)
    out = np.empty_like(u)
    rhs(u, out)
    interior = out[1:-1] if isinstance(prob.dom, Interval) else out[:-1]
    return float(np.abs(interior).max())


# -- time stepping -------------------------------------------------------------

_SAFETY = 0.9
_MIN_SHRINK = 0.2
_MAX_GROW = 5.0
_DIFFUSION_CAP = 0.4


def integrate(prob: ProblemSpec, grid_size: int,
              controls: Controls) -> Trajectory:
    """March the semi-discrete system to a terminal status.

    Bogacki-Shampine 3(2) with error control on ``controls.tol``, the
    diffusion cap dt <= 0.4 h^2, and FSAL stage reuse.
    """
    if grid_size < 128:
        raise DomainError("grid_size must be at least 128")
    if grid_size % 2 != 0:
        raise DomainError("grid_size must be even (Simpson weights)")
    x = _evolution_grid(prob.dom, grid_size)
    u = materialize_u0(prob, x)
    rhs, _, h = _make_rhs(prob, x)

    tol = controls.tol
    t_max = controls.t_max
    dt_cap = _DIFFUSION_CAP * h * h
    conv_threshold = controls.steady_tol * _reaction_scale(prob)
    interval = isinstance(prob.dom, Interval)
    neg_floor = -10.0 * tol

    out_times = sorted(set(float(t) for t in controls.output_times
                           if 0.0 < t <= t_max))
    next_out = 0
    snap_times: list[float] = []
    snapshots: list[np.ndarray] = []

    k1 = np.empty_like(u)
    k2 = np.empty_like(u)
    k3 = np.empty_like(u)
    k4 = np.empty_like(u)
    utmp = np.empty_like(u)
    uold = np.empty_like(u)

    t = 0.0
    I0 = rhs(u, k1)
    ts = [0.0]
    Ms = [float(u.max())]
    Is = [I0]
    rates = [float(k1[int(np.argmax(u))])]

    dt_ctrl = min(dt_cap, 1e-3 * t_max)
    accepted = rejected = 0
    status = None
    t_floor = 1e-12 * max(1.0, t_max)

    while t < t_max - t_floor:
        if accepted >= controls.max_steps:
            warnings.warn("max_steps reached before t_max", stacklevel=2)
            break
        dt = min(dt_ctrl, t_max - t)
        time_capped = dt < dt_ctrl

        # Bogacki-Shampine 3(2) stages (k1 is fresh: FSAL)
        np.multiply(k1, 0.5 * dt, out=utmp)
        utmp += u
        rhs(utmp, k2)
        np.multiply(k2, 0.75 * dt, out=utmp)
        utmp += u
        rhs(utmp, k3)
        np.copyto(uold, u)
        unew = u
        unew += dt * ((2.0 / 9.0) * k1 + (1.0 / 3.0) * k2 + (4.0 / 9.0) * k3)
        I_new = rhs(unew, k4)
        err = dt * np.abs(-(5.0 / 72.0) * k1 + (1.0 / 12.0) * k2
                          + (1.0 / 9.0) * k3 - (1.0 / 8.0) * k4)
        err_norm = float((err / (tol * (1.0 + np.abs(unew)))).max())

        if err_norm <= 1.0:
            umin = float(unew.min())
            if umin < 0.0:
                if umin < neg_floor:
                    raise NumericsError(
                        f"solution undershot to {umin:.3e}, beyond the "
                        f"-10*tol floor {neg_floor:.3e}: scheme failure"
                    )
                np.maximum(unew, 0.0, out=unew)
                I_new = rhs(unew, k4)
            t += dt
            k1, k4 = k4, k1  # FSAL: k4 was evaluated at the accepted state
            accepted += 1
            ts.append(t)
            Ms.append(float(unew.max()))
            Is.append(I_new)
            rates.append(float(k1[int(np.argmax(unew))]))

            while next_out < len(out_times) and t >= out_times[next_out]:
                t_req = out_times[next_out]
                frac = (t_req - (t - dt)) / dt
                snap_times.append(t_req)
                snapshots.append(uold + frac * (unew - uold))
                next_out += 1

            if I_new <= 0.0 or not math.isfinite(I_new):
                # drop the degenerate sample so I_series stays positive
                ts.pop(), Ms.pop(), Is.pop(), rates.pop()
                if Ms[-1] > controls.M_big and Is[-1] < 0.1 * I0:
                    status = STATUS_BLOWN_UP
                    break
                raise NumericsError("nonlocal integral underflowed to zero")

            if (I_new < 0.1 * I0 and Ms[-1] > controls.M_big
                    and (prob.lam / I_new**prob.p) * h * h >= 1.0):
                # the reaction layer is subgrid: past this point the
                # boundary-cell quadrature floor on I fabricates a spurious
                # discrete steady state, so stop here as blown up
                status = STATUS_BLOWN_UP
                break

            resid = float(np.abs(k1[1:-1]).max()) if interval \
                else float(np.abs(k1[:-1]).max())
            if resid <= conv_threshold:
                status = STATUS_CONVERGED
                break
        else:
            rejected += 1
            np.copyto(u, uold)  # u was overwritten by the trial state

        factor = _SAFETY * err_norm ** (-1.0 / 3.0) if err_norm > 0 else _MAX_GROW
        dt_ctrl = min(dt * min(_MAX_GROW, max(_MIN_SHRINK, factor)), dt_cap)
        if dt_ctrl < controls.dt_min and not time_capped:
            if Ms[-1] > controls.M_big and Is[-1] < 0.1 * I0:
                status = STATUS_BLOWN_UP
            else:
                raise NumericsError(
                    f"step size collapsed to {dt_ctrl:.3e} at t={t:.6g} "
                    "without the blow-up signature"
                )
            break

    ts = np.asarray(ts)
    Ms = np.asarray(Ms)
    Is = np.asarray(Is)
    rates = np.asarray(rates)
    if status is None:
        status = STATUS_MAX_TIME

    T_est = T_ci = None
    if status == STATUS_BLOWN_UP:
        T_est, T_ci = _blowup_time_estimate(ts, Ms, rates)
    elif status == STATUS_MAX_TIME and Ms[-1] > controls.M_big:
        if _receding(blowup_time_checkpoints(ts, Ms, rates)):
            status = STATUS_DIVERGING

    resid_final = steady_residual(u, prob) if status == STATUS_CONVERGED else None

    if not snap_times or snap_times[-1] < t - t_floor:
        snap_times.append(t)
        snapshots.append(u.copy())

    return Trajectory(
        prob=prob,
        controls=controls,
        x=x,
        times=np.asarray(snap_times),
        snapshots=snapshots,
        step_times=ts,
        M_series=Ms,
        I_series=Is,
        rate_series=rates,
        status=status,
        steady_residual_final=resid_final,
        T_est=T_est,
        T_ci=T_ci,
        step_log={"accepted": accepted, "rejected": rejected},
    )


# -- blow-up time extrapolation ------------------------------------------------


def _fit_rate_model(M: np.ndarray, rate: np.ndarray):
    """Fit dM/dt = a exp(c M) or a M^q over a window, whichever regresses
    better in log space; returns (kind, a, exponent, rms) or None."""
    good = rate > 0
    if good.sum() < 4:
        return None
    M, rate = M[good], rate[good]
    ln_rate = np.log(rate)
    c, ln_a = np.polyfit(M, ln_rate, 1)
    res_exp = float(np.sqrt(np.mean((ln_a + c * M - ln_rate) ** 2)))
    model = ("exp", math.exp(ln_a), float(c), res_exp)
    if np.all(M > 0):
        q, ln_a2 = np.polyfit(np.log(M), ln_rate, 1)
        res_pow = float(np.sqrt(np.mean((ln_a2 + q * np.log(M) - ln_rate) ** 2)))
        if res_pow < res_exp:
            model = ("power", math.exp(ln_a2), float(q), res_pow)
    return model


def _remaining_time(model, M_end: float) -> float:
    """Closed-form tail integral int_{M_end}^inf dM / rate(M)."""
    kind, a, c, _ = model
    if kind == "exp":
        if c <= 0:
            return math.inf
        return math.exp(-c * M_end) / (a * c)
    if c <= 1.0:
        return math.inf
    return M_end ** (1.0 - c) / (a * (c - 1.0))


def _window_estimate(ts, Ms, rates, frac: float) -> float:
    n = ts.size
    lo = min(max(0, int(n * (1.0 - frac))), max(0, n - 8))
    model = _fit_rate_model(Ms[lo:], rates[lo:])
    if model is None:
        return math.inf
    return float(ts[-1]) + _remaining_time(model, float(Ms[-1]))


def _blowup_time_estimate(ts, Ms, rates):
    """Median and spread of the tail-integral extrapolation over the last
    three fitting windows."""
    estimates = [_window_estimate(ts, Ms, rates, f) for f in (0.4, 0.25, 0.15)]
    finite = [e for e in estimates if math.isfinite(e)]
    if not finite:
        return math.inf, math.inf
    T = float(np.median(finite))
    ci = max(max(finite) - min(finite), 1e-9 * max(1.0, T))
    return T, ci


def blowup_time_checkpoints(ts, Ms, rates, fractions=(0.7, 0.85, 1.0)):
    """Finite-time extrapolations computed as if the run had ended at each
    checkpoint; receding values are the divergence signature."""
    n = ts.size
    out = []
    for f in fractions:
        k = max(8, int(n * f))
        out.append(_window_estimate(ts[:k], Ms[:k], rates[:k], 0.5))
    return out


def _receding(estimates) -> bool:
    if any(not math.isfinite(e) for e in estimates):
        return True
    return all(b > a * (1.0 + 1e-6) for a, b in zip(estimates, estimates[1:]))


# -- classification --------------------------------------------------------------


def classify(traj: Trajectory, steady_oracle=None) -> str:
    """Regime label for a completed trajectory.

    ``steady_oracle`` may be a SteadyBranch; it sharpens the converged
    check by comparing the final profile against the nearest branch
    profile.  The diverging label (receding finite-time extrapolations) is
    a heuristic operationalization of the critical-threshold behavior.
    """
    if traj.status == STATUS_BLOWN_UP:
        return LABEL_BLOWN_UP
    if traj.status == STATUS_CONVERGED:
        return LABEL_CONVERGED
    if traj.status == STATUS_DIVERGING:
        return LABEL_DIVERGING

    M = traj.M_series
    k = max(2, M.size // 5)
    drift = abs(M[-1] - M[-k]) / max(M[-1], 1e-300)
    resid = steady_residual(traj.final_profile, traj.prob)
    if drift < 1e-6 and resid < 1e-5 * _reaction_scale(traj.prob):
        return LABEL_CONVERGED
    if steady_oracle is not None and drift < 1e-4:
        target = _nearest_branch_profile(traj, steady_oracle)
        if target is not None:
            dev = float(np.abs(traj.final_profile - target).max())
            if dev < 1e-3 * max(1.0, float(target.max())):
                return LABEL_CONVERGED
    if M[-1] > traj.controls.M_big and M[-1] > M[0]:
        estimates = blowup_time_checkpoints(traj.step_times, traj.M_series,
                                            traj.rate_series)
        if _receding(estimates):
            return LABEL_DIVERGING
    return LABEL_UNDETERMINED


def _nearest_branch_profile(traj, branch):
    M_end = traj.M_series[-1]
    i = int(np.argmin(np.abs(branch.M - M_end)))
    try:
        prof = solve_radial_steady(branch.nl, float(branch.mu[i]), branch.dom,
                                   max(512, traj.x.size - 1))
    except Exception:
        return None
    return profile_on_grid(prof, traj.x, branch.dom)
