"""Reaction kernels.

A kernel is a positive, strictly decreasing function f on [0, inf) with a
finite tail integral, normalized so that int_0^inf f(s) ds = 1.  Alongside
f itself the solvers need its tail integral

    F(s) = int_s^inf f(sigma) dsigma,

which equals 1 at s = 0 after normalization, and the numerically stable
gap F(s) - F(M) that appears inside every first-integral quadrature.

Three families are supported:

* ``exponential``   f(s) = exp(-s)
* ``algebraic``     f(s) = b (1+s)^(-1-b),  b > 0
* ``tabulated``     monotone PCHIP through user samples, with a declared
                    analytic tail (exponential or power) past the last sample
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, ExtrapolationError

EXPONENTIAL = "exponential"
ALGEBRAIC = "algebraic"
TABULATED = "tabulated"

# Default admissibility probe: 0 to 100, 1001 points, log-refined near 0.
_DEFAULT_PROBE = np.concatenate(([0.0], np.geomspace(1e-4, 100.0, 1000)))


def _as_array(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise DomainError("kernel arguments must satisfy s >= 0")
    return arr


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """Immutable reaction kernel; safe for concurrent reads.

    Construct through :meth:`exponential`, :meth:`algebraic` or
    :meth:`tabulated` rather than directly.
    """

    family: str
    b: float | None = None
    scale: float = 1.0
    samples_s: np.ndarray | None = field(default=None, repr=False)
    samples_f: np.ndarray | None = field(default=None, repr=False)
    tail: tuple | None = None
    _pchip: object = field(default=None, repr=False)
    _anti: object = field(default=None, repr=False)
    _tail_integral: float = field(default=0.0, repr=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def exponential(cls) -> "Nonlinearity":
        return cls(family=EXPONENTIAL)

    @classmethod
    def algebraic(cls, b: float) -> "Nonlinearity":
        if b <= 0:
            raise DomainError("algebraic kernel needs b > 0")
        return cls(family=ALGEBRAIC, b=float(b))

    @classmethod
    def tabulated(cls, s, f, tail=None) -> "Nonlinearity":
        """Kernel interpolated through samples (s_i, f_i).

        Parameters
        ----------
        s, f : array_like
            Sample grid starting at s = 0, strictly increasing, and the
            (positive) kernel values there.
        tail : None, str or (str, float)
            Analytic form past the last sample: ``"exponential"`` for
            C exp(-kappa s) or ``"power"`` for C s^(-q).  The rate/exponent
            may be given explicitly as the second tuple entry; otherwise it
            is fitted from the last two samples.  Without a declared tail the
            kernel can still be evaluated pointwise but has no tail integral.
        """
        s = np.asarray(s, dtype=float)
        f = np.asarray(f, dtype=float)
        if s.ndim != 1 or s.shape != f.shape or s.size < 4:
            raise DomainError("tabulated kernel needs matching 1-d arrays with >= 4 samples")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0):
            raise DomainError("sample grid must start at 0 and strictly increase")
        if np.any(f <= 0):
            raise DomainError("kernel samples must be positive")
        tail_spec = cls._resolve_tail(tail, s, f)
        pchip = PchipInterpolator(s, f, extrapolate=False)
        anti = pchip.antiderivative()
        tail_int = cls._tail_area(tail_spec, s[-1], f[-1]) if tail_spec else np.inf
        total = float(anti(s[-1])) + tail_int
        scale = 1.0 / total if np.isfinite(total) and total > 0 else 1.0
        if np.isfinite(total) and abs(total - 1.0) > 1e-9:
            warnings.warn(
                "tabulated kernel rescaled by %.6g to normalize the tail integral; "
                "f' scales by the same factor" % scale,
                stacklevel=2,
            )
        s.flags.writeable = False
        f.flags.writeable = False
        return cls(
            family=TABULATED,
            scale=scale,
            samples_s=s,
            samples_f=f,
            tail=tail_spec,
            _pchip=pchip,
            _anti=anti,
            _tail_integral=tail_int,
        )

    @staticmethod
    def _resolve_tail(tail, s, f):
        if tail is None:
            return None
        if isinstance(tail, str):
            kind, param = tail, None
        else:
            kind, param = tail
        if kind == "exponential":
            if param is None:
                param = np.log(f[-2] / f[-1]) / (s[-1] - s[-2])
            if param <= 0:
                raise DomainError("exponential tail needs a positive decay rate")
        elif kind == "power":
            if s[-2] <= 0:
                raise DomainError("power tail fit needs positive trailing sample locations")
            if param is None:
                param = np.log(f[-2] / f[-1]) / np.log(s[-1] / s[-2])
            if param <= 0:
                raise DomainError("power tail needs a positive exponent")
        else:
            raise DomainError(f"unknown tail form {kind!r}")
        return (kind, float(param))

    @staticmethod
    def _tail_area(tail_spec, s_last, f_last):
        kind, param = tail_spec
        if kind == "exponential":
            return f_last / param
        # power tail C s^-q: finite area only for q > 1
        if param <= 1.0:
            return np.inf
        return f_last * s_last / (param - 1.0)

    # -- point evaluation --------------------------------------------------

    def f(self, s):
        """Kernel value f(s); s may be a scalar or array, all entries >= 0."""
        arr = _as_array(s)
        if self.family == EXPONENTIAL:
            out = np.exp(-arr)
        elif self.family == ALGEBRAIC:
            out = self.b * (1.0 + arr) ** (-1.0 - self.b)
        else:
            if np.any(arr > self.samples_s[-1]):
                raise ExtrapolationError(
                    "tabulated kernel queried at s beyond the last sample "
                    f"({self.samples_s[-1]:g})"
                )
            out = self.scale * self._pchip(arr)
        return float(out) if np.isscalar(s) else out

    def f_scalar(self, v: float) -> float:
        # fast scalar path for ODE right-hand sides; assumes v >= 0
        if self.family == EXPONENTIAL:
            return math.exp(-v)
        if self.family == ALGEBRAIC:
            return self.b * (1.0 + v) ** (-1.0 - self.b)
        return self.scale * float(self._pchip(v))

    def fprime(self, s):
        """Derivative f'(s); negative everywhere for an admissible kernel."""
        arr = _as_array(s)
        if self.family == EXPONENTIAL:
            out = -np.exp(-arr)
        elif self.family == ALGEBRAIC:
            out = -self.b * (1.0 + self.b) * (1.0 + arr) ** (-2.0 - self.b)
        else:
            if np.any(arr > self.samples_s[-1]):
                raise ExtrapolationError("tabulated kernel queried beyond its grid")
            out = self.scale * self._pchip.derivative()(arr)
        return float(out) if np.isscalar(s) else out

    def F(self, s):
        """Tail integral F(s) = int_s^inf f; equals 1 at s = 0."""
        arr = _as_array(s)
        if self.family == EXPONENTIAL:
            out = np.exp(-arr)
        elif self.family == ALGEBRAIC:
            out = (1.0 + arr) ** (-self.b)
        else:
            out = self._tabulated_F(arr)
        return float(out) if np.isscalar(s) else out

    def _tabulated_F(self, arr):
        if self.tail is None:
            raise DomainError(
                "tabulated kernel has no declared tail; its tail integral is undefined"
            )
        s_last = self.samples_s[-1]
        f_last = self.samples_f[-1]
        if not np.isfinite(self._tail_integral):
            return np.full_like(arr, np.inf)
        inside = np.minimum(arr, s_last)
        out = self.scale * (
            float(self._anti(s_last)) - self._anti(inside) + self._tail_integral
        )
        beyond = arr > s_last
        if np.any(beyond):
            kind, param = self.tail
            if kind == "exponential":
                out = np.where(
                    beyond,
                    self.scale * f_last / param * np.exp(-param * (arr - s_last)),
                    out,
                )
            else:
                out = np.where(
                    beyond,
                    self.scale * f_last * s_last / (param - 1.0)
                    * (arr / s_last) ** (1.0 - param),
                    out,
                )
        return out

    def F_gap(self, s, M):
        """F(s) - F(M) for s <= M, evaluated without cancellation.

        The gap enters quadratures as 1/sqrt(F(s) - F(M)); close to s = M a
        naive subtraction loses the leading digits, so the built-in families
        use expm1/log1p forms that are exact to machine precision.
        """
        arr = _as_array(s)
        if self.family == EXPONENTIAL:
            out = -np.exp(-arr) * np.expm1(arr - M)
        elif self.family == ALGEBRAIC:
            out = -((1.0 + arr) ** (-self.b)) * np.expm1(
                self.b * (np.log1p(arr) - np.log1p(M))
            )
        else:
            out = self._tabulated_F(arr) - self._tabulated_F(np.asarray(M, dtype=float))
        return float(out) if np.isscalar(s) else out

    def F_gap_delta(self, s, delta):
        """F(s) - F(s + delta) with the gap width delta given explicitly.

        Quadrature substitutions know delta = M - s exactly; recomputing it
        from rounded s and M would reintroduce the cancellation that F_gap
        is written to avoid.
        """
        arr = _as_array(s)
        delta = np.asarray(delta, dtype=float)
        if self.family == EXPONENTIAL:
            out = -np.exp(-arr) * np.expm1(-delta)
        elif self.family == ALGEBRAIC:
            out = -((1.0 + arr) ** (-self.b)) * np.expm1(
                self.b * np.log1p(-delta / (1.0 + arr + delta))
            )
        else:
            out = self._tabulated_F(arr) - self._tabulated_F(arr + delta)
        return float(out) if np.isscalar(s) else out


# -- module-level operation names ------------------------------------------


def eval_f(nl: Nonlinearity, s):
    """Evaluate the kernel, f(s)."""
    return nl.f(s)


def eval_F(nl: Nonlinearity, s):
    """Evaluate the tail integral, F(s)."""
    return nl.F(s)


@dataclass(frozen=True)
class Violation:
    kind: str  # positivity | monotonicity | normalization
    where: float | None
    detail: str


@dataclass(frozen=True)
class AdmissibilityReport:
    violations: tuple
    probe_min: float
    probe_max: float

    @property
    def admissible(self) -> bool:
        return len(self.violations) == 0


def check_admissible(nl: Nonlinearity, probe_grid=None) -> AdmissibilityReport:
    """Probe positivity, strict decrease and normalization of a kernel.

    Violations are returned as data, never raised; an empty violation list
    means the kernel is admissible on the probe.
    """
    if probe_grid is None:
        probe = _DEFAULT_PROBE
    else:
        probe = np.asarray(probe_grid, dtype=float)
        if probe.size == 0 or np.any(np.diff(probe) < 0) or np.any(probe < 0):
            raise DomainError("probe grid must be nonempty, sorted and nonnegative")
    if nl.family == TABULATED:
        probe = probe[probe <= nl.samples_s[-1]]

    violations = []

    fv = nl.f(probe)
    bad = np.where(fv <= 0)[0]
    if bad.size:
        violations.append(
            Violation("positivity", float(probe[bad[0]]), f"f <= 0 at {bad.size} probe points")
        )

    if nl.family == TABULATED:
        # strict decrease checked on the raw samples by finite differences
        diffs = np.diff(nl.samples_f)
        bad = np.where(diffs >= 0)[0]
        if bad.size:
            violations.append(
                Violation(
                    "monotonicity",
                    float(nl.samples_s[bad[0]]),
                    f"non-decreasing sample pairs at {bad.size} locations",
                )
            )
    else:
        dv = nl.fprime(probe)
        bad = np.where(dv >= 0)[0]
        if bad.size:
            violations.append(
                Violation("monotonicity", float(probe[bad[0]]), "f' >= 0 on probe")
            )

    tol = 1e-6 if nl.family == TABULATED else 1e-10
    try:
        F0 = nl.F(0.0)
    except DomainError as exc:
        violations.append(Violation("normalization", 0.0, str(exc)))
    else:
        if not np.isfinite(F0):
            violations.append(
                Violation("normalization", 0.0, "tail integral diverges")
            )
        elif abs(F0 - 1.0) > tol:
            violations.append(
                Violation("normalization", 0.0, f"F(0) = {F0:.12g} differs from 1 beyond {tol:g}")
            )

    return AdmissibilityReport(
        violations=tuple(violations),
        probe_min=float(probe[0]) if probe.size else np.nan,
        probe_max=float(probe[-1]) if probe.size else np.nan,
    )
