"""Nonnegative profiles on [0, inf) used as the trial functions f and phi.

Each profile is callable on scalars or arrays and exposes what the
quadrature layer needs: ``breakpoints`` (interior points where the profile
is not smooth), ``support`` (right end of the support, ``inf`` if
unbounded), ``tail_exponent`` (algebraic decay rate, ``None`` for compact
support, ``inf`` for faster than any power) and ``complement`` (1 - f,
computed without cancellation where possible).  Profiles with a free scale
parameter name it in ``scale_param`` and rebuild via ``with_params``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, interpolate

from ltlab.errors import DomainError, QuadratureError

__all__ = [
    "Profile",
    "PowerDecayProfile",
    "WindowProfile",
    "PowerWindowProfile",
    "IndicatorProfile",
    "ExponentialProfile",
    "ScaledProfile",
    "TabulatedProfile",
    "integrate_profile",
]


class Profile:
    """Base class; subclasses implement ``_eval`` on float arrays."""

    scale_param: str | None = None
    breakpoints: tuple = ()
    support: float = math.inf
    tail_exponent: float | None = math.inf

    def _eval(self, t):
        raise NotImplementedError

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = self._eval(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    def complement(self, t):
        """1 - f(t)."""
        return 1.0 - self(t)

    def scalar(self):
        """Fast float -> float callable for quadrature integrands."""
        return lambda t: float(self._eval(np.asarray(t, dtype=float)))

    def scalar_complement(self):
        comp = self.complement
        return lambda t: float(comp(t))

    def with_params(self, **kw):
        return replace(self, **kw)

    def params(self) -> dict:
        return {"kind": type(self).__name__}

    def mass(self, epsrel: float = 1e-13) -> float:
        """int_0^inf f."""
        return integrate_profile(self, power=1, epsrel=epsrel)[0]

    def l2sq(self, epsrel: float = 1e-13) -> float:
        """int_0^inf f^2."""
        return integrate_profile(self, power=2, epsrel=epsrel)[0]


def integrate_profile(profile: Profile, power: int = 1, epsrel: float = 1e-13, limit: int = 200):
    """Integrate ``profile**power`` over [0, support], splitting at breakpoints.

    Returns ``(value, abserr)``.  An infinite support whose algebraic tail is
    not integrable returns ``(inf, 0)``.
    """
    sup = profile.support
    tail = profile.tail_exponent
    if math.isinf(sup) and tail is not None and power * tail <= 1.0:
        return math.inf, 0.0
    pts = sorted({float(b) for b in profile.breakpoints if 0.0 < b < sup})
    edges = [0.0] + pts
    if math.isinf(sup):
        edges.append(max(1.0, 2.0 * edges[-1]))
    else:
        edges.append(float(sup))

    fn = profile.scalar()

    def fun(x):
        return fn(x) ** power

    pieces = list(zip(edges[:-1], edges[1:]))
    if math.isinf(sup):
        pieces.append((edges[-1], math.inf))
    total, err = 0.0, 0.0
    for lo, hi in pieces:
        with warnings.catch_warnings():
            # accuracy is judged from the returned error estimate instead
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            v, e = integrate.quad(fun, lo, hi, epsabs=0.0, epsrel=epsrel, limit=limit)
        total += v
        err += e
    if not math.isfinite(total) or err > 1e-8 * abs(total):
        raise QuadratureError(f"integral of {profile.params()} failed: {total} +- {err}")
    return total, err


@dataclass(frozen=True)
class PowerDecayProfile(Profile):
    """f(t) = (1 + mu t^a)^(-p); decays like t^(-a p)."""

    a: float
    p: float
    mu: float = 1.0
    scale_param = "mu"

    def __post_init__(self):
        if not (self.a > 0 and self.p > 0 and self.mu > 0):
            raise DomainError(f"PowerDecayProfile needs a, p, mu > 0, got {self}")

    @property
    def tail_exponent(self):
        return self.a * self.p

    def _eval(self, t):
        return np.power(1.0 + self.mu * np.power(t, self.a), -self.p)

    def complement(self, t):
        t = np.asarray(t, dtype=float)
        out = -np.expm1(-self.p * np.log1p(self.mu * np.power(t, self.a)))
        return float(out) if out.ndim == 0 else out

    def scalar(self):
        a, p, mu = self.a, self.p, self.mu
        return lambda t: (1.0 + mu * t**a) ** (-p)

    def scalar_complement(self):
        a, p, mu = self.a, self.p, self.mu
        expm1, log1p = math.expm1, math.log1p
        return lambda t: -expm1(-p * log1p(mu * t**a))

    def params(self):
        return {"kind": "power_decay", "a": self.a, "p": self.p, "mu": self.mu}


@dataclass(frozen=True)
class WindowProfile(Profile):
    """phi(t) = (1 - t^alpha)^beta / (1 + t) on [0, 1], zero beyond."""

    alpha: float
    beta: float
    support = 1.0
    tail_exponent = None

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta >= 0):
            raise DomainError(f"WindowProfile needs alpha > 0, beta >= 0, got {self}")

    @property
    def breakpoints(self):
        return (1.0,)

    def _eval(self, t):
        inside = (t >= 0) & (t <= 1)
        tc = np.where(inside, t, 0.0)
        base = np.clip(1.0 - np.power(tc, self.alpha), 0.0, None)
        return np.where(inside, np.power(base, self.beta) / (1.0 + tc), 0.0)

    def scalar(self):
        al, be = self.alpha, self.beta

        def fn(t):
            if t < 0 or t > 1:
                return 0.0
            return max(1.0 - t**al, 0.0) ** be / (1.0 + t)

        return fn

    def params(self):
        return {"kind": "window", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class PowerWindowProfile(Profile):
    """phi(t) = (1 + b)(1 - t)^b on [0, 1]; unit mass for every b > -1."""

    b: float
    support = 1.0
    tail_exponent = None

    def __post_init__(self):
        if not (self.b > -1):
            raise DomainError(f"PowerWindowProfile needs b > -1, got {self.b}")

    @property
    def breakpoints(self):
        return (1.0,)

    def _eval(self, t):
        inside = (t >= 0) & (t < 1)
        tc = np.where(inside, t, 0.0)
        return np.where(inside, (1.0 + self.b) * np.power(1.0 - tc, self.b), 0.0)

    def scalar(self):
        b = self.b
        return lambda t: (1.0 + b) * (1.0 - t) ** b if 0 <= t < 1 else 0.0

    def params(self):
        return {"kind": "power_window", "b": self.b}


@dataclass(frozen=True)
class IndicatorProfile(Profile):
    """height * 1(t <= T)."""

    T: float = 1.0
    height: float = 1.0
    scale_param = "T"
    tail_exponent = None

    def __post_init__(self):
        if not (self.T > 0 and self.height > 0):
            raise DomainError(f"IndicatorProfile needs T, height > 0, got {self}")

    @property
    def support(self):
        return self.T

    @property
    def breakpoints(self):
        return (self.T,)

    def _eval(self, t):
        return np.where((t >= 0) & (t <= self.T), self.height, 0.0)

    def complement(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= self.T, 1.0 - self.height, 1.0)
        return float(out) if out.ndim == 0 else out

    def scalar(self):
        T, h = self.T, self.height
        return lambda t: h if 0 <= t <= T else 0.0

    def scalar_complement(self):
        T, h = self.T, self.height
        return lambda t: 1.0 - h if t <= T else 1.0

    def params(self):
        return {"kind": "indicator", "T": self.T, "height": self.height}


@dataclass(frozen=True)
class ExponentialProfile(Profile):
    """amplitude * exp(-rate t)."""

    rate: float = 1.0
    amplitude: float = 1.0
    scale_param = "rate"

    def __post_init__(self):
        if not (self.rate > 0 and self.amplitude > 0):
            raise DomainError(f"ExponentialProfile needs rate, amplitude > 0, got {self}")

    def _eval(self, t):
        return self.amplitude * np.exp(-self.rate * t)

    def complement(self, t):
        t = np.asarray(t, dtype=float)
        if self.amplitude == 1.0:
            out = -np.expm1(-self.rate * t)
        else:
            out = 1.0 - self.amplitude * np.exp(-self.rate * t)
        return float(out) if out.ndim == 0 else out

    def scalar(self):
        r, A = self.rate, self.amplitude
        return lambda t: A * math.exp(-r * t)

    def scalar_complement(self):
        r, A = self.rate, self.amplitude
        if A == 1.0:
            return lambda t: -math.expm1(-r * t)
        return lambda t: 1.0 - A * math.exp(-r * t)

    def params(self):
        return {"kind": "exponential", "rate": self.rate, "amplitude": self.amplitude}


@dataclass(frozen=True)
class ScaledProfile(Profile):
    """amplitude * base(ell * t)."""

    base: Profile
    ell: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not (self.ell > 0 and self.amplitude > 0):
            raise DomainError(f"ScaledProfile needs ell, amplitude > 0, got {self.ell}, {self.amplitude}")

    @property
    def support(self):
        return self.base.support / self.ell

    @property
    def breakpoints(self):
        return tuple(b / self.ell for b in self.base.breakpoints)

    @property
    def tail_exponent(self):
        return self.base.tail_exponent

    def _eval(self, t):
        return self.amplitude * self.base(self.ell * t)

    def complement(self, t):
        if self.amplitude == 1.0:
            return self.base.complement(self.ell * np.asarray(t, dtype=float))
        return 1.0 - self(t)

    def scalar(self):
        fn, ell, A = self.base.scalar(), self.ell, self.amplitude
        return lambda t: A * fn(ell * t)

    def scalar_complement(self):
        if self.amplitude != 1.0:
            fn = self.scalar()
            return lambda t: 1.0 - fn(t)
        fn, ell = self.base.scalar_complement(), self.ell
        return lambda t: fn(ell * t)

    def params(self):
        return {"kind": "scaled", "ell": self.ell, "amplitude": self.amplitude, "base": self.base.params()}


@dataclass(frozen=True)
class TabulatedProfile(Profile):
    """Interpolated samples, zero beyond the last abscissa.

    ``rule`` is ``"linear"`` or ``"pchip"``; both preserve nonnegativity.
    """

    x: tuple
    y: tuple
    rule: str = "linear"
    tail_exponent = None
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise DomainError("tabulated profile needs matching 1-D x, y with >= 2 points")
        if x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise DomainError("abscissae must start at 0 and increase strictly")
        if np.any(y < 0) or not np.all(np.isfinite(y)):
            raise DomainError("tabulated values must be finite and nonnegative")
        if self.rule not in ("linear", "pchip"):
            raise DomainError(f"unknown interpolation rule {self.rule!r}")
        object.__setattr__(self, "x", tuple(x.tolist()))
        object.__setattr__(self, "y", tuple(y.tolist()))
        if self.rule == "pchip":
            object.__setattr__(self, "_interp", interpolate.PchipInterpolator(x, y, extrapolate=False))

    @property
    def support(self):
        return self.x[-1]

    @property
    def breakpoints(self):
        return self.x[1:]

    def _eval(self, t):
        x = np.asarray(self.x)
        inside = (t >= 0) & (t <= x[-1])
        if self.rule == "linear":
            v = np.interp(t, x, np.asarray(self.y))
        else:
            v = self._interp(np.clip(t, 0.0, x[-1]))
        return np.where(inside, np.clip(v, 0.0, None), 0.0)

    def params(self):
        return {"kind": "tabulated", "rule": self.rule, "x": list(self.x), "y": list(self.y)}
