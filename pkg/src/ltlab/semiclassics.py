"""Closed-form semiclassical constants, duality conversions and lifting factors.

Notation: ``kappa`` is the Riesz exponent, ``d`` the dimension and ``s`` the
power of the kinetic symbol |2 pi k|^{2s}.  Gamma and Beta values come from
``math.lgamma`` so large arguments do not overflow.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ltlab.errors import DivergenceError, DomainError

__all__ = [
    "RieszParams",
    "SemiclassicalConstant",
    "unit_ball_volume",
    "beta",
    "lcl",
    "kcl",
    "kinetic_from_riesz",
    "riesz_from_kinetic",
    "al_lift_factor",
    "case4_lift_factor",
    "legendre_transform",
    "LegendreBoundaryWarning",
    "uniform_density_bound",
    "bessel_window_constant",
]


class LegendreBoundaryWarning(RuntimeWarning):
    """The Legendre supremum sits at the right end of the sampled interval."""


def _check_ds(d, s):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    if not (s > 0) or not math.isfinite(s):
        raise DomainError(f"s must be positive and finite, got {s!r}")
    return int(d), float(s)


def unit_ball_volume(d: int) -> float:
    """Volume pi^{d/2}/Gamma(d/2+1) of the unit ball in R^d."""
    d, _ = _check_ds(d, 1.0)
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def beta(a: float, b: float) -> float:
    """Euler Beta function for a, b > 0."""
    if not (a > 0 and b > 0):
        raise DomainError(f"Beta needs positive arguments, got ({a}, {b})")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


@dataclass(frozen=True)
class RieszParams:
    """Riesz exponent, dimension and kinetic power with the theorem's case table."""

    kappa: float
    d: int
    s: float = 1.0

    def __post_init__(self):
        d, s = _check_ds(self.d, self.s)
        if not (self.kappa >= 0) or not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be >= 0, got {self.kappa!r}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "s", s)

    @property
    def case(self) -> str:
        if self.d > 2 * self.s:
            return "d>2s"
        if self.d == 2 * self.s:
            return "d=2s"
        return "d<2s"

    @property
    def valid(self) -> bool:
        if self.d > 2 * self.s:
            return self.kappa >= 0
        if self.d == 2 * self.s:
            return self.kappa > 0
        return self.kappa >= 1.0 - self.d / (2.0 * self.s)


@dataclass(frozen=True)
class SemiclassicalConstant:
    value: float
    params: RieszParams
    kind: str  # "riesz" or "kinetic"

    def __post_init__(self):
        if self.kind not in ("riesz", "kinetic"):
            raise DomainError(f"unknown constant kind {self.kind!r}")
        if not (self.value > 0):
            raise DomainError("semiclassical constants are positive")

    @classmethod
    def riesz(cls, kappa, d, s=1.0):
        p = RieszParams(kappa, d, s)
        return cls(lcl(p.kappa, p.d, p.s), p, "riesz")

    @classmethod
    def kinetic(cls, d, s=1.0):
        p = RieszParams(1.0, d, s)
        return cls(kcl(p.d, p.s), p, "kinetic")


def lcl(kappa: float, d: int, s: float = 1.0) -> float:
    """Phase-space constant int |(|2 pi k|^{2s} - 1)_-|^kappa dk.

    Radial substitution gives (2pi)^{-d} d|B1| (1/(2s)) B(d/(2s), kappa+1).
    """
    d, s = _check_ds(d, s)
    if not (kappa >= 0) or not math.isfinite(kappa):
        raise DomainError(f"kappa must be >= 0, got {kappa!r}")
    a = d / (2.0 * s)
    log_val = (
        -d * math.log(2.0 * math.pi)
        + math.log(d * unit_ball_volume(d) / (2.0 * s))
        + math.lgamma(a)
        + math.lgamma(kappa + 1.0)
        - math.lgamma(a + kappa + 1.0)
    )
    return math.exp(log_val)


def kcl(d: int, s: float = 1.0) -> float:
    """Semiclassical kinetic constant (d/(d+2s)) ((2pi)^d/|B1|)^{2s/d}."""
    d, s = _check_ds(d, s)
    base = d * math.log(2.0 * math.pi) - math.log(unit_ball_volume(d))
    return d / (d + 2.0 * s) * math.exp(2.0 * s / d * base)


def kinetic_from_riesz(L1d: float, d: int) -> float:
    """Kinetic constant dual to a kappa=1 Riesz constant (s=1)."""
    d, _ = _check_ds(d, 1.0)
    if not (L1d > 0) or not math.isfinite(L1d):
        raise DomainError(f"Riesz constant must be positive, got {L1d!r}")
    return (L1d * (1.0 + d / 2.0)) ** (-2.0 / d) / (1.0 + 2.0 / d)


def riesz_from_kinetic(K: float, d: int) -> float:
    """Inverse of :func:`kinetic_from_riesz`."""
    d, _ = _check_ds(d, 1.0)
    if not (K > 0) or not math.isfinite(K):
        raise DomainError(f"kinetic constant must be positive, got {K!r}")
    return (K * (1.0 + 2.0 / d)) ** (-d / 2.0) / (1.0 + d / 2.0)


def al_lift_factor(kappa: float, d: int, s: float = 1.0) -> float:
    """Layer-cake factor kappa*B(kappa, 1+d/(2s)) lifting counting to Riesz-kappa."""
    d, s = _check_ds(d, s)
    if not (kappa > 0):
        raise DivergenceError(f"lifting factor diverges for kappa={kappa} <= 0")
    b = 1.0 + d / (2.0 * s)
    # kappa*Gamma(kappa) = Gamma(kappa+1) keeps the kappa -> 0 limit well conditioned
    return math.exp(math.lgamma(kappa + 1.0) + math.lgamma(b) - math.lgamma(kappa + b))


def case4_lift_factor(kappa: float, d: int, s: float) -> float:
    """int_0^inf E^{kappa+d/(2s)-2} (1-E)_+ dE = B(kappa+d/(2s)-1, 2) for d < 2s."""
    d, s = _check_ds(d, s)
    if not d < 2 * s:
        raise DomainError(f"case 4 needs d < 2s, got d={d}, s={s}")
    a = kappa + d / (2.0 * s) - 1.0
    if not (a > 0):
        raise DivergenceError(
            f"integral diverges at E=0 for kappa={kappa} <= 1 - d/(2s) = {1 - d / (2 * s)}"
        )
    return 1.0 / (a * (a + 1.0))


def _lower_hull(t, f):
    """Indices of the lower convex hull of points (t_i, f_i), t increasing."""
    hull = []
    for i in range(len(t)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (t[i1] - t[i0]) * (f[i] - f[i0]) - (f[i1] - f[i0]) * (t[i] - t[i0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=int)


def legendre_transform(t, f, y_grid, warn: bool = True):
    """Discrete Legendre transform f*(y) = max_i (y t_i - f_i).

    Only lower-hull vertices can be maximisers, and the maximising vertex moves
    right as y grows, so a two-pointer scan over the hull suffices.  A warning
    is issued when the maximiser of some y is the right end of the grid,
    since the true supremum over [0, inf) could then be larger.

    Returns ``(fstar, argmax_t)``.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    if t.ndim != 1 or t.shape != f.shape or t.size < 2:
        raise DomainError("t and f must be 1-D arrays of equal length >= 2")
    if np.any(np.diff(t) <= 0):
        raise DomainError("t must be strictly increasing")
    if t[0] < 0 or np.any(f < 0):
        raise DomainError("f must be a nonnegative function sampled on [0, T]")
    hull = _lower_hull(t, f)
    ht, hf = t[hull], f[hull]
    order = np.argsort(y, kind="stable")
    out = np.empty_like(y)
    arg = np.empty_like(y)
    j = 0
    for idx in order:
        yy = y[idx]
        while j + 1 < len(ht) and yy * ht[j + 1] - hf[j + 1] >= yy * ht[j] - hf[j]:
            j += 1
        out[idx] = yy * ht[j] - hf[j]
        arg[idx] = ht[j]
    if warn and np.any(arg == t[-1]):
        n_bad = int(np.count_nonzero(arg == t[-1]))
        warnings.warn(
            f"Legendre supremum attained at the boundary t={t[-1]} for {n_bad} y values; "
            "extend the sample interval",
            LegendreBoundaryWarning,
            stacklevel=2,
        )
    return out, arg


def uniform_density_bound(d: int, s: float, E: float) -> float:
    """C E^{d/(2s)-1} with C = int (|2 pi k|^{2s}+1)^{-1} dk, valid for d < 2s."""
    d, s = _check_ds(d, s)
    if not d < 2 * s:
        raise DivergenceError(f"momentum integral diverges for d={d} >= 2s={2 * s}")
    if not (E > 0):
        raise DomainError(f"E must be positive, got {E!r}")
    a = d / (2.0 * s)
    c = (2.0 * math.pi) ** (-d) * d * unit_ball_volume(d) * math.pi / (2.0 * s * math.sin(math.pi * a))
    return c * E ** (a - 1.0)


def bessel_window_constant(d: int, s: float, kappa: float) -> float:
    """int over |2 pi k|^{2s} <= 1 of |2 pi k|^{-2 kappa} dk = (2pi)^{-d} d|B1|/(d-2kappa).

    Independent of s because the window is the unit ball in 2 pi k.
    """
    d, s = _check_ds(d, s)
    if not (d > 2 * kappa):
        raise DivergenceError(f"window integral diverges for d={d} <= 2 kappa={2 * kappa}")
    return (2.0 * math.pi) ** (-d) * d * unit_ball_volume(d) / (d - 2.0 * kappa)
