"""Negative spectra of -d^2/dx^2 + lambda V on a Dirichlet interval.

The operator is discretized with the 3-point stencil on the interior points
x_i = -L + i h (h = 2L/n, i = 1..n-1).  Eigenvalues below zero are located
by Sturm-sequence bisection (``ltlab.kernels``) on n and 2n points and
combined by Richardson extrapolation for the O(h^2) error, which also gives
each eigenvalue its error bar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, interpolate, linalg, optimize

from ltlab import kernels
from ltlab.errors import DomainError
from ltlab.semiclassics import beta, lcl

__all__ = [
    "Potential1D",
    "Discretization1D",
    "Spectrum1D",
    "RieszReport",
    "negative_spectrum",
    "riesz_mean",
    "lt_ratio_1d",
    "lt_ratio_report",
    "weyl_sweep",
    "WeylRow",
    "dirichlet_counting",
    "poschl_teller_reference",
    "PoschlTeller",
    "square_well_ground_state",
    "potential_corpus",
    "RATIO_BOUNDS",
]

# one-sided guards on L_{kappa,1}/L^cl_{kappa,1}
RATIO_BOUNDS = {0.5: 2.0, 1.0: 1.456, 1.5: 1.0}


@dataclass(frozen=True)
class Potential1D:
    """A real potential on the line.

    ``cell_average(x, h)`` (optional) returns (1/h) int_{x-h/2}^{x+h/2} V and
    is used instead of point sampling; it restores second-order accuracy for
    piecewise-constant potentials.  ``moment(p)`` (optional) gives the exact
    int |V_-|^p over the line.
    """

    fn: Callable
    decay_hint: float = math.inf
    name: str = "V"
    cell_average: Callable | None = None
    moment: Callable | None = None
    breakpoints: tuple = ()
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def sample(self, x, h):
        if self.cell_average is not None:
            return self.cell_average(np.asarray(x, dtype=float), h)
        return self(x)

    def negative_moment(self, p: float, lam: float = 1.0) -> float:
        """int |lam V_-|^p dx."""
        if lam < 0:
            raise DomainError("coupling must be >= 0")
        if lam == 0:
            return 0.0
        if self.moment is not None:
            return lam**p * self.moment(p)

        def fun(x):
            v = float(self.fn(np.asarray(x)))
            return (-v) ** p if v < 0 else 0.0

        pts = sorted(self.breakpoints)
        edges = [-math.inf, *pts, math.inf] if pts else [-math.inf, 0.0, math.inf]
        tot = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            tot += integrate.quad(fun, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)[0]
        return lam**p * tot

    @classmethod
    def sech2(cls, amplitude: float = 1.0):
        """-amplitude * sech^2(x)."""
        if amplitude < 0:
            raise DomainError("amplitude must be >= 0")

        def fn(x):
            e = np.exp(-2.0 * np.abs(x))  # overflow-free sech^2
            return -amplitude * 4.0 * e / (1.0 + e) ** 2

        def moment(p):
            return amplitude**p * beta(p, 0.5) if amplitude > 0 else 0.0

        return cls(fn, 2.0, f"-{amplitude:g} sech^2", moment=moment,
                   params={"kind": "sech2", "amplitude": amplitude})

    @classmethod
    def poschl_teller(cls, nu: float):
        """-nu(nu+1) sech^2(x)."""
        return cls.sech2(nu * (nu + 1.0))

    @classmethod
    def square_well(cls, depth: float, width: float):
        """-depth on |x| < width/2, zero outside."""
        if not (depth >= 0 and width > 0):
            raise DomainError("square well needs depth >= 0, width > 0")
        w2 = width / 2.0

        def fn(x):
            return np.where(np.abs(x) < w2, -depth, 0.0)

        def cell(x, h):
            overlap = np.clip(np.minimum(x + h / 2, w2) - np.maximum(x - h / 2, -w2), 0.0, None)
            return -depth * overlap / h

        return cls(fn, math.inf, f"square well {depth:g} x {width:g}", cell_average=cell,
                   moment=lambda p: depth**p * width, breakpoints=(-w2, w2),
                   params={"kind": "square_well", "depth": depth, "width": width})

    @classmethod
    def gaussian_well(cls, depth: float, width: float = 1.0):
        """-depth * exp(-x^2/width^2)."""

        def fn(x):
            return -depth * np.exp(-(x / width) ** 2)

        def moment(p):
            return depth**p * width * math.sqrt(math.pi / p)

        return cls(fn, math.inf, f"gaussian {depth:g}", moment=moment,
                   params={"kind": "gaussian", "depth": depth, "width": width})

    @classmethod
    def from_table(cls, x, v=None, rule: str = "linear"):
        """Potential from samples; ``x`` may be a path to a two-column text file.

        Values outside the tabulated range are zero.
        """
        if v is None:
            data = np.loadtxt(x, comments="#", ndmin=2)
            if data.shape[1] != 2:
                raise DomainError(f"{x}: expected two columns (x, V)")
            x, v = data[:, 0], data[:, 1]
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2 or np.any(np.diff(x) <= 0):
            raise DomainError("table needs strictly increasing x and matching V")
        if not np.all(np.isfinite(v)):
            raise DomainError("table values must be finite")
        if rule == "linear":
            def fn(y):
                return np.interp(y, x, v, left=0.0, right=0.0)
        elif rule == "cubic":
            spl = interpolate.CubicSpline(x, v)

            def fn(y):
                y = np.asarray(y, dtype=float)
                return np.where((y >= x[0]) & (y <= x[-1]), spl(np.clip(y, x[0], x[-1])), 0.0)
        else:
            raise DomainError(f"unknown interpolation rule {rule!r}")
        return cls(fn, math.inf, "table", breakpoints=tuple(x.tolist()),
                   params={"kind": "table", "points": int(x.size), "rule": rule})


@dataclass(frozen=True)
class Discretization1D:
    half_width: float = 20.0
    n: int = 4096

    def __post_init__(self):
        if not (self.half_width > 0):
            raise DomainError("half_width must be positive")
        if self.n < 64:
            raise DomainError(f"n must be >= 64, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n

    def points(self, n: int | None = None):
        n = self.n if n is None else n
        h = 2.0 * self.half_width / n
        return -self.half_width + h * np.arange(1, n)

    def doubled(self) -> "Discretization1D":
        return Discretization1D(self.half_width, 2 * self.n)


@dataclass(frozen=True)
class Spectrum1D:
    """Certified negative eigenvalues (ascending) with Richardson error bars."""

    eigenvalues: np.ndarray
    errors: np.ndarray
    resolution_estimate: float
    threshold: float
    near_threshold: np.ndarray
    truncated: bool
    tail_mass: float

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.size and (np.any(ev >= 0) or np.any(np.diff(ev) < 0)):
            raise DomainError("eigenvalues must be negative and ascending")

    def __len__(self):
        return int(np.asarray(self.eigenvalues).size)

    def as_dict(self) -> dict:
        return {
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "errors": [float(e) for e in self.errors],
            "resolution_estimate": self.resolution_estimate,
            "threshold": self.threshold,
            "near_threshold": [float(e) for e in self.near_threshold],
            "truncated": self.truncated,
            "tail_mass": self.tail_mass,
        }


def _matrix(V: Potential1D, lam: float, L: float, n: int):
    h = 2.0 * L / n
    x = -L + h * np.arange(1, n)
    diag = 2.0 / h**2 + lam * np.asarray(V.sample(x, h), dtype=float)
    off2 = np.full(n - 2, 1.0 / h**4)
    return diag, off2


def _negative_eigs(diag, off2, h):
    count = kernels.sturm_count(diag, off2, 0.0)
    if count == 0:
        return np.empty(0)
    lower = float(np.min(diag)) - 2.0 / h**2 - 1.0
    return np.sort(kernels.bisect_eigenvalues(diag, off2, 0, count, lower, 0.0))


def negative_spectrum(V: Potential1D, lam: float, disc: Discretization1D) -> Spectrum1D:
    """Negative eigenvalues of -d^2/dx^2 + lam V with Dirichlet conditions at +-L.

    Eigenvalues are solved on n and 2n points and extrapolated as
    E = E_2n + (E_2n - E_n)/3 with error |E_2n - E_n|/3.  Those within
    delta = max(resolution, (pi/(2L))^2) of zero are listed in
    ``near_threshold`` instead of ``eigenvalues``: the resolution part covers
    discretization error and the second term is the level spacing that the
    finite box imposes near the continuum edge.
    """
    if not (lam >= 0) or not math.isfinite(lam):
        raise DomainError(f"coupling must be finite and >= 0, got {lam}")
    L, n = disc.half_width, disc.n
    leak = (math.pi / (2.0 * L)) ** 2
    if lam == 0:
        e = np.empty(0)
        return Spectrum1D(e, e, 0.0, leak, e, False, 0.0)
    d1, o1 = _matrix(V, lam, L, n)
    d2, o2 = _matrix(V, lam, L, 2 * n)
    e1 = _negative_eigs(d1, o1, 2 * L / n)
    e2 = _negative_eigs(d2, o2, L / n)
    k = min(e1.size, e2.size)
    extra = np.concatenate([e1[k:], e2[k:]])
    E = e2[:k] + (e2[:k] - e1[:k]) / 3.0
    err = np.abs(e2[:k] - e1[:k]) / 3.0
    resolution = float(np.max(err)) if k else 0.0
    delta = max(resolution, leak)
    keep = E < -delta
    near = np.sort(np.concatenate([E[~keep], extra[extra < 0]]))

    tail = 0.0
    if e2.size:
        _, vec = linalg.eigh_tridiagonal(d2, -np.sqrt(o2), select="i", select_range=(0, 0))
        w = vec[:, 0] ** 2
        w /= w.sum()
        x = disc.points(2 * n)
        outer = np.abs(x) > 0.9 * L
        tail = float(w[outer].sum())
    return Spectrum1D(E[keep], err[keep], resolution, delta, near, tail > 1e-8, tail)


def riesz_mean(spec, kappa: float) -> float:
    """sum |E_n|^kappa; kappa = 0 counts."""
    if not (kappa >= 0):
        raise DomainError("kappa must be >= 0")
    ev = np.asarray(spec.eigenvalues if isinstance(spec, Spectrum1D) else spec, dtype=float)
    if np.any(ev >= 0):
        raise DomainError("Riesz means take negative eigenvalues")
    if kappa == 0:
        return float(ev.size)
    return float(np.sum(np.abs(ev) ** kappa))


def _riesz_error(spec: Spectrum1D, kappa: float) -> float:
    if kappa == 0 or len(spec) == 0:
        return 0.0
    ev = np.abs(np.asarray(spec.eigenvalues))
    return float(np.sum(kappa * ev ** (kappa - 1.0) * np.asarray(spec.errors)))


@dataclass(frozen=True)
class RieszReport:
    ratio: float
    error: float
    riesz: float
    semiclassical: float
    spectrum: Spectrum1D


def lt_ratio_report(V: Potential1D, lam: float, kappa: float, disc: Discretization1D) -> RieszReport:
    """Riesz mean over L^cl_{kappa,1} int |lam V_-|^{kappa+1/2}, with its error bar."""
    sc = lcl(kappa, 1, 1.0) * V.negative_moment(kappa + 0.5, lam)
    if not (sc > 0):
        raise DomainError("int |lam V_-|^{kappa+1/2} vanishes")
    spec = negative_spectrum(V, lam, disc)
    r = riesz_mean(spec, kappa)
    return RieszReport(r / sc, _riesz_error(spec, kappa) / sc, r, sc, spec)


def lt_ratio_1d(V: Potential1D, lam: float, kappa: float, disc: Discretization1D) -> float:
    return lt_ratio_report(V, lam, kappa, disc).ratio


@dataclass(frozen=True)
class WeylRow:
    lam: float
    riesz: float
    semiclassical: float
    ratio: float
    error: float
    truncated: bool

    def as_dict(self):
        return {
            "lambda": self.lam, "riesz": self.riesz, "semiclassical": self.semiclassical,
            "ratio": self.ratio, "error": self.error, "truncated": self.truncated,
        }


def weyl_sweep(V: Potential1D, kappa: float, lambdas, disc: Discretization1D):
    """Rows (lambda, Riesz mean, semiclassical value, ratio) for increasing couplings."""
    lambdas = [float(x) for x in lambdas]
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise DomainError("lambda list must be strictly increasing")
    rows = []
    for lam in lambdas:
        if lam == 0:
            rows.append(WeylRow(0.0, 0.0, 0.0, math.nan, 0.0, False))
            continue
        rep = lt_ratio_report(V, lam, kappa, disc)
        rows.append(WeylRow(lam, rep.riesz, rep.semiclassical, rep.ratio, rep.error, rep.spectrum.truncated))
    return rows


def dirichlet_counting(length: float, lam: float):
    """(#{n >= 1 : (pi n / length)^2 < lam}, length sqrt(lam) / pi)."""
    if not (length > 0 and lam > 0):
        raise DomainError("length and level must be positive")
    k = int(length * math.sqrt(lam) / math.pi)
    while (math.pi * (k + 1) / length) ** 2 < lam:
        k += 1
    while k > 0 and (math.pi * k / length) ** 2 >= lam:
        k -= 1
    return k, lcl(0.0, 1, 1.0) * length * math.sqrt(lam)


@dataclass(frozen=True)
class PoschlTeller:
    """Exact data for V = -nu(nu+1) sech^2."""

    nu: float

    @property
    def eigenvalues(self) -> np.ndarray:
        n = np.arange(int(math.ceil(self.nu)))
        return np.sort(-((self.nu - n) ** 2))

    def moment(self, p: float) -> float:
        """int (nu(nu+1) sech^2)^p dx = (nu(nu+1))^p B(p, 1/2)."""
        return (self.nu * (self.nu + 1.0)) ** p * beta(p, 0.5)

    def riesz(self, kappa: float) -> float:
        return riesz_mean(self.eigenvalues, kappa)

    def lt_ratio(self, kappa: float) -> float:
        return self.riesz(kappa) / (lcl(kappa, 1, 1.0) * self.moment(kappa + 0.5))

    def potential(self) -> Potential1D:
        return Potential1D.poschl_teller(self.nu)


def poschl_teller_reference(nu: float) -> PoschlTeller:
    if not (nu > 0):
        raise DomainError("nu must be positive")
    return PoschlTeller(float(nu))


def square_well_ground_state(depth: float, width: float) -> float:
    """Ground-state energy -q^2 of the square well from k tan(k w/2) = q, k^2 + q^2 = depth."""
    if not (depth > 0 and width > 0):
        raise DomainError("depth and width must be positive")
    # solve in theta = k w / 2 on (0, min(pi/2, sqrt(depth) w/2))
    R = math.sqrt(depth) * width / 2.0

    def F(theta):
        return theta * math.tan(theta) - math.sqrt(max(R * R - theta * theta, 0.0))

    hi = min(R, math.pi / 2 * (1 - 1e-15))
    theta = optimize.brentq(F, 1e-300, hi, xtol=1e-16, rtol=1e-15)
    k = 2.0 * theta / width
    return -(depth - k * k)


def potential_corpus():
    """Named (potential, coupling) pairs used by the sharp-constant guards."""
    out = []
    for nu in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0):
        out.append((f"poschl_teller_nu{nu:g}", Potential1D.poschl_teller(nu), 1.0))
    for lam in (2.0, 5.0, 10.0, 30.0):
        out.append((f"sech2_lambda{lam:g}", Potential1D.sech2(1.0), lam))
    for depth, width in ((10.0, 0.1), (4.0, 1.0), (1.0, 3.0), (25.0, 0.5)):
        out.append((f"square_{depth:g}x{width:g}", Potential1D.square_well(depth, width), 1.0))
    for depth in (1.0, 5.0, 20.0):
        out.append((f"gaussian_{depth:g}", Potential1D.gaussian_well(depth), 1.0))
    return out
