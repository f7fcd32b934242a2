"""Orthonormal families on periodic boxes and their kinetic functionals.

Conventions: the grid has points x_j = j L / n per axis, the inner product
is the Riemann sum with cell volume (L/n)^d, and Fourier coefficients are
normalized so that Parseval holds for it.  Angular wavenumbers are
2 pi m / L with m from ``numpy.fft.fftfreq``; the Nyquist index -n/2 enters
through |m|, so it carries the positive weight |2 pi (n/2) / L|^{2s}.
"""
from __future__ import annotations

import hashlib
import json
import math
import struct
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from ltlab.errors import DomainError, RankDeficiencyError

__all__ = [
    "PeriodicGrid",
    "OrthonormalFamily",
    "DensityField",
    "AliasingWarning",
    "fractional_kinetic",
    "density",
    "thomas_fermi",
    "lt_ratio",
    "gn_ratio",
    "plane_wave",
    "fermi_ball",
    "fermi_ball_ratio",
    "gaussian",
    "bump_window",
    "random_orthonormal_family",
    "hoffmann_ostenhof_check",
    "save_family",
    "load_family",
]

_MAGIC = b"LTLFAM01"
_HEADER = struct.Struct("<8sIIdIq")


class AliasingWarning(RuntimeWarning):
    """More than 1% of a field's spectral mass sits in the top octave."""


@dataclass(frozen=True)
class PeriodicGrid:
    d: int
    box_length: float
    n: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise DomainError(f"only d in {{1, 2}} is supported, got {self.d}")
        if not (self.box_length > 0):
            raise DomainError("box_length must be positive")
        if self.n < 8 or self.n & (self.n - 1):
            raise DomainError(f"n must be a power of two >= 8, got {self.n}")

    @property
    def h(self) -> float:
        return self.box_length / self.n

    @property
    def dv(self) -> float:
        return self.h**self.d

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def axes(self) -> tuple:
        return tuple(range(-self.d, 0))

    def coords(self):
        """Tuple of coordinate arrays broadcast to the grid shape."""
        x = np.arange(self.n) * self.h
        return np.meshgrid(*([x] * self.d), indexing="ij")

    def mode_index(self):
        """Integer Fourier indices m per axis (fftfreq order)."""
        m = np.fft.fftfreq(self.n, d=1.0 / self.n)
        return np.meshgrid(*([m] * self.d), indexing="ij")

    def wavevectors(self):
        return [2.0 * np.pi * m / self.box_length for m in self.mode_index()]

    def k_abs(self):
        return np.sqrt(sum(k * k for k in self.wavevectors()))

    def integrate(self, values) -> float:
        return float(np.sum(values) * self.dv)


def _frozen(a):
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class OrthonormalFamily:
    """N complex fields on a periodic grid with Gram matrix within ``gram_tol`` of I."""

    grid: PeriodicGrid
    functions: np.ndarray
    gram_tol: float = 1e-10
    seed: int | None = None

    def __post_init__(self):
        u = np.asarray(self.functions, dtype=complex)
        if u.ndim == self.grid.d:
            u = u[None]
        if u.shape[1:] != self.grid.shape:
            raise DomainError(f"fields have shape {u.shape[1:]}, grid needs {self.grid.shape}")
        object.__setattr__(self, "functions", _frozen(u))
        dev = self.gram_deviation()
        if dev > self.gram_tol:
            raise RankDeficiencyError(f"Gram deviation {dev:.3e} exceeds tolerance {self.gram_tol:.1e}")

    @property
    def N(self) -> int:
        return self.functions.shape[0]

    def gram(self):
        flat = self.functions.reshape(self.N, -1)
        return (flat.conj() @ flat.T) * self.grid.dv

    def gram_deviation(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(self.N))))


@dataclass(frozen=True)
class DensityField:
    grid: PeriodicGrid
    values: np.ndarray
    N: int | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise DomainError("density shape does not match grid")
        if np.any(v < 0):
            raise DomainError("density must be nonnegative")
        object.__setattr__(self, "values", _frozen(v))
        if self.N is not None:
            tot = self.grid.integrate(v)
            if abs(tot - self.N) > 1e-8 * max(1, self.N):
                raise DomainError(f"int rho = {tot}, expected {self.N}")

    def total(self) -> float:
        return self.grid.integrate(self.values)


def _spectrum(grid: PeriodicGrid, u):
    """|u_hat(k)|^2 with Parseval normalization for the grid inner product."""
    U = sfft.fftn(u, axes=grid.axes)
    return np.abs(U) ** 2 * grid.box_length**grid.d / grid.n ** (2 * grid.d)


def _check_aliasing(grid, power, tol=0.01):
    m = np.max(np.abs(np.stack(grid.mode_index())), axis=0)
    top = m > grid.n / 4
    tot = np.sum(power)
    if tot > 0:
        frac = np.sum(power[..., top]) / tot
        if frac > tol:
            warnings.warn(
                f"{100 * frac:.2f}% of spectral mass lies above |m| = n/4; refine the grid",
                AliasingWarning,
                stacklevel=3,
            )


def fractional_kinetic(family: OrthonormalFamily, s: float) -> float:
    """sum_n sum_k |k|^{2s} |u_n_hat(k)|^2 via the FFT."""
    if not (s > 0):
        raise DomainError("s must be positive")
    grid = family.grid
    power = _spectrum(grid, family.functions)
    _check_aliasing(grid, power)
    weight = grid.k_abs() ** (2 * s)
    return float(np.sum(power * weight))


def density(family: OrthonormalFamily) -> DensityField:
    rho = np.sum(np.abs(family.functions) ** 2, axis=0)
    return DensityField(family.grid, rho, family.N)


def thomas_fermi(rho: DensityField, d: int, s: float) -> float:
    """int rho^{1 + 2s/d}."""
    return rho.grid.integrate(rho.values ** (1.0 + 2.0 * s / d))


def lt_ratio(family: OrthonormalFamily, d: int, s: float) -> float:
    """Kinetic energy over int rho^{1+2s/d}."""
    tf = thomas_fermi(density(family), d, s)
    if not (tf > 0):
        raise DomainError("density integral vanishes")
    return fractional_kinetic(family, s) / tf


def gn_ratio(u, grid: PeriodicGrid, d: int, s: float, norm_tol: float = 1e-8) -> float:
    """||(-Delta)^{s/2} u||^2 / int |u|^{2(1+2s/d)} for a single normalized field."""
    u = np.asarray(u, dtype=complex)
    nrm = grid.integrate(np.abs(u) ** 2)
    if abs(nrm - 1.0) > norm_tol:
        raise DomainError(f"||u||^2 = {nrm}, must be 1")
    power = _spectrum(grid, u)
    _check_aliasing(grid, power)
    kin = float(np.sum(power * grid.k_abs() ** (2 * s)))
    return kin / grid.integrate(np.abs(u) ** (2.0 * (1.0 + 2.0 * s / d)))


def plane_wave(grid: PeriodicGrid, m) -> np.ndarray:
    """exp(2 pi i m.x / L) / sqrt(L^d), an exact eigenfunction on the grid."""
    m = np.atleast_1d(m)
    phase = sum(mi * xi for mi, xi in zip(m, grid.coords()))
    return np.exp(2j * np.pi * phase / grid.box_length) / math.sqrt(grid.box_length**grid.d)


def fermi_ball(grid: PeriodicGrid, M: int | None = None, N: int | None = None) -> OrthonormalFamily:
    """Plane waves with the lowest momenta.

    In 1-D pass ``M`` for the modes -M..M.  Otherwise pass ``N`` and the N
    modes smallest in |m| are taken, ties broken lexicographically.
    """
    if M is not None:
        if grid.d != 1:
            raise DomainError("M is only meaningful in 1-D; pass N")
        modes = [(m,) for m in range(-M, M + 1)]
    elif N is not None:
        r = int(math.ceil(math.sqrt(N))) + 1
        cand = [c for c in np.ndindex(*([2 * r + 1] * grid.d))]
        cand = [tuple(ci - r for ci in c) for c in cand]
        cand.sort(key=lambda c: (sum(ci * ci for ci in c), c))
        modes = cand[:N]
    else:
        raise DomainError("pass M or N")
    return OrthonormalFamily(grid, np.stack([plane_wave(grid, m) for m in modes]))


def fermi_ball_ratio(M: int) -> float:
    """Closed form 4 pi^2 M(M+1) / (3 (2M+1)^2) of the d = s = 1 Fermi-ball ratio."""
    return 4.0 * math.pi**2 * M * (M + 1) / (3.0 * (2 * M + 1) ** 2)


def gaussian(grid: PeriodicGrid, width: float, center=None) -> np.ndarray:
    """L2-normalized Gaussian exp(-|x-c|^2/(2 w^2)) on the grid."""
    c = [grid.box_length / 2] * grid.d if center is None else center
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords(), c))
    g = np.exp(-r2 / (2.0 * width**2)).astype(complex)
    return g / math.sqrt(grid.integrate(np.abs(g) ** 2))


def bump_window(grid: PeriodicGrid, fraction: float = 0.25) -> np.ndarray:
    """Smooth bump exp(1 - 1/(1 - r^2)) supported on the central ``fraction`` of each axis."""
    half = 0.5 * fraction * grid.box_length
    w = np.ones(grid.shape)
    for x in grid.coords():
        r = (x - grid.box_length / 2) / half
        inside = np.abs(r) < 1
        rr = np.where(inside, r, 0.0)
        w = w * np.where(inside, np.exp(1.0 - 1.0 / (1.0 - rr * rr)), 0.0)
    return w


def random_orthonormal_family(
    seed: int,
    N: int,
    grid: PeriodicGrid,
    smoothness: float = 2.0,
    window: float | None = 0.25,
    gram_tol: float = 1e-10,
) -> OrthonormalFamily:
    """Smooth random fields orthonormalized by Householder QR.

    Fourier coefficients are complex Gaussians scaled by (1 + |m|^2)^(-smoothness/2).
    With ``window`` set, fields are multiplied by a smooth bump on that
    fraction of the box, so the family is compactly supported and the torus
    stands in for the whole space (the 4x zero-padded design).
    """
    if N < 1 or N > grid.size // 4:
        raise RankDeficiencyError(f"N = {N} exceeds n^d/4 = {grid.size // 4}")
    rng = np.random.default_rng(seed)
    m2 = sum(m * m for m in grid.mode_index())
    amp = (1.0 + m2) ** (-0.5 * smoothness)
    coef = rng.standard_normal((N,) + grid.shape) + 1j * rng.standard_normal((N,) + grid.shape)
    fields = sfft.ifftn(coef * amp, axes=grid.axes)
    if window:
        fields = fields * bump_window(grid, window)
    A = fields.reshape(N, -1).T * math.sqrt(grid.dv)
    u = _orthonormalize(A, N, grid)
    fam_u = u.T.reshape((N,) + grid.shape)
    try:
        return OrthonormalFamily(grid, fam_u, gram_tol, seed)
    except RankDeficiencyError:
        # one re-orthonormalization pass is allowed
        A = fam_u.reshape(N, -1).T * math.sqrt(grid.dv)
        u = _orthonormalize(A, N, grid)
        return OrthonormalFamily(grid, u.T.reshape((N,) + grid.shape), gram_tol, seed)


def _orthonormalize(A, N, grid):
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.size < N or diag.min() <= 1e-10 * diag.max():
        raise RankDeficiencyError(f"fields are numerically dependent (min |R_ii| = {diag.min():.3e})")
    return Q / math.sqrt(grid.dv)


def _gradient(grid, u):
    U = sfft.fftn(u, axes=grid.axes)
    return [sfft.ifftn(1j * k * U, axes=grid.axes) for k in grid.wavevectors()]


def hoffmann_ostenhof_check(family: OrthonormalFamily, eps: float = 1e-14):
    """Return (lhs, rhs, margin) for sum int |grad u_n|^2 >= int |grad sqrt(rho)|^2.

    grad sqrt(rho) is formed as Re(sum conj(u) grad u) / sqrt(rho) from
    spectral gradients of the u_n, with rho regularized by eps * max(rho).
    This is the chain rule applied to the discrete fields, so the pointwise
    Cauchy-Schwarz bound holds exactly and margin >= 0 up to rounding.
    """
    grid = family.grid
    u = family.functions
    grads = _gradient(grid, u)
    rho = np.sum(np.abs(u) ** 2, axis=0)
    reg = rho + eps * float(np.max(rho))
    lhs_density = sum(np.sum(np.abs(g) ** 2, axis=0) for g in grads)
    j = [np.sum((u.conj() * g).real, axis=0) for g in grads]
    rhs_density = sum(ji * ji for ji in j) / reg
    lhs = grid.integrate(lhs_density)
    rhs = grid.integrate(rhs_density)
    margin = grid.integrate(lhs_density - rhs_density)
    return lhs, rhs, margin


def save_family(family: OrthonormalFamily, path) -> dict:
    """Write the binary container at ``path`` and a JSON sidecar at ``path + '.json'``."""
    g = family.grid
    payload = np.ascontiguousarray(family.functions, dtype="<c16").tobytes()
    seed = -1 if family.seed is None else int(family.seed)
    header = _HEADER.pack(_MAGIC, g.d, g.n, g.box_length, family.N, seed)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write family to {path}: {exc}") from exc
    meta = {
        "format": _MAGIC.decode(),
        "d": g.d,
        "n": g.n,
        "box_length": g.box_length,
        "N": family.N,
        "seed": family.seed,
        "gram_deviation": family.gram_deviation(),
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
        "dtype": "complex128 little-endian, C order (N, n, ...)",
    }
    with open(f"{path}.json", "w", encoding="ascii") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    return meta


def load_family(path, gram_tol: float = 1e-10) -> OrthonormalFamily:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, d, n, L, N, seed = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise DomainError(f"{path} is not a family container")
    grid = PeriodicGrid(d, L, n)
    data = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if data.size != N * grid.size:
        raise DomainError(f"{path}: payload has {data.size} values, expected {N * grid.size}")
    return OrthonormalFamily(grid, data.reshape((N,) + grid.shape), gram_tol, None if seed < 0 else seed)
