"""Dyadic stopping-time covers, Neumann cube spectra and local exclusion checks.

Cube masses come from a pyramid built bottom-up from a reference grid of
2^K cells per axis: each parent mass is the sum of its 2^d children in a
fixed order, so sibling additivity holds bit for bit.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from ltlab import kernels
from ltlab.errors import DepthExhaustedError, DomainError, InvariantViolation
from ltlab.semiclassics import lcl

__all__ = [
    "DyadicCube",
    "MassFunction",
    "CoverNode",
    "Group",
    "CoverResult",
    "stopping_time_cover",
    "group_cubes",
    "check_cover",
    "covering_inequality_check",
    "group_slacks",
    "cover_to_json",
    "neumann_cube_spectrum",
    "neumann_riesz_mean",
    "neumann_deficit",
    "local_neumann_energy",
    "local_exclusion_check",
    "local_uncertainty_probe",
    "neumann_witness",
    "interaction_exclusion_check",
    "random_dyadic_density",
]


@dataclass(frozen=True)
class DyadicCube:
    index: tuple  # integer position at its depth
    depth: int
    root_side: float = 1.0
    root_corner: tuple = ()

    @property
    def d(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return self.root_side * 2.0 ** (-self.depth)

    @property
    def volume(self) -> float:
        return self.side**self.d

    @property
    def corner(self) -> tuple:
        rc = self.root_corner or (0.0,) * self.d
        return tuple(c + i * self.side for c, i in zip(rc, self.index))

    def children(self):
        for off in itertools.product((0, 1), repeat=self.d):
            yield DyadicCube(tuple(2 * i + o for i, o in zip(self.index, off)),
                             self.depth + 1, self.root_side, self.root_corner)


class MassFunction:
    """Nonnegative cell values on a 2^K reference grid and their dyadic pyramid.

    ``values`` are cell masses (not densities).
    """

    def __init__(self, values, root_side: float = 1.0, root_corner=None):
        v = np.asarray(values, dtype=float)
        d = v.ndim
        if d not in (1, 2, 3):
            raise DomainError("mass functions are supported for d in {1, 2, 3}")
        n = v.shape[0]
        if any(s != n for s in v.shape) or n < 1 or n & (n - 1):
            raise DomainError("reference grid must have 2^K cells on every axis")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("masses must be finite and nonnegative")
        self.d = d
        self.K = int(round(math.log2(n)))
        self.root_side = float(root_side)
        self.root_corner = tuple(root_corner) if root_corner is not None else (0.0,) * d
        levels = [v.copy()]
        for _ in range(self.K):
            a = levels[-1]
            parent = None
            for off in itertools.product((0, 1), repeat=d):
                sl = tuple(slice(o, None, 2) for o in off)
                parent = a[sl].copy() if parent is None else parent + a[sl]
            levels.append(parent)
        self.levels = levels[::-1]  # levels[k] has shape (2^k,)*d
        for lev in self.levels:
            lev.flags.writeable = False

    @classmethod
    def from_density(cls, density, root_side: float = 1.0, root_corner=None):
        density = np.asarray(density, dtype=float)
        cell_vol = (root_side / density.shape[0]) ** density.ndim
        return cls(density * cell_vol, root_side, root_corner)

    @property
    def total_mass(self) -> float:
        return float(self.levels[0].reshape(-1)[0])

    def mass(self, cube: DyadicCube) -> float:
        if cube.depth > self.K:
            raise DomainError("cube is finer than the reference grid")
        return float(self.levels[cube.depth][cube.index])

    def root(self) -> DyadicCube:
        return DyadicCube((0,) * self.d, 0, self.root_side, self.root_corner)


@dataclass
class CoverNode:
    cube: DyadicCube
    mass: float
    children: list = field(default_factory=list)
    group: int = -1

    @property
    def divided(self) -> bool:
        return bool(self.children)


@dataclass(frozen=True)
class Group:
    id: int
    leaves: tuple  # indices into CoverResult.leaves
    designated: int  # index into CoverResult.leaves
    chain: tuple  # cubes on the chain, root first


@dataclass
class CoverResult:
    mass_function: MassFunction
    Lambda: float
    tree: CoverNode
    leaves: list  # CoverNode, in depth-first lexicographic order
    groups: list

    @property
    def d(self) -> int:
        return self.mass_function.d


def stopping_time_cover(f: MassFunction, Lambda: float) -> CoverResult:
    """Subdivide while cube mass >= Lambda; group the resulting leaves."""
    if not (0 < Lambda < f.total_mass):
        raise DomainError(f"need 0 < Lambda < total mass {f.total_mass}, got {Lambda}")
    finest = f.levels[f.K]
    if np.any(finest >= Lambda):
        raise DepthExhaustedError(
            f"reference cells of depth {f.K} carry mass up to {finest.max()} >= Lambda = {Lambda}"
        )

    def build(cube):
        node = CoverNode(cube, f.mass(cube))
        if node.mass >= Lambda:
            node.children = [build(c) for c in cube.children()]
        return node

    tree = build(f.root())
    leaves = []

    def collect(node):
        if node.divided:
            for c in node.children:
                collect(c)
        else:
            leaves.append(node)

    collect(tree)
    cover = CoverResult(f, Lambda, tree, leaves, [])
    cover.groups = group_cubes(cover)
    return cover


def group_cubes(cover: CoverResult):
    """Partition the leaves into chains through lexicographically first heavy children.

    A chain starts at a divided cube and repeatedly steps to its first child
    of mass >= 2^-d Lambda until that child is a leaf, which becomes the
    group's designated cube.  A leaf joins the chain of its parent; divided
    children off the chain start new chains.
    """
    d = cover.d
    heavy = 2.0 ** (-d) * cover.Lambda
    leaf_pos = {id(node): i for i, node in enumerate(cover.leaves)}
    groups = []
    pending = [cover.tree]
    while pending:
        start = pending.pop(0)
        gid = len(groups)
        chain, members = [], []
        node = start
        designated = None
        while True:
            chain.append(node.cube)
            nxt = None
            for c in node.children:
                if nxt is None and c.mass >= heavy:
                    nxt = c
            if nxt is None:
                raise InvariantViolation(f"divided cube {node.cube} of mass {node.mass} has no heavy child")
            for c in node.children:
                if not c.divided:
                    c.group = gid
                    members.append(leaf_pos[id(c)])
                elif c is not nxt:
                    pending.append(c)
            if not nxt.divided:
                designated = leaf_pos[id(nxt)]
                break
            node = nxt
        groups.append(Group(gid, tuple(sorted(members)), designated, tuple(chain)))
    return groups


def check_cover(cover: CoverResult) -> dict:
    """Verify every cover and group invariant; raise InvariantViolation on failure."""
    f = cover.mass_function
    d, K = f.d, f.K
    covered = np.zeros((2**K,) * d, dtype=np.int64)
    for leaf in cover.leaves:
        c = leaf.cube
        scale = 2 ** (K - c.depth)
        sl = tuple(slice(i * scale, (i + 1) * scale) for i in c.index)
        covered[sl] += 1
        if not leaf.mass < cover.Lambda:
            raise InvariantViolation(f"leaf {c} has mass {leaf.mass} >= Lambda")
    if np.any(covered != 1):
        raise InvariantViolation("leaves do not tile the root cube")
    assigned = sorted(i for g in cover.groups for i in g.leaves)
    if assigned != list(range(len(cover.leaves))):
        raise InvariantViolation("groups do not partition the leaves")
    heavy = 2.0 ** (-d) * cover.Lambda
    for g in cover.groups:
        des = cover.leaves[g.designated]
        if g.designated not in g.leaves:
            raise InvariantViolation(f"group {g.id}: designated cube outside the group")
        if des.mass < heavy:
            raise InvariantViolation(f"group {g.id}: designated mass {des.mass} < 2^-d Lambda")
        depths = [cover.leaves[i].cube.depth for i in g.leaves]
        if max(depths) != des.cube.depth:
            raise InvariantViolation(f"group {g.id}: designated cube is not the smallest")
        counts = np.bincount(depths)
        if counts.max() > 2**d:
            raise InvariantViolation(f"group {g.id}: more than 2^d cubes at one level")
    return {"leaves": len(cover.leaves), "groups": len(cover.groups), "ok": True}


def _covering_terms(cover, alpha, q, eps):
    d = cover.d
    if not (alpha > 0):
        raise DomainError("alpha must be positive")
    if not (0 < eps < 1):
        raise DomainError("eps must lie in (0, 1)")
    qmax = (1.0 - eps) * cover.Lambda * 2.0 ** (-d)
    if not (0 < q <= qmax):
        raise DomainError(f"q must lie in (0, (1-eps) Lambda 2^-d] = (0, {qmax}], got {q}")
    c = eps * (1.0 - 2.0 ** (-alpha * d)) * 4.0 ** (-d)
    return [leaf.cube.volume ** (-alpha) * (max(leaf.mass - q, 0.0) - c * leaf.mass) for leaf in cover.leaves]


def covering_inequality_check(cover: CoverResult, alpha: float, q: float, eps: float) -> float:
    """sum_Q |Q|^-alpha ([m_Q - q]_+ - eps (1 - 2^{-alpha d}) 4^-d m_Q) over the leaves."""
    return math.fsum(_covering_terms(cover, alpha, q, eps))


def group_slacks(cover: CoverResult, alpha: float, q: float, eps: float):
    """The same sum restricted to each group; every entry is >= 0 by construction."""
    terms = _covering_terms(cover, alpha, q, eps)
    return [math.fsum(terms[i] for i in g.leaves) for g in cover.groups]


def cover_to_json(cover: CoverResult) -> dict:
    cubes = [
        {"corner": list(leaf.cube.corner), "side": leaf.cube.side, "depth": leaf.cube.depth,
         "mass": leaf.mass, "group": leaf.group}
        for leaf in cover.leaves
    ]
    groups = [{"id": g.id, "designated": g.designated, "members": list(g.leaves)} for g in cover.groups]
    return {"d": cover.d, "Lambda": cover.Lambda, "total_mass": cover.mass_function.total_mass,
            "cubes": cubes, "groups": groups}


def neumann_cube_spectrum(d: int, side: float, count: int) -> np.ndarray:
    """First ``count`` eigenvalues pi^2 |p|^2 / side^2, p in N_0^d, ascending."""
    if d not in (1, 2, 3):
        raise DomainError("d must be 1, 2 or 3")
    if not (side > 0) or count < 1:
        raise DomainError("need side > 0 and count >= 1")
    # the count vectors (0..count-1, 0, ...) have |p| < count, so |p|_inf < count suffices
    r = np.arange(count)
    grids = np.meshgrid(*([r] * d), indexing="ij")
    p2 = sum(g.astype(np.int64) ** 2 for g in grids).ravel()
    p2 = np.sort(p2, kind="stable")[:count]
    return math.pi**2 * p2.astype(float) / side**2


def _lattice_points(d, R2):
    r = int(math.isqrt(int(math.floor(R2)))) + 1
    ax = np.arange(r + 1, dtype=np.int64)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    return sum(g**2 for g in grids).ravel()


def neumann_riesz_mean(d: int, mu: float) -> float:
    """sum_{p in N_0^d} [pi^2 |p|^2 - mu]_- on the unit cube (a nonpositive number)."""
    if d not in (1, 2, 3):
        raise DomainError("d must be 1, 2 or 3")
    if mu <= 0:
        return 0.0
    p2 = _lattice_points(d, mu / math.pi**2)
    e = math.pi**2 * p2.astype(float)
    return -math.fsum((mu - e[e < mu]).tolist())


def neumann_deficit(d: int, mu: float) -> float:
    """|Neumann Riesz mean| - L^cl_{1,d} mu^{1+d/2}."""
    return abs(neumann_riesz_mean(d, mu)) - lcl(1.0, d, 1.0) * mu ** (1.0 + d / 2.0)


def _cube_fields(functions, d, start, m):
    sl = (slice(None),) + tuple(slice(s, s + m) for s in start)
    return functions[sl]


def local_neumann_energy(fields, h: float, d: int) -> float:
    """sum_n sum_p (pi p/ell)^2 |c_p|^2 h^d with c = orthonormal DCT-II of each field.

    Grid points are taken as cell midpoints of the cube, so ell = m h.
    """
    fields = np.asarray(fields)
    m = fields.shape[-1]
    axes = tuple(range(-d, 0))
    coef = sfft.dctn(fields.real, type=2, norm="ortho", axes=axes)
    power = coef**2
    if np.iscomplexobj(fields):
        ci = sfft.dctn(fields.imag, type=2, norm="ortho", axes=axes)
        power = power + ci**2
    ell = m * h
    p = np.arange(m)
    grids = np.meshgrid(*([p] * d), indexing="ij")
    lam = (math.pi / ell) ** 2 * sum(g.astype(float) ** 2 for g in grids)
    return float(np.sum(power * lam) * h**d)


def local_exclusion_check(family, start, m: int):
    """(lhs, rhs, slack) for the Neumann energy on the grid-aligned cube.

    The cube is ``m`` points per axis starting at integer offsets ``start``.
    rhs = pi^2 |Q|^{-2/d} [int_Q rho - 1]_+.
    """
    grid = family.grid
    d = grid.d
    start = tuple(int(s) for s in np.atleast_1d(start))
    if len(start) != d or m < 2 or any(s < 0 or s + m > grid.n for s in start):
        raise DomainError("cube must lie inside the grid with m >= 2 points per side")
    u = _cube_fields(family.functions, d, start, m)
    h = grid.h
    lhs = local_neumann_energy(u, h, d)
    vol = (m * h) ** d
    mass = float(np.sum(np.abs(u) ** 2) * h**d)
    rhs = math.pi**2 * vol ** (-2.0 / d) * max(mass - 1.0, 0.0)
    return lhs, rhs, lhs - rhs


def local_uncertainty_probe(family, start, m: int, s: float = 1.0) -> float:
    """Largest C with E_Q >= C int_Q rho^{1+2/d} / (int_Q rho)^{2/d} - |Q|^{-2/d} int_Q rho.

    Returns +inf when int_Q rho = 0.
    """
    if s != 1.0:
        raise DomainError("only s = 1 is implemented")
    grid = family.grid
    d = grid.d
    start = tuple(int(v) for v in np.atleast_1d(start))
    u = _cube_fields(family.functions, d, start, m)
    h = grid.h
    rho = np.sum(np.abs(u) ** 2, axis=0)
    M = float(np.sum(rho) * h**d)
    if M == 0.0:
        return math.inf
    E = local_neumann_energy(u, h, d)
    vol = (m * h) ** d
    tf = float(np.sum(rho ** (1.0 + 2.0 / d)) * h**d)
    return (E + vol ** (-2.0 / d) * M) * M ** (2.0 / d) / tf


def neumann_witness(m: int = 64):
    """Family {1, sqrt(2) cos(pi x)} sampled at cell midpoints of [0, 1].

    The two lowest Neumann modes of the unit interval, which make the local
    exclusion inequality an equality.
    """
    from ltlab.kinetic_lab import OrthonormalFamily, PeriodicGrid

    grid = PeriodicGrid(1, 1.0, m)
    x = (np.arange(m) + 0.5) / m
    u = np.stack([np.ones(m), math.sqrt(2.0) * np.cos(math.pi * x)]).astype(complex)
    return OrthonormalFamily(grid, u)


def interaction_exclusion_check(points, root_corner, root_side: float, depth: int, d: int, s: float):
    """(lhs, rhs, slack) for sum_{i<j} |x_i - x_j|^{-2s} >= sum_Q n_Q(n_Q-1) / (2 d^s |Q|^{2s/d}).

    Slack is accumulated pair by pair; each same-cube pair contributes
    |x_i - x_j|^{-2s} - bound >= 0 by the diameter bound.  Coincident points
    give lhs = inf.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, d)
    if pts.shape[0] < 2:
        raise DomainError("need at least two points")
    corner = np.asarray(root_corner, dtype=float).reshape(d)
    if np.any(pts < corner) or np.any(pts > corner + root_side):
        raise DomainError("all points must lie in the root cube")
    if depth < 0 or not (s > 0):
        raise DomainError("need depth >= 0 and s > 0")
    k = 2**depth
    side = root_side / k
    idx = np.clip(np.floor((pts - corner) / side).astype(np.int64), 0, k - 1)
    cells = np.ravel_multi_index(idx.T, (k,) * d)
    bound = 1.0 / (d**s * side ** (2.0 * s))
    return kernels.pair_exclusion(np.ascontiguousarray(pts), cells.astype(np.int64), float(s), bound)


def random_dyadic_density(rng, d: int, K: int, bits: int = 8, bumps: int = 3) -> np.ndarray:
    """Random cell masses that are dyadic rationals, so every partial sum is exact.

    A few random boxes of random integer heights over a sparse background.
    """
    n = 2**K
    vals = np.zeros((n,) * d, dtype=np.int64)
    vals += rng.integers(0, 2, size=vals.shape) * rng.integers(0, 4, size=vals.shape)
    for _ in range(bumps):
        lo = rng.integers(0, n, size=d)
        width = rng.integers(1, max(2, n // 4), size=d)
        sl = tuple(slice(a, min(n, a + w)) for a, w in zip(lo, width))
        vals[sl] += rng.integers(1, 2**bits)
    if vals.sum() == 0:
        vals.flat[0] = 1
    return vals.astype(float) * 2.0 ** (-bits - K * d)
