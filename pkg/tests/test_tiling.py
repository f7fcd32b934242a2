import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import kinetic_lab as kl
from ltlab import tiling as tl
from ltlab.errors import DepthExhaustedError, DomainError


def uniform(d, K):
    n = 2**K
    return tl.MassFunction(np.full((n,) * d, 1.0 / n**d))


def test_dyadic_cube_geometry():
    c = tl.DyadicCube((1, 2), 2, 4.0, (0.0, -1.0))
    assert c.side == 1.0 and c.volume == 1.0
    assert c.corner == (1.0, 1.0)
    kids = list(c.children())
    assert len(kids) == 4
    assert kids[0].index == (2, 4) and kids[-1].index == (3, 5)


def test_pyramid_sibling_sums_exact():
    rng = np.random.default_rng(0)
    mf = tl.MassFunction(tl.random_dyadic_density(rng, 2, 5))
    for k in range(mf.K):
        parent = mf.levels[k]
        child = mf.levels[k + 1]
        summed = child[0::2, 0::2] + child[1::2, 0::2] + child[0::2, 1::2] + child[1::2, 1::2]
        assert np.array_equal(summed, parent)


def test_uniform_cover_oracle():
    cover = tl.stopping_time_cover(uniform(1, 4), 0.3)
    tl.check_cover(cover)
    assert [leaf.cube.depth for leaf in cover.leaves] == [2, 2, 2, 2]
    assert [(g.leaves, g.designated) for g in cover.groups] == [((0, 1), 0), ((2, 3), 2)]
    # Lambda = 0.3, d = 1, q = (1 - 1/2) 0.3 / 2, alpha = 2, eps = 1/2
    q = 0.075
    slack = tl.covering_inequality_check(cover, 2.0, q, 0.5)
    c = 0.5 * (1 - 0.25) / 4
    assert slack == pytest.approx(4 * 16 * ((0.25 - q) - c * 0.25), rel=1e-14)
    assert tl.group_slacks(cover, 2.0, q, 0.5) == pytest.approx([slack / 2, slack / 2])


def test_cover_domain_errors():
    mf = uniform(1, 3)
    with pytest.raises(DomainError):
        tl.stopping_time_cover(mf, 1.5)
    with pytest.raises(DepthExhaustedError):
        tl.stopping_time_cover(mf, 0.1)
    cover = tl.stopping_time_cover(mf, 0.3)
    with pytest.raises(DomainError):
        tl.covering_inequality_check(cover, 1.0, 0.5, 0.5)


def _random_case(seed, d):
    rng = np.random.default_rng(seed)
    K = 8 if d == 1 else 5
    vals = tl.random_dyadic_density(rng, d, K)
    mf = tl.MassFunction(vals)
    Lam = max(mf.total_mass * 2.0 ** (-int(rng.integers(2, 7))), 2 * float(vals.max()))
    if Lam >= mf.total_mass:
        Lam = 0.5 * (mf.total_mass + 2 * float(vals.max()))
    return mf, Lam


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]), st.sampled_from([1.0, 2.0, 4.0]),
       st.sampled_from([0.25, 0.5]))
def test_cover_properties(seed, d, alpha, eps):
    mf, Lam = _random_case(seed, d)
    if not Lam < mf.total_mass:
        return
    cover = tl.stopping_time_cover(mf, Lam)
    tl.check_cover(cover)
    assert all(leaf.mass < Lam for leaf in cover.leaves)
    q = (1 - eps) * Lam * 2.0 ** (-d)
    assert tl.covering_inequality_check(cover, alpha, q, eps) >= 0
    assert min(tl.group_slacks(cover, alpha, q, eps)) >= 0
    # smaller q only helps
    assert tl.covering_inequality_check(cover, alpha, q / 3, eps) >= 0


def test_cover_json():
    cover = tl.stopping_time_cover(uniform(2, 3), 0.2)
    doc = json.loads(json.dumps(tl.cover_to_json(cover)))
    assert doc["d"] == 2
    assert len(doc["cubes"]) == len(cover.leaves)
    assert sum(c["mass"] for c in doc["cubes"]) == pytest.approx(1.0)
    assert sorted(i for g in doc["groups"] for i in g["members"]) == list(range(len(cover.leaves)))


def test_neumann_spectrum():
    ev = tl.neumann_cube_spectrum(2, 1.0, 6) / math.pi**2
    np.testing.assert_allclose(ev, [0, 1, 1, 2, 4, 4])
    assert tl.neumann_cube_spectrum(1, 2.0, 3)[2] == pytest.approx(math.pi**2)


def test_neumann_riesz_mean_hand_value():
    # mu = 10, d = 1: only p = 0 and p = 1 (pi^2 < 10)
    assert tl.neumann_riesz_mean(1, 10.0) == pytest.approx(-(10 + 10 - math.pi**2), rel=1e-15)
    assert tl.neumann_riesz_mean(1, 0.0) == 0.0


def test_neumann_deficit_surface_law():
    for mu in (1e4, 1e5):
        assert 0.48 <= tl.neumann_deficit(1, mu) / mu <= 0.52
    # d = 2: the two coordinate axes each add half a 1-D sum, about (2/(3 pi)) mu^{3/2} in total
    mu = 1e4
    assert tl.neumann_deficit(2, mu) / (2 / (3 * math.pi) * mu**1.5) == pytest.approx(1.0, abs=0.02)


def test_local_exclusion_witness_sharp():
    w = tl.neumann_witness(64)
    lhs, rhs, slack = tl.local_exclusion_check(w, (0,), 64)
    assert lhs == pytest.approx(math.pi**2, rel=1e-12)
    assert abs(slack) <= 1e-8 * lhs


def test_constant_function_uncertainty():
    g = kl.PeriodicGrid(1, 1.0, 64)
    fam = kl.OrthonormalFamily(g, np.ones(64, dtype=complex))
    assert tl.local_uncertainty_probe(fam, (0,), 64) == pytest.approx(1.0, rel=1e-12)
    zero = kl.OrthonormalFamily(g, kl.plane_wave(g, 0))
    assert math.isfinite(tl.local_uncertainty_probe(zero, (0,), 8))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(96, 64), (112, 32), (0, 256), (64, 128)]))
def test_local_exclusion_random(seed, cube):
    g = kl.PeriodicGrid(1, 1.0, 256)
    fam = kl.random_orthonormal_family(seed, 8, g)
    lhs, rhs, slack = tl.local_exclusion_check(fam, (cube[0],), cube[1])
    assert slack >= -1e-8 * lhs


def test_local_exclusion_2d():
    g = kl.PeriodicGrid(2, 1.0, 32)
    fam = kl.random_orthonormal_family(3, 6, g)
    lhs, rhs, slack = tl.local_exclusion_check(fam, (8, 8), 16)
    assert slack >= -1e-8 * lhs
    with pytest.raises(DomainError):
        tl.local_exclusion_check(fam, (20, 20), 16)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([1, 2]), st.sampled_from([0.5, 1.0, 2.0]), st.integers(0, 5))
def test_interaction_exclusion(seed, d, s, depth):
    rng = np.random.default_rng(seed)
    pts = rng.random((int(rng.integers(2, 30)), d))
    lhs, rhs, slack = tl.interaction_exclusion_check(pts, (0.0,) * d, 1.0, depth, d, s)
    assert slack >= 0
    assert lhs >= rhs


def test_interaction_diameter_sharp():
    # two opposite corners of the unit square: |x - y|^2 = d exactly
    lhs, rhs, slack = tl.interaction_exclusion_check([[0, 0], [1, 1]], (0, 0), 1.0, 0, 2, 1.0)
    assert lhs == pytest.approx(0.5) and rhs == pytest.approx(0.5)
    assert slack == 0.0
    lhs, _, _ = tl.interaction_exclusion_check([[0.5], [0.5]], (0,), 1.0, 0, 1, 1.0)
    assert lhs == math.inf


def test_random_dyadic_density_is_dyadic():
    rng = np.random.default_rng(4)
    v = tl.random_dyadic_density(rng, 2, 4)
    scaled = v * 2.0 ** (8 + 8)
    assert np.array_equal(scaled, np.round(scaled))
