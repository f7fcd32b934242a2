import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import schrodinger1d as s1
from ltlab.errors import DomainError

DISC = s1.Discretization1D(20.0, 4096)


def test_poschl_teller_nu1():
    spec = s1.negative_spectrum(s1.Potential1D.poschl_teller(1.0), 1.0, DISC)
    assert len(spec) == 1
    assert spec.eigenvalues[0] == pytest.approx(-1.0, abs=1e-6)
    assert abs(spec.eigenvalues[0] + 1.0) <= 3 * spec.errors[0] + 1e-9
    assert not spec.truncated


def test_poschl_teller_nu2():
    spec = s1.negative_spectrum(s1.Potential1D.poschl_teller(2.0), 1.0, DISC)
    np.testing.assert_allclose(spec.eigenvalues, [-4.0, -1.0], atol=1e-5)


@pytest.mark.parametrize("nu", [1.0, 2.0, 3.0])
def test_reference_ratios(nu):
    ref = s1.poschl_teller_reference(nu)
    for kappa in (0.5, 1.0, 1.5):
        rep = s1.lt_ratio_report(ref.potential(), 1.0, kappa, DISC)
        assert rep.ratio == pytest.approx(ref.lt_ratio(kappa), abs=max(5 * rep.error, 1e-7))


def test_reference_closed_forms():
    # nu=1, kappa=1: 1 / ((2/(3 pi)) 2^{3/2} B(3/2, 1/2)) = 3/(2 sqrt 2)
    assert s1.poschl_teller_reference(1.0).lt_ratio(1.0) == pytest.approx(1.0606601717798212, rel=1e-12)
    assert s1.poschl_teller_reference(1.0).lt_ratio(1.0) == pytest.approx(3 / (2 * math.sqrt(2)), rel=1e-14)
    assert s1.poschl_teller_reference(2.0).lt_ratio(1.0) == pytest.approx(1.0206207261596576, rel=1e-12)
    # kappa = 3/2 and integer nu: the semiclassical value is attained exactly
    for nu in (1, 2, 3, 5):
        assert s1.poschl_teller_reference(nu).lt_ratio(1.5) == pytest.approx(1.0, rel=1e-12)


def test_square_well_oracle():
    exact = s1.square_well_ground_state(10.0, 0.1)
    assert exact == pytest.approx(-0.2419733758961229, rel=1e-12)
    spec = s1.negative_spectrum(s1.Potential1D.square_well(10.0, 0.1), 1.0, s1.Discretization1D(60.0, 32768))
    assert len(spec) == 1
    assert abs(spec.eigenvalues[0] - exact) < 2e-6


def test_truncation_flag_on_small_box():
    spec = s1.negative_spectrum(s1.Potential1D.square_well(10.0, 0.1), 1.0, s1.Discretization1D(10.0, 4096))
    assert spec.truncated
    assert spec.tail_mass > 1e-8


def test_weyl_sweep_decreasing_to_one():
    rows = s1.weyl_sweep(s1.Potential1D.sech2(), 1.0, [4, 16, 64, 256], DISC)
    ratios = [r.ratio for r in rows]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert abs(ratios[-1] - 1) < 1e-3
    with pytest.raises(DomainError):
        s1.weyl_sweep(s1.Potential1D.sech2(), 1.0, [4, 2], DISC)
    zero = s1.weyl_sweep(s1.Potential1D.sech2(), 1.0, [0.0, 1.0], DISC)[0]
    assert math.isnan(zero.ratio)


def test_guards_hold_on_corpus():
    for name, V, lam in s1.potential_corpus():
        for kappa, bound in s1.RATIO_BOUNDS.items():
            rep = s1.lt_ratio_report(V, lam, kappa, DISC)
            assert rep.ratio <= bound + rep.error + 1e-12, (name, kappa, rep.ratio)


def test_dirichlet_counting():
    # eigenvalues (pi n / L)^2; with L = pi they are n^2
    assert s1.dirichlet_counting(math.pi, 10.0)[0] == 3
    assert s1.dirichlet_counting(math.pi, 9.0)[0] == 2
    count, weyl = s1.dirichlet_counting(math.pi, 1e6)
    assert abs(count - weyl) <= 1


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50.0), st.floats(0.01, 1e4))
def test_weyl_counting_within_one(length, lam):
    count, weyl = s1.dirichlet_counting(length, lam)
    assert weyl - 1 <= count <= weyl


def test_moments_match_quadrature():
    for V in (s1.Potential1D.sech2(2.0), s1.Potential1D.gaussian_well(3.0, 0.5)):
        exact = V.negative_moment(1.5, 2.0)
        generic = s1.Potential1D(V.fn).negative_moment(1.5, 2.0)
        assert exact == pytest.approx(generic, rel=1e-9)


def test_table_potential(tmp_path):
    x = np.linspace(-5, 5, 401)
    path = tmp_path / "v.txt"
    np.savetxt(path, np.column_stack([x, -2 / np.cosh(x) ** 2]), header="x V")
    for rule in ("linear", "cubic"):
        V = s1.Potential1D.from_table(str(path), rule=rule)
        spec = s1.negative_spectrum(V, 1.0, s1.Discretization1D(20.0, 2048))
        assert spec.eigenvalues[0] == pytest.approx(-1.0, abs=2e-3)
    with pytest.raises(DomainError):
        s1.Potential1D.from_table([0.0, 0.0], [1.0, 1.0])


def test_input_validation():
    with pytest.raises(DomainError):
        s1.Discretization1D(20.0, 32)
    with pytest.raises(DomainError):
        s1.negative_spectrum(s1.Potential1D.sech2(), -1.0, DISC)
    with pytest.raises(DomainError):
        s1.riesz_mean([0.5], 1.0)
    assert s1.riesz_mean([-1.0, -4.0], 0.0) == 2.0
    assert len(s1.negative_spectrum(s1.Potential1D.sech2(), 0.0, DISC)) == 0


@settings(max_examples=10, deadline=None)
@given(st.floats(0.3, 4.0))
def test_pt_kappa_three_halves_never_exceeds_one(nu):
    assert s1.poschl_teller_reference(nu).lt_ratio(1.5) <= 1 + 1e-12
