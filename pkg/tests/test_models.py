import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shapeinv import HALF_LINE, Domain, LinearP, OneDim, Radial, Sinh, closed_form_spectrum
from shapeinv import oracle
from shapeinv.models import (GeneralPairSpec, PhysicalParams1D, PhysicalParamsRadial,
                             SinhPotentialSpec, build_general_pair, deformed_oscillator_energy,
                             general_spec, map_1d, map_radial, oscillator_1d_residual,
                             radial_operator, radial_operator_residual, sample_points,
                             sinh_from_potential, sinh_potential_operator)

UNIT = dict(mu=1.0, omega=1.0, hbar=1.0)


# one-dimensional oscillator -----------------------------------------------------

def test_undeformed_levels():
    mp = map_1d(PhysicalParams1D(beta=0.0, **UNIT))
    np.testing.assert_allclose(mp.energies(6), np.arange(7) + 0.5, rtol=1e-14)


def test_ground_energy_beta_01():
    mp = map_1d(PhysicalParams1D(beta=0.1, **UNIT))
    assert mp.energies(0)[0] == pytest.approx(0.525625, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0.2, 2), st.floats(0, 1),
       st.floats(-1, 1))
def test_mapping_reproduces_known_formula(mu, omega, hbar, beta, gamma):
    phys = PhysicalParams1D(mu, omega, hbar, beta, gamma)
    mp = map_1d(phys)
    want = [deformed_oscillator_energy(phys, k) for k in range(11)]
    np.testing.assert_allclose(mp.energies(10), want, rtol=1e-12)
    # the offset is m c a with a = 1
    assert mp.energy_offset == pytest.approx(mp.m * float(mp.family.c), rel=1e-12)
    assert abs(mp.diagnostics["sq_mismatch"]) < 1e-12 * max(1.0, 1 / mp.m)


@pytest.mark.parametrize("gamma", [0.0, 0.4])
def test_onedim_operator_match(gamma):
    assert oscillator_1d_residual(PhysicalParams1D(beta=0.2, gamma=gamma, **UNIT)) < 1e-12


def test_physical_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams1D(0, 1, 1, 0.1)
    with pytest.raises(ValueError):
        PhysicalParams1D(1, 1, 1, -0.1)
    with pytest.raises(ValueError):
        PhysicalParamsRadial(1, 1, 1, 0.1, 0, 2.5, 0)
    with pytest.raises(ValueError):
        PhysicalParamsRadial(1, 1, 1, 0.1, -1, 3, 0)


# radial oscillator -----------------------------------------------------------------

def test_radial_d3_identification():
    mp = map_radial(PhysicalParamsRadial(beta=0.1, beta_prime=0, D=3, L2=0, **UNIT))
    fam = mp.family
    assert fam.g2 == 1 and fam.c2 == pytest.approx(0.1)
    # (g1 + 1) g1 = 0 has roots 0 and -1; -1 keeps R_0 ~ p^{-(g1 + g2)} finite at p = 0
    assert sorted(mp.diagnostics["g1_roots"]) == pytest.approx([-1, 0])
    assert fam.g1 == pytest.approx(-1)


def test_radial_root_choice_agrees_with_oracle():
    """Only the regular root reproduces the half-line spectrum of the radial equation."""
    phys = PhysicalParamsRadial(beta=0.1, beta_prime=0, D=3, L2=0, **UNIT)
    mp = map_radial(phys)
    numeric = 0.5 * np.array(oracle.solve(radial_operator(phys), 4, N=2001).eigenvalues)
    np.testing.assert_allclose(mp.energies(3), numeric, rtol=1e-6)
    fam = mp.family
    other = Radial(fam.a, fam.b, fam.c1, 0.0, fam.c2, fam.g2)
    alt = 0.5 * (mp.m * closed_form_spectrum(other, 3).values + mp.energy_offset)
    assert np.max(np.abs(alt - numeric) / numeric) > 1e-2


@pytest.mark.parametrize("ell", [0, 1, 2])
def test_undeformed_radial_levels(ell):
    phys = PhysicalParamsRadial(beta=0, beta_prime=0, D=3, L2=ell * (ell + 1), **UNIT)
    want = 2 * np.arange(5) + ell + 1.5
    np.testing.assert_allclose(map_radial(phys).energies(4), want, rtol=1e-12)
    numeric = 0.5 * np.array(oracle.solve(radial_operator(phys), 5, N=2001).eigenvalues)
    np.testing.assert_allclose(numeric, want, rtol=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, 0.5), st.integers(2, 6), st.floats(0, 6),
       st.floats(-1, 1))
def test_radial_operator_match(beta, beta_prime, D, L2, gamma):
    phys = PhysicalParamsRadial(1, 1, 1, beta, beta_prime, D, L2, gamma)
    try:
        mp = map_radial(phys)
    except ValueError:
        return
    assert abs(mp.diagnostics["inv_sq_mismatch"]) < 1e-9 * max(1, L2)
    assert radial_operator_residual(phys, n_points=400) < 1e-9


def test_radial_inadmissible_reports_equations():
    # with gamma strongly negative the sq channel has no positive root c1 + c2
    phys = PhysicalParamsRadial(beta=0, beta_prime=0, D=3, L2=0, gamma=-10.0, **UNIT)
    with pytest.raises(ValueError, match="matching equations"):
        map_radial(phys)


# sinh well ----------------------------------------------------------------------

@pytest.mark.parametrize("a,b,g", [(1, 0, 3), (2, 1, 1.5), (1, 1, 2), (1, 3, 4)])
def test_sinh_inverse_consistency(a, b, g):
    mp = sinh_from_potential(SinhPotentialSpec(a, b, g * (g + a - b)))
    assert float(mp.family.g) == pytest.approx(g)


def test_sinh_equal_coefficients():
    mp = sinh_from_potential(SinhPotentialSpec(1.5, 1.5, 7.0))
    assert float(mp.family.g) == pytest.approx(math.sqrt(7.0))


def test_sinh_potential_levels():
    spec = SinhPotentialSpec(1, 0, 12)
    mp = sinh_from_potential(spec)
    assert float(mp.family.g) == pytest.approx(3)
    np.testing.assert_allclose(mp.energies(2), [-9, -4, -1], atol=1e-12)
    res = oracle.solve(sinh_potential_operator(spec), 3, N=4001)
    np.testing.assert_allclose(res.eigenvalues, [-9, -4, -1], atol=1e-6)


def test_sinh_spec_validation():
    with pytest.raises(ValueError):
        SinhPotentialSpec(1, 0, -1)


# general pair ------------------------------------------------------------------

def test_general_plain_susy():
    rep = build_general_pair(general_spec("tanh", 0, 0))
    x = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(rep.pair.F(x), 1.0)
    assert rep.passed


def test_general_recovers_quadratic_family():
    a, b, c = 1.5, 0.4, 2.0
    rep = build_general_pair(general_spec("linear", b / c, c * (a - 1), c))
    x = np.linspace(-4, 4, 101)
    np.testing.assert_allclose(rep.pair.F(x), a + b * x * x, rtol=1e-14)
    assert rep.passed


def test_general_tanh_alpha_one():
    rep = build_general_pair(general_spec("tanh", 1, 0))
    x = np.linspace(-3, 3, 101)
    np.testing.assert_allclose(rep.pair.F(x), np.cosh(x) ** 2, rtol=1e-12)
    assert rep.max_residual < 1e-10


@pytest.mark.parametrize("kind", ["cubic", "sinh"])
def test_general_other_shapes(kind):
    assert build_general_pair(general_spec(kind, 0.3, 0.5)).max_residual < 1e-10


def test_general_without_second_derivative():
    rep = build_general_pair(GeneralPairSpec(np.tanh, lambda y: 1 / np.cosh(y) ** 2, 0.5, 0.2))
    assert rep.max_residual < 1e-10


def test_general_errors():
    with pytest.raises(ValueError):
        general_spec("bogus", 0, 0)
    with pytest.raises(ValueError):
        build_general_pair(general_spec("linear", -1, -2))  # 1 + f < 0


def test_sample_points():
    p = sample_points(HALF_LINE, 100)
    assert np.all(p > 0) and np.all(np.diff(p) >= 0)
    q = sample_points(Domain(-1, 2, "finite"), 100)
    assert q.min() >= -1 and q.max() <= 2
    again = sample_points(HALF_LINE, 50, seed=3)
    assert np.array_equal(sample_points(HALF_LINE, 50, seed=3), again)


def test_mapped_families_are_named():
    assert isinstance(map_1d(PhysicalParams1D(beta=0.1, **UNIT)).family, OneDim)
    assert isinstance(map_1d(PhysicalParams1D(beta=0.1, gamma=0.2, **UNIT)).gauge, LinearP)
    assert isinstance(sinh_from_potential(SinhPotentialSpec(1, 0, 2)).family, Sinh)
