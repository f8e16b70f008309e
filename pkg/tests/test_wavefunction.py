import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from shapeinv import OneDim, Radial, Sinh, bound_state_count
from shapeinv import wavefunction as wf
from shapeinv.models import PhysicalParams1D, map_1d
from shapeinv.reps import ClosedForm, Sampled
from shapeinv.wavefunction import Moments

UNIT = dict(mu=1.0, omega=1.0, hbar=1.0)


# construction ------------------------------------------------------------------

def test_ground_state_onedim_example():
    phi = wf.ground_state(OneDim(1, 1, 2))
    p = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(phi(p), 1 / (1 + p * p), rtol=1e-15)
    assert wf.annihilation_residual(OneDim(1, 1, 2)) < 1e-12


def test_ground_state_undeformed_gaussian():
    a, c = Fraction(3, 2), Fraction(2)
    phi = wf.ground_state(OneDim(a, 0, c))
    p = np.linspace(-4, 4, 81)
    np.testing.assert_allclose(phi(p), np.exp(-float(c) * p * p / (2 * float(a))), rtol=1e-14)


def test_ground_state_poschl_teller():
    phi = wf.ground_state(Sinh(1, 0, 3))
    y = np.linspace(-6, 6, 121)
    # (1 - t^2)^{3/2} loses a few digits to cancellation near |t| = 1
    np.testing.assert_allclose(phi(y), np.cosh(y) ** -3, rtol=1e-10)
    assert wf.annihilation_residual(Sinh(1, 0, 3)) < 1e-12


def test_first_excited_state_onedim():
    fam = OneDim(1, 1, 2)
    phi = wf.excited_state(fam, 1)
    assert phi.degree == 1 and phi.poly[0] == 0  # odd, degree one
    # one raising step multiplies by (1 + p^2)^{-1/2} relative to the shifted ground state
    assert phi.sigma == Fraction(-3, 2)
    r = wf.eigen_residual(fam, 1)
    assert r["eigenvalue"] == 5.0 and r["exact"] == 0 and r["pointwise"] < 1e-12


def test_k_zero_is_ground_state():
    for fam in (OneDim(1, 0.5, 1), Radial(1, 0.2, 1.5, -1), Sinh(2, 1, 3)):
        assert wf.excited_state(fam, 0) == wf.ground_state(fam)


def test_undeformed_second_state_is_hermite():
    phi = wf.excited_state(OneDim(1, 0, 1), 2)
    # H_2 up to scale: 4p^2 - 2, so the ratio of coefficients is -1/2
    assert phi.degree == 2 and phi.poly[1] == 0
    assert phi.poly[0] / phi.poly[2] == Fraction(-1, 2)
    assert phi.kappa == Fraction(1, 2)


def test_sinh_beyond_tower_rejected():
    with pytest.raises(ValueError, match="3 bound states"):
        wf.excited_state(Sinh(1, 0, 3), 3)
    with pytest.raises(ValueError):
        wf.excited_state(OneDim(1, 0, 1), -1)


def test_cache_reuse():
    cache = {}
    a = wf.excited_state(OneDim(1, 0.5, 1), 4, cache)
    assert wf.excited_state(OneDim(1, 0.5, 1), 4, cache) is a


# properties -----------------------------------------------------------------------

pos = st.fractions(min_value=Fraction(1, 5), max_value=3, max_denominator=10)
nonneg = st.fractions(min_value=0, max_value=2, max_denominator=10)
real = st.fractions(min_value=-2, max_value=2, max_denominator=10)


@settings(max_examples=25, deadline=None)
@given(st.one_of(st.builds(OneDim, pos, nonneg, pos, real),
                 st.builds(Radial, pos, nonneg, pos, st.fractions(-3, 0, max_denominator=10),
                           real, real),
                 st.builds(Sinh, pos, nonneg, pos)),
       st.integers(0, 6))
def test_eigen_residual_exact(fam, k):
    try:
        r = wf.eigen_residual(fam, k)
    except ValueError:
        assert isinstance(fam, Sinh)  # beyond the finite tower
        return
    assert r["exact"] == 0
    assert wf.annihilation_residual(fam) == 0


@pytest.mark.parametrize("fam", [OneDim(1, 0.3, 1.1), Radial(1, 0.1, 1.2, -1), Sinh(1, 0, 8),
                                 Sinh(3, 1, 7)])
def test_node_count_equals_k(fam):
    n = 7 if not isinstance(fam, Sinh) else min(7, int(bound_state_count(fam)))
    for k in range(n):
        assert wf.node_count(wf.excited_state(fam, k)) == k


# norms ----------------------------------------------------------------------------

def test_gaussian_norm_against_quadrature():
    phi = wf.ground_state(OneDim(1, 0, 1))  # exp(-p^2 / 2)
    assert wf.norm(phi) ** 2 == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    quad, _ = integrate.quad(lambda p: math.exp(-p * p), -np.inf, np.inf, epsabs=1e-14)
    assert abs(wf.norm(phi) ** 2 - quad) < 1e-10
    unit = wf.normalize(phi)
    assert unit(0.0) == pytest.approx(math.pi ** -0.25, rel=1e-14)


def test_normalize_idempotent():
    phi = wf.normalize(wf.excited_state(OneDim(1, 0.5, 1.5), 3))
    again = wf.normalize(phi)
    assert abs(again.scale / phi.scale - 1) < 1e-12


def test_both_measures_reported():
    phi = wf.ground_state(OneDim(1, 1, 2))
    verdict = wf.normalizability(phi)
    assert verdict["weighted"] and verdict["flat"]
    flat, _ = integrate.quad(lambda p: (1 + p * p) ** -2, -np.inf, np.inf)
    weighted, _ = integrate.quad(lambda p: (1 + p * p) ** -3, -np.inf, np.inf)
    assert flat == pytest.approx(math.pi / 2)
    assert wf.norm(phi) ** 2 == pytest.approx(weighted, rel=1e-12)


def test_non_normalizable_rejected():
    phi = ClosedForm(poly=(1,), g0=1, g2=1, sigma=Fraction(1, 4))
    assert not phi.normalizable
    with pytest.raises(ValueError):
        wf.normalize(phi)


def test_beta_sigma_norm_against_quadrature():
    phi = wf.excited_state(OneDim(1, Fraction(1, 2), Fraction(3, 2)), 2)
    quad, _ = integrate.quad(lambda p: phi(p) ** 2 / (1 + 0.5 * p * p), -np.inf, np.inf,
                             epsabs=1e-13, epsrel=1e-13)
    assert wf.norm(phi) ** 2 == pytest.approx(quad, rel=1e-10)


def test_radial_norm_against_quadrature():
    phi = wf.excited_state(Radial(1, Fraction(1, 5), Fraction(3, 2), -1), 2)
    quad, _ = integrate.quad(lambda p: phi(p) ** 2 / (1 + 0.2 * p * p), 0, np.inf,
                             epsabs=1e-13, epsrel=1e-13)
    assert wf.norm(phi) ** 2 == pytest.approx(quad, rel=1e-10)


def test_sinh_norm_against_quadrature():
    phi = wf.excited_state(Sinh(1, 0, 4), 2)
    quad, _ = integrate.quad(lambda y: phi(y) ** 2, -30, 30, epsabs=1e-14, epsrel=1e-13)
    assert wf.norm(phi) ** 2 == pytest.approx(quad, rel=1e-10)


def test_orthogonality_onedim():
    fam = OneDim(1, Fraction(1, 4), 1)
    states = [wf.normalize(wf.excited_state(fam, k)) for k in range(8)]
    gram = np.array([[wf.inner_product(a, b) for b in states] for a in states])
    np.testing.assert_allclose(gram, np.eye(8), atol=1e-12)


def test_covariant_orthogonality_with_gauge():
    fam = OneDim(1, Fraction(1, 4), 1, c2=Fraction(1, 2))
    states = [wf.normalize(wf.excited_state(fam, k), wf.COVARIANT) for k in range(6)]
    gram = np.array([[wf.inner_product(a, b, wf.COVARIANT) for b in states] for a in states])
    np.testing.assert_allclose(gram, np.eye(6), atol=1e-12)


def test_inner_product_errors():
    a = wf.ground_state(OneDim(1, 1, 2))
    b = wf.ground_state(OneDim(1, 0.5, 2))
    with pytest.raises(ValueError):
        wf.inner_product(a, b)
    with pytest.raises(ValueError):
        wf.inner_product(a, a, "flat")


def test_sampled_inner_product():
    phi = wf.normalize(wf.ground_state(OneDim(1, 0.2, 1)))
    smp = wf.sample(phi, 4001)
    assert wf.inner_product(smp, smp) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(TypeError):
        wf.inner_product(smp, phi)
    other = Sampled(smp.x[:-1], smp.values[:-1], smp.measure_weights[:-1])
    with pytest.raises(ValueError):
        wf.inner_product(smp, other)


# moments and the uncertainty relation ------------------------------------------------

def test_heisenberg_saturation():
    phys = PhysicalParams1D(beta=0.0, **UNIT)
    phi = wf.normalize(wf.excited_state(map_1d(phys).family, 0), wf.COVARIANT)
    m = wf.moments(phi, phys)
    assert m.product == pytest.approx(0.5, abs=1e-12)
    assert wf.check_uncertainty(m, 0.0, 1.0).passed


@pytest.mark.parametrize("gamma", [0.0, 0.5])
def test_parity_and_bound(gamma):
    phys = PhysicalParams1D(beta=0.1, gamma=gamma, **UNIT)
    fam = map_1d(phys).family
    for k in range(6):
        m = wf.moments(wf.normalize(wf.excited_state(fam, k), wf.COVARIANT), phys)
        assert abs(m.p_mean) < 1e-14
        c = wf.check_uncertainty(m, phys.beta, phys.hbar)
        assert c.passed and m.dx > math.sqrt(0.1)


def test_moments_gauge_independent():
    ms = []
    for gamma in (0.0, 0.3, 1.0):
        phys = PhysicalParams1D(beta=0.1, gamma=gamma, **UNIT)
        phi = wf.normalize(wf.excited_state(map_1d(phys).family, 2), wf.COVARIANT)
        ms.append(wf.moments(phi, phys))
    for m in ms[1:]:
        assert m.dx == pytest.approx(ms[0].dx, rel=1e-12)
        assert m.dp == pytest.approx(ms[0].dp, rel=1e-12)


def test_moments_against_sampled_quadrature():
    phys = PhysicalParams1D(beta=0.1, **UNIT)
    phi = wf.normalize(wf.excited_state(map_1d(phys).family, 1), wf.COVARIANT)
    exact = wf.moments(phi, phys)
    p = np.linspace(-40, 40, 400_001)
    v = phi(p)
    F = 1 + 0.1 * p * p
    _, d1, _ = phi.derivs(p)
    p2 = integrate.simpson(p * p * v * v / F, x=p)
    x2 = integrate.simpson(F * d1 * d1, x=p)
    assert exact.p2 == pytest.approx(p2, rel=1e-8)
    assert exact.x2 == pytest.approx(x2, rel=1e-8)


def test_forced_gaussian_violates_bound():
    phys0 = PhysicalParams1D(beta=0.0, **UNIT)
    gauss = wf.normalize(wf.excited_state(map_1d(phys0).family, 0), wf.COVARIANT)
    m = wf.moments(gauss, phys0)
    assert not wf.check_uncertainty(m, beta=0.1, hbar=1.0).passed
    fake = Moments(0.0, 1.0, 0.0, 0.01, 0.1, 1.0)
    check = wf.check_uncertainty(fake, 0.1, 1.0)
    assert not check.passed and check.minimal_length == pytest.approx(math.sqrt(0.1))


def test_moments_input_checks():
    phys = PhysicalParams1D(beta=0.1, **UNIT)
    phi = wf.excited_state(map_1d(phys).family, 0)
    with pytest.raises(ValueError, match="normalized"):
        wf.moments(phi.scaled(3.0), phys)
    with pytest.raises(ValueError):
        wf.moments(wf.normalize(phi, wf.COVARIANT), PhysicalParams1D(beta=0.2, **UNIT))
    with pytest.raises(ValueError):
        wf.moments(wf.normalize(wf.ground_state(Radial(1, 0.1, 1, -1))), phys)
    with pytest.raises(ValueError):
        wf.check_uncertainty(Moments(0, 0, 0, 1, 1, 0), 0.1, 1.0)


def test_sampled_moments_close_to_exact():
    phys = PhysicalParams1D(beta=0.1, **UNIT)
    phi = wf.normalize(wf.excited_state(map_1d(phys).family, 0), wf.COVARIANT)
    smp = wf.sample(phi, 8001)
    m_s, m_e = wf.moments(smp, phys), wf.moments(phi, phys)
    assert m_s.dx == pytest.approx(m_e.dx, rel=1e-4)
    assert m_s.dp == pytest.approx(m_e.dp, rel=1e-4)


def test_sample_matches_closed_form():
    phi = wf.normalize(wf.excited_state(OneDim(1, 0.1, 1.05), 0))
    smp = wf.sample(phi, 2001)
    np.testing.assert_allclose(smp.values, phi(smp.x), rtol=0, atol=0)
    assert np.all(np.diff(smp.q) > 0)
