from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from shapeinv.reps import (ClosedForm, Sampled, as_fraction, exact_number, poly_add, poly_deriv,
                           poly_eval, poly_mul, poly_shift)

small = st.fractions(min_value=-2, max_value=2, max_denominator=8)


def test_exact_conversions():
    assert as_fraction(0.5) == Fraction(1, 2)
    assert as_fraction(np.int64(3)) == 3
    assert as_fraction(mpq(2, 7)) == Fraction(2, 7)
    q = mpq(1, 3)
    assert exact_number(q) is q
    assert exact_number(Fraction(1, 3)) == Fraction(1, 3)


def test_polynomial_helpers():
    p, q = (1, 2), (0, 0, 3)
    assert poly_add(p, q) == (1, 2, 3)
    assert poly_mul(p, q) == (0, 0, 3, 6)
    assert poly_deriv((5, 1, 2)) == (1, 4)
    assert poly_shift((1,), 2) == (0, 0, 1)
    assert poly_add((1, 1), (0, -1)) == (1,)
    np.testing.assert_allclose(poly_eval((1, 2, 3), np.array([0.0, 2.0])), [1, 17])


def _numeric_derivs(phi, x, h=1e-4):
    f = lambda z: phi(z)  # noqa: E731
    d1 = (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)
    d2 = (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)
    return d1, d2


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=1, max_size=4), st.fractions(0, 1, max_denominator=8),
       st.fractions(-2, 0, max_denominator=8), st.fractions(0, 1, max_denominator=4))
def test_derivatives_full_line(poly, g2, sigma, kappa):
    phi = ClosedForm(poly=tuple(poly), g0=1, g2=g2, sigma=sigma, kappa=kappa)
    if phi.is_zero:
        return
    x = np.linspace(-2, 2, 41)
    f, f1, f2 = phi.derivs(x)
    n1, n2 = _numeric_derivs(phi, x)
    scale = max(1.0, float(np.max(np.abs(f))))
    assert np.max(np.abs(f1 - n1)) < 1e-7 * scale
    assert np.max(np.abs(f2 - n2)) < 1e-5 * scale


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=1, max_size=3), st.fractions(-2, 2, max_denominator=4),
       st.fractions(-2, 1, max_denominator=4))
def test_derivatives_half_line_and_tanh(poly, rho, sigma):
    half = ClosedForm(poly=tuple(poly), g0=1, g2=Fraction(1, 2), sigma=sigma, rho=rho,
                      half_line=True)
    th = ClosedForm(poly=tuple(poly), g0=2, g2=-1, sigma=sigma, coord="tanh")
    for phi, x in ((half, np.linspace(0.3, 3, 28)), (th, np.linspace(-2, 2, 41))):
        if phi.is_zero:
            continue
        f, f1, f2 = phi.derivs(x)
        n1, n2 = _numeric_derivs(phi, x, 1e-4)
        scale = max(1.0, float(np.max(np.abs(f))), float(np.max(np.abs(f1))))
        assert np.max(np.abs(f1 - n1)) < 1e-6 * scale
        assert np.max(np.abs(f2 - n2)) < 1e-4 * max(scale, float(np.max(np.abs(f2))))


def test_ladder_matches_pointwise():
    phi = ClosedForm(poly=(1, 0, 2), g0=1, g2=Fraction(1, 3), sigma=Fraction(-3, 2))
    x = np.linspace(-3, 3, 31)
    out = phi.ladder(-1, Fraction(2), 0)
    f, f1, _ = phi.derivs(x)
    np.testing.assert_allclose(out(x), -(1 + x * x / 3) * f1 + 2 * x * f, rtol=1e-13, atol=1e-14)


def test_canonical_and_gauge_strip():
    phi = ClosedForm(poly=(0, 0, 1), rho=Fraction(1, 2), half_line=True).canonical()
    assert phi.poly == (1,) and phi.rho == Fraction(5, 2)
    g = ClosedForm(poly=(1,), kappa=1, sigma=-1, g2=1, gauge=(0, -1, Fraction(1, 2)))
    bare = g.without_gauge()
    assert bare.gauge is None and bare.sigma == 0 and bare.kappa == Fraction(1, 2)


def test_validation():
    with pytest.raises(ValueError):
        ClosedForm(poly=(1,), rho=Fraction(1, 2))
    with pytest.raises(ValueError):
        ClosedForm(poly=(1,), coord="r")
    with pytest.raises(ValueError):
        Sampled(np.zeros(3), np.zeros(2), np.zeros(3))


def test_normalizability_exponents():
    assert ClosedForm(poly=(1,), kappa=1).normalizable
    assert not ClosedForm(poly=(1,), kappa=-1).normalizable
    assert not ClosedForm(poly=(1,)).normalizable
    # (1 + p^2)^{-1}: weighted integrand ~ p^-6, flat ~ p^-4
    phi = ClosedForm(poly=(1,), g2=1, sigma=-1)
    assert phi.normalizable and phi.normalizable_flat
    # flat sinh measure dt/(1 - t^2) needs the state to vanish at |t| = 1
    assert ClosedForm(poly=(1,), g0=1, g2=-1, sigma=1, coord="tanh").normalizable_flat
    assert not ClosedForm(poly=(1,), g0=2, g2=-1, coord="tanh").normalizable_flat
