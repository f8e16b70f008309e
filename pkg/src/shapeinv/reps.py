"""Wavefunction representations shared by the ladder and wavefunction modules.

A :class:`ClosedForm` holds

    phi(u) = scale * u**rho * P(u) * G(u)**sigma * exp(-kappa * u**2),
    G(u)   = g0 + g2 * u**2

with exact (``Fraction``) coefficients.  ``u`` is either the coordinate
itself (``coord="p"``) or ``tanh`` of it (``coord="tanh"``); in the second
case ``F(y) d/dy = G(t) d/dt`` for the sinh family, so both families share one
algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from gmpy2 import mpq

Exponents = tuple  # (rho, sigma, kappa)
_MPQ = type(mpq())


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        # other exact rationals (gmpy2.mpq)
        return Fraction(int(x.numerator), int(x.denominator))
    return Fraction(float(x))


def exact_number(x):
    """Exact rational, keeping gmpy2 rationals as they are (much faster)."""
    if type(x) is _MPQ:
        return x
    return as_fraction(x)


def _trim(poly: Sequence[Fraction]) -> tuple:
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def poly_add(p, q):
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return _trim(out)


def poly_mul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def poly_scale(p, s):
    return _trim([c * s for c in p])


def poly_deriv(p):
    return _trim([i * c for i, c in enumerate(p)][1:])


def poly_shift(p, n):
    """Multiply by u**n (n >= 0)."""
    if not p:
        return ()
    return tuple([Fraction(0)] * n + list(p))


def poly_eval(p, u):
    """Horner evaluation in floating point."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for c in reversed(p):
        out = out * u + float(c)
    return out


@dataclass(frozen=True)
class ClosedForm:
    poly: tuple
    g0: Fraction = Fraction(1)
    g2: Fraction = Fraction(0)
    sigma: Fraction = Fraction(0)
    rho: Fraction = Fraction(0)
    kappa: Fraction = Fraction(0)
    coord: str = "p"
    half_line: bool = False
    # exponents (rho, sigma, kappa) contributed by the gauge factor exp(-S)
    gauge: Optional[Exponents] = None
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "poly", _trim(as_fraction(c) for c in self.poly))
        for name in ("g0", "g2", "sigma", "rho", "kappa"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.coord not in ("p", "tanh"):
            raise ValueError(f"unknown coordinate {self.coord!r}")
        if not self.half_line and self.rho.denominator != 1:
            raise ValueError("non-integer origin power on the full line")

    @classmethod
    def polynomial_gaussian(cls, coeffs, kappa=0, half_line=False):
        """Smooth test function P(x) exp(-kappa x^2) with exact derivatives."""
        return cls(poly=tuple(as_fraction(c) for c in coeffs), kappa=kappa, half_line=half_line)

    @property
    def is_zero(self) -> bool:
        return not self.poly

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def canonical(self) -> "ClosedForm":
        # move zero low-order coefficients into the origin power; on the full
        # line this only undoes the u**-1 produced by differentiation
        poly, rho = list(self.poly), self.rho
        while poly and poly[0] == 0 and (self.half_line or rho < 0):
            poly.pop(0)
            rho += 1
        if not poly:
            rho = Fraction(0)
        return replace(self, poly=tuple(poly), rho=rho)

    def _q(self) -> tuple:
        """Polynomial Q with d/du phi = u**(rho-1) Q G**(sigma-1) exp(-kappa u^2)."""
        P, G = self.poly, (self.g0, Fraction(0), self.g2)
        u1 = (Fraction(0), Fraction(1))
        term1 = poly_scale(poly_mul(P, G), self.rho)
        term2 = poly_mul(poly_mul(u1, poly_deriv(P)), G)
        term3 = poly_shift(poly_scale(P, 2 * self.g2 * self.sigma), 2)
        term4 = poly_shift(poly_scale(poly_mul(P, G), -2 * self.kappa), 2)
        return poly_add(poly_add(term1, term2), poly_add(term3, term4))

    def derivative(self) -> "ClosedForm":
        """Exact d/du as another closed form (gauge bookkeeping dropped)."""
        if self.is_zero:
            return self
        return replace(self, poly=self._q(), rho=self.rho - 1, sigma=self.sigma - 1,
                       gauge=None).canonical()

    def ladder(self, sign: int, c, h) -> "ClosedForm":
        """Apply sign*G d/du + c u + h/u exactly."""
        if self.is_zero:
            return self
        c, h = as_fraction(c), as_fraction(h)
        wp = poly_mul((h, Fraction(0), c), self.poly)
        body = poly_add(poly_scale(self._q(), sign), wp)
        return replace(self, poly=body, rho=self.rho - 1).canonical()

    def scaled(self, factor: float) -> "ClosedForm":
        return replace(self, scale=self.scale * float(factor))

    def without_gauge(self) -> "ClosedForm":
        if self.gauge is None:
            return self
        r, s, k = self.gauge
        return replace(self, rho=self.rho - r, sigma=self.sigma - s, kappa=self.kappa - k,
                       gauge=None)

    # evaluation ---------------------------------------------------------

    def to_u(self, x):
        x = np.asarray(x, dtype=float)
        return np.tanh(x) if self.coord == "tanh" else x

    def value_u(self, u):
        u = np.asarray(u, dtype=float)
        if self.is_zero:
            return np.zeros_like(u)
        G = float(self.g0) + float(self.g2) * u * u
        with np.errstate(divide="ignore"):
            logw = float(self.sigma) * np.log(G) - float(self.kappa) * u * u
            if self.rho != 0:
                if self.half_line:
                    logw = logw + float(self.rho) * np.log(u)
                else:
                    return self.scale * poly_eval(self.poly, u) * u ** int(self.rho) * np.exp(logw)
        return self.scale * poly_eval(self.poly, u) * np.exp(logw)

    def __call__(self, x):
        return self.value_u(self.to_u(x))

    def derivs(self, x):
        """(phi, phi', phi'') with respect to the physical coordinate."""
        u = self.to_u(x)
        d1 = self.derivative()
        d2 = d1.derivative()
        f, fu, fuu = self.value_u(u), d1.value_u(u), d2.value_u(u)
        if self.coord == "p":
            return f, fu, fuu
        s = 1.0 - u * u
        return f, s * fu, s * s * fuu - 2.0 * u * s * fu

    # normalizability (pure exponent analysis) ---------------------------

    def _integrable(self, extra_g: int, flat_tanh: bool = False) -> bool:
        if self.is_zero:
            return False
        lowest = next(i for i, c in enumerate(self.poly) if c != 0)
        s_low = 2 * (self.rho + lowest)
        s_high = 2 * (self.rho + self.degree)
        tau = 2 * self.sigma + extra_g
        if self.coord == "p":
            ok = True
            if self.half_line:
                ok = s_low > -1
            if self.kappa > 0:
                return ok
            if self.kappa < 0:
                return False
            if self.g2 == 0:
                return False
            return ok and s_high + 2 * tau < -1
        # tanh coordinate on (-1, 1)
        g_end = self.g0 + self.g2
        if g_end > 0:
            # G regular at the ends; flat measure carries 1/(1-t^2)
            return not flat_tanh
        if g_end == 0:
            power = tau - (1 if flat_tanh else 0)
            return power > -1
        return False

    @property
    def normalizable(self) -> bool:
        """Finite norm under the weighted measure dx/F."""
        return self._integrable(-1)

    @property
    def normalizable_flat(self) -> bool:
        """Finite norm under the flat measure dx."""
        return self._integrable(0, flat_tanh=True)


@dataclass(frozen=True)
class Sampled:
    """Grid samples with quadrature weights for the measure dx/F."""

    x: np.ndarray
    values: np.ndarray
    measure_weights: np.ndarray
    q: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.x) != len(self.values) or len(self.x) != len(self.measure_weights):
            raise ValueError("grid, values and weights must have equal length")

    def derivs(self, x=None):
        f1 = np.gradient(self.values, self.x, edge_order=2)
        f2 = np.gradient(f1, self.x, edge_order=2)
        if x is None:
            return self.values, f1, f2
        return (np.interp(x, self.x, self.values), np.interp(x, self.x, f1),
                np.interp(x, self.x, f2))

    def __call__(self, x):
        return np.interp(x, self.x, self.values)
