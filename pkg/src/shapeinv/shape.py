"""Shape-invariance rules derived by channel matching, and exact spectra.

The parameter map is found as a translation x -> x + delta of each moving
parameter: equating the channel polynomials of A Abar(x) and Abar A(x + delta)
identically in x gives a linear equation for delta.  This is the branch that
reduces to the identity as the step goes to zero.  The energy shift is the
mismatch left in the constant channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from gmpy2 import mpq

from .ladder import (A_ABAR, ABAR_A, HALF_LINE, LadderPair, LinearP, LinearPlusInverse,
                     QuadraticP, SinhSq, Tanh, Zero, compose)

UNBOUNDED = math.inf


class NotShapeInvariant(ValueError):
    pass


@dataclass(frozen=True)
class OneDim:
    a: Union[float, Fraction]
    b: Union[float, Fraction]
    c: Union[float, Fraction]
    c2: Union[float, Fraction] = 0

    # channel -> parameter it pins down
    matching = (("sq", "c"),)

    def __post_init__(self):
        if not self.a > 0 or self.b < 0:
            raise ValueError("OneDim needs a > 0 and b >= 0")

    def validate(self):
        if not self.c > 0:
            raise ValueError("OneDim needs c > 0")
        return self

    def pair(self) -> LadderPair:
        om = LinearP(self.c2) if self.c2 else Zero()
        return LadderPair(QuadraticP(self.a, self.b), LinearP(self.c), om)


@dataclass(frozen=True)
class Radial:
    a: Union[float, Fraction]
    b: Union[float, Fraction]
    c1: Union[float, Fraction]
    g1: Union[float, Fraction]
    c2: Union[float, Fraction] = 0
    g2: Union[float, Fraction] = 0

    matching = (("sq", "c1"), ("inv_sq", "g1"))

    def __post_init__(self):
        if not self.a > 0 or self.b < 0:
            raise ValueError("Radial needs a > 0 and b >= 0")

    def validate(self):
        return self

    def pair(self) -> LadderPair:
        om = LinearPlusInverse(self.c2, self.g2) if (self.c2 or self.g2) else Zero()
        return LadderPair(QuadraticP(self.a, self.b, HALF_LINE),
                          LinearPlusInverse(self.c1, self.g1), om)


@dataclass(frozen=True)
class Sinh:
    a: Union[float, Fraction]
    b: Union[float, Fraction]
    g: Union[float, Fraction]

    matching = (("sech2", "g"),)

    def __post_init__(self):
        if not self.a > 0 or self.b < 0:
            raise ValueError("Sinh needs a > 0 and b >= 0")

    def validate(self):
        if not self.g > 0:
            raise ValueError("Sinh needs g > 0")
        return self

    def pair(self) -> LadderPair:
        return LadderPair(SinhSq(self.a, self.b), Tanh(self.g))


FamilyParams = Union[OneDim, Radial, Sinh]
FAMILIES = (OneDim, Radial, Sinh)


def _q(x):
    # gmpy2 rationals: exact like Fraction, an order of magnitude faster
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def exact_params(family: FamilyParams) -> FamilyParams:
    return replace(family, **{f.name: _q(getattr(family, f.name)) for f in fields(family)})


def _channel(family, order, name):
    return getattr(compose(family.pair(), order, exact=True).channels, name)


def _quadratic_in(family, order, channel, param):
    # channels are at most quadratic in each moving parameter
    y = [_channel(replace(family, **{param: mpq(x)}), order, channel) for x in (0, 1, 2)]
    alpha = (y[2] - 2 * y[1] + y[0]) / 2
    beta = y[1] - y[0] - alpha
    return alpha, beta, y[0]


class _Quadric:
    """Exact total-degree-2 polynomial in the moving parameters."""

    def __init__(self, fn, base, names):
        self.names = names
        at = lambda **kw: fn(replace(base, **{n: mpq(kw.get(n, 0)) for n in names}))  # noqa: E731
        f0 = at()
        self.c0 = f0
        self.lin, self.sq, self.cross = {}, {}, {}
        for n in names:
            f1, f2 = at(**{n: 1}), at(**{n: 2})
            self.sq[n] = (f2 - 2 * f1 + f0) / 2
            self.lin[n] = f1 - f0 - self.sq[n]
        for i, n in enumerate(names):
            for m in names[i + 1:]:
                self.cross[n, m] = (at(**{n: 1, m: 1}) - at(**{n: 1}) - at(**{m: 1}) + f0)

    def __call__(self, params):
        v = {n: getattr(params, n) for n in self.names}
        out = self.c0
        for n in self.names:
            out += self.lin[n] * v[n] + self.sq[n] * v[n] * v[n]
        for (n, m), c in self.cross.items():
            out += c * v[n] * v[m]
        return out


@dataclass(frozen=True)
class ShapeRule:
    """Translation of the moving parameters plus the per-step constant."""

    family: type
    deltas: tuple  # ((param, delta), ...)
    base: Optional[FamilyParams] = None

    def apply(self, params: FamilyParams) -> FamilyParams:
        return replace(params, **{p: getattr(params, p) + d for p, d in self.deltas})

    def shift(self, params: FamilyParams) -> Fraction:
        params = exact_params(params)
        return (_channel(params, A_ABAR, "constant")
                - _channel(self.apply(params), ABAR_A, "constant"))

    def delta(self, name: str) -> Fraction:
        return dict(self.deltas)[name]

    def shift_function(self):
        """Exact shift as a function of the moving parameters only.

        Built from composed constant channels and checked against a direct
        composition at the base point; valid along the parameter orbit.
        """
        names = tuple(p for p, _ in self.deltas)
        before = _Quadric(lambda f: _channel(f, A_ABAR, "constant"), self.base, names)
        after = _Quadric(lambda f: _channel(f, ABAR_A, "constant"), self.base, names)
        fn = lambda p: before(p) - after(self.apply(p))  # noqa: E731
        if fn(self.base) != self.shift(self.base):
            raise NotShapeInvariant("constant channel is not quadratic in the moving parameters")
        return fn


def derive_shape_rule(family: FamilyParams) -> ShapeRule:
    """Match A Abar(params) against Abar A(mapped params) channel by channel."""
    if not isinstance(family, FAMILIES):
        raise TypeError("shape rules exist only for the named families")
    family = exact_params(family.validate())
    deltas = []
    for channel, param in family.matching:
        al, be, ka = _quadratic_in(family, ABAR_A, channel, param)
        al2, be2, ka2 = _quadratic_in(family, A_ABAR, channel, param)
        if al != al2:
            raise NotShapeInvariant(f"{channel}: leading coefficients differ ({al} vs {al2})")
        if al != 0:
            d = (be2 - be) / (2 * al)
            ok = al * d * d + be * d + ka == ka2
        elif be != be2:
            raise NotShapeInvariant(f"{channel}: no translation matches")
        elif be != 0:
            d = (ka2 - ka) / be
            ok = True
        else:
            d, ok = mpq(0), ka == ka2
        if not ok:
            raise NotShapeInvariant(f"{channel}: constant terms cannot be matched")
        deltas.append((param, d))
    rule = ShapeRule(type(family), tuple(deltas), family)
    # every non-constant channel must now agree
    lhs = compose(family.pair(), A_ABAR, exact=True).channels
    rhs = compose(rule.apply(family).pair(), ABAR_A, exact=True).channels
    for name in ("inv_sq", "sq", "sech2"):
        if getattr(lhs, name) != getattr(rhs, name):
            raise NotShapeInvariant(f"{name} channel left unmatched")
    return rule


@dataclass(frozen=True)
class SpectrumTable:
    family: FamilyParams
    entries: tuple  # ((k, value), ...)
    provenance: str  # "closed-form", "iteration" or "oracle"
    exact: Optional[tuple] = None

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.entries], dtype=float)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k][1]


def _table(family, values, provenance):
    return SpectrumTable(family, tuple((k, float(v)) for k, v in enumerate(values)),
                         provenance, tuple(values))


def spectrum_by_iteration(family: FamilyParams, k_max: int) -> SpectrumTable:
    """Lambda_k as the running sum of shifts along the parameter orbit."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    rule = derive_shape_rule(family)
    shift = rule.shift_function()
    params = exact_params(family)
    values = [mpq(0)]
    for _ in range(k_max):
        values.append(values[-1] + shift(params))
        params = rule.apply(params)
    return _table(family, values, "iteration")


def closed_form_value(family: FamilyParams, k) -> Fraction:
    f = exact_params(family)
    k = mpq(k)
    if isinstance(f, OneDim):
        return f.a * (k * k * f.b + 2 * k * f.c)
    if isinstance(f, Radial):
        return 4 * f.a * f.b * k * k + 4 * (f.a * f.c1 - f.b * f.g1) * k
    if isinstance(f, Sinh):
        # follows from the composed operator; see erratum_sinh_energy
        return f.a * k * (2 * f.g + (f.b - f.a) * k)
    raise TypeError("closed forms exist only for the named families")


def closed_form_spectrum(family: FamilyParams, k_max: int) -> SpectrumTable:
    family.validate()
    return _table(family, [closed_form_value(family, k) for k in range(k_max + 1)],
                  "closed-form")


def erratum_sinh_energy(a, b, g, k):
    """Superseded sinh level formula k(2g-b)(b-a) - k^2 (a-b)^2.

    Kept only to document that it disagrees with the composed operator; at
    b = 0 it is negative for every k >= 1.
    """
    return k * (2 * g - b) * (b - a) - k * k * (a - b) ** 2


def erratum_sinh_shift(a, b, g):
    """Superseded sinh step constant (2g - a)(a - b)."""
    return (2 * g - a) * (a - b)


def bound_state_count(family: Sinh):
    """Number of algebraic sinh states with a normalizable ground state.

    State k exists while the shifted coupling g + k(b - a) stays positive;
    for b >= a the tower never ends and ``UNBOUNDED`` is returned.
    """
    if not isinstance(family, Sinh):
        raise TypeError("bound_state_count applies to the sinh family")
    f = exact_params(family.validate())
    if f.b >= f.a:
        return UNBOUNDED
    return math.ceil(f.g / (f.a - f.b))


def orbit(family: FamilyParams, k: int) -> Sequence[FamilyParams]:
    """[params, map(params), ..., map^k(params)] in exact arithmetic."""
    rule = derive_shape_rule(family)
    out = [exact_params(family)]
    for _ in range(k):
        out.append(rule.apply(out[-1]))
    return out
