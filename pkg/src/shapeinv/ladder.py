"""First-order ladder pairs and the second-order operators they compose to.

A ladder pair is

    A    =  F d/dx + W + Omega
    Abar = -F d/dx + W - Omega

and the two products are

    Abar A = -(F d/dx)^2 - 2 F Omega d/dx + W^2 - Omega^2 - F (W' + Omega')
    A Abar = -(F d/dx)^2 - 2 F Omega d/dx + W^2 - Omega^2 + F (W' - Omega')

For the named families the potential is expanded exactly in a finite channel
basis {1/p^2, p^2, sech^2 y, 1}; the general family is handled pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from .reps import ClosedForm, Sampled, exact_number

Number = Union[float, Fraction]


class IncompatibleShape(ValueError):
    """Superpotential shape cannot live on the profile's domain."""


@dataclass(frozen=True)
class Domain:
    lo: float
    hi: float
    kind: str  # "full", "half" or "finite"

    def __post_init__(self):
        if self.kind not in ("full", "half", "finite"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not self.lo < self.hi:
            raise ValueError("empty domain")

    @property
    def scale(self) -> float:
        if math.isfinite(self.lo) and math.isfinite(self.hi):
            return self.hi - self.lo
        return 1.0


FULL_LINE = Domain(-math.inf, math.inf, "full")
HALF_LINE = Domain(0.0, math.inf, "half")


# deformation profiles ------------------------------------------------------

@dataclass(frozen=True)
class QuadraticP:
    """F(p) = a + b p^2."""

    a: Number
    b: Number = 0
    domain: Domain = FULL_LINE
    coord = "p"

    def __post_init__(self):
        if not self.a > 0 or self.b < 0:
            raise ValueError(f"QuadraticP needs a > 0, b >= 0 (got a={self.a}, b={self.b})")
        if self.domain.kind == "finite" or (self.domain.kind == "half" and self.domain.lo != 0):
            raise ValueError("QuadraticP lives on the full line or on (0, inf)")

    @property
    def g_coeffs(self):
        return exact_number(self.a), exact_number(self.b)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return float(self.a) + float(self.b) * x * x

    def deriv(self, x):
        return 2.0 * float(self.b) * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SinhSq:
    """F(y) = a + b sinh^2 y; in t = tanh y this is F d/dy = (a + (b-a) t^2) d/dt."""

    a: Number
    b: Number = 0
    domain: Domain = FULL_LINE
    coord = "tanh"

    def __post_init__(self):
        if not self.a > 0 or self.b < 0:
            raise ValueError(f"SinhSq needs a > 0, b >= 0 (got a={self.a}, b={self.b})")
        if self.domain.kind != "full":
            raise ValueError("SinhSq lives on the full line")

    @property
    def g_coeffs(self):
        a, b = exact_number(self.a), exact_number(self.b)
        return a, b - a

    def __call__(self, x):
        s = np.sinh(np.asarray(x, dtype=float))
        return float(self.a) + float(self.b) * s * s

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * float(self.b) * np.sinh(x) * np.cosh(x)


@dataclass(frozen=True)
class GeneralProfile:
    """F(y) = 1 + f(y) for an arbitrary evaluable f."""

    f: Callable
    df: Optional[Callable] = None
    domain: Domain = FULL_LINE
    coord = None

    def __call__(self, x):
        return 1.0 + np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self.df is not None:
            return np.asarray(self.df(x), dtype=float)
        # five-point stencil; only enters terms that cancel in commutators
        h = 1e-3 * np.maximum(1.0, np.abs(x))
        f = self.f
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


DeformationProfile = Union[QuadraticP, SinhSq, GeneralProfile]


# superpotential shapes -----------------------------------------------------

@dataclass(frozen=True)
class Zero:
    def value(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def deriv(self, x):
        return self.value(x)

    def laurent(self, coord):
        return {}


@dataclass(frozen=True)
class LinearP:
    c: Number

    def value(self, x):
        return float(self.c) * np.asarray(x, dtype=float)

    def deriv(self, x):
        return np.full_like(np.asarray(x, dtype=float), float(self.c))

    def laurent(self, coord):
        return {1: exact_number(self.c)} if coord == "p" else None


@dataclass(frozen=True)
class LinearPlusInverse:
    c: Number
    g: Number

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(self.c) * x + float(self.g) / x

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return float(self.c) - float(self.g) / (x * x)

    def laurent(self, coord):
        return {1: exact_number(self.c), -1: exact_number(self.g)} if coord == "p" else None


@dataclass(frozen=True)
class Tanh:
    g: Number

    def value(self, x):
        return float(self.g) * np.tanh(np.asarray(x, dtype=float))

    def deriv(self, x):
        return float(self.g) / np.cosh(np.asarray(x, dtype=float)) ** 2

    def laurent(self, coord):
        # g tanh y is the linear shape in t = tanh y
        return {1: exact_number(self.g)} if coord == "tanh" else None


@dataclass(frozen=True)
class GeneralShape:
    g: Callable
    dg: Callable

    def value(self, x):
        return np.asarray(self.g(np.asarray(x, dtype=float)), dtype=float)

    def deriv(self, x):
        return np.asarray(self.dg(np.asarray(x, dtype=float)), dtype=float)

    def laurent(self, coord):
        return None


SuperpotentialShape = Union[Zero, LinearP, LinearPlusInverse, Tanh, GeneralShape]


@dataclass(frozen=True)
class LadderPair:
    F: DeformationProfile
    W: SuperpotentialShape
    omega: SuperpotentialShape = field(default_factory=Zero)

    def __post_init__(self):
        for shape in (self.W, self.omega):
            if isinstance(shape, LinearPlusInverse) and not (
                isinstance(self.F, GeneralProfile) or self.F.domain.kind == "half"
            ):
                raise IncompatibleShape("c p + g/p needs the half-line domain")
            if isinstance(self.F, (QuadraticP, SinhSq)) and shape.laurent(self.F.coord) is None \
                    and not isinstance(shape, GeneralShape):
                raise IncompatibleShape(
                    f"{type(shape).__name__} is not defined for {type(self.F).__name__}")

    @property
    def domain(self) -> Domain:
        return self.F.domain

    @property
    def named(self) -> bool:
        """Exact channel algebra applies (no General pieces)."""
        return (isinstance(self.F, (QuadraticP, SinhSq))
                and self.W.laurent(self.F.coord) is not None
                and self.omega.laurent(self.F.coord) is not None)

    def with_omega(self, omega) -> "LadderPair":
        return LadderPair(self.F, self.W, omega)

    def A(self, phi, x):
        f, f1, _ = phi.derivs(x)
        return self.F(x) * f1 + (self.W.value(x) + self.omega.value(x)) * f

    def Abar(self, phi, x):
        f, f1, _ = phi.derivs(x)
        return -self.F(x) * f1 + (self.W.value(x) - self.omega.value(x)) * f


# exact Laurent algebra in the u coordinate ---------------------------------

def _lmul(p, q):
    out = {}
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] = out.get(i + j, 0) + a * b
    return out


def _ladd(*terms):
    out = {}
    for sign, p in terms:
        for i, a in p.items():
            out[i] = out.get(i, 0) + sign * a
    return {i: a for i, a in out.items() if a != 0}


def _lderiv(p):
    return {i - 1: i * a for i, a in p.items() if i != 0}


@dataclass(frozen=True)
class Channels:
    inv_sq: Number = 0
    sq: Number = 0
    sech2: Number = 0
    constant: Number = 0

    def __sub__(self, other: "Channels") -> "Channels":
        return Channels(self.inv_sq - other.inv_sq, self.sq - other.sq,
                        self.sech2 - other.sech2, self.constant - other.constant)

    def as_float(self) -> "Channels":
        return Channels(float(self.inv_sq), float(self.sq), float(self.sech2),
                        float(self.constant))


ABAR_A = "AbarA"
A_ABAR = "AAbar"


def _potential_laurent(pair: LadderPair, order: str):
    coord = pair.F.coord
    g0, g2 = pair.F.g_coeffs
    G = {k: v for k, v in ((0, g0), (2, g2)) if v != 0}
    W, Om = pair.W.laurent(coord), pair.omega.laurent(coord)
    s = -1 if order == ABAR_A else 1
    return _ladd((1, _lmul(W, W)), (-1, _lmul(Om, Om)),
                 (s, _lmul(G, _lderiv(W))), (-1, _lmul(G, _lderiv(Om))))


def _channels(pair: LadderPair, V: dict) -> Channels:
    zero = Fraction(0)
    if isinstance(pair.F, QuadraticP):
        extra = set(V) - {-2, 0, 2}
        if extra:
            raise IncompatibleShape(f"potential has powers {sorted(extra)} outside the channels")
        return Channels(inv_sq=V.get(-2, zero), sq=V.get(2, zero), constant=V.get(0, zero))
    # sinh: polynomial in t = tanh y, and t^2 = 1 - sech^2
    extra = set(V) - {0, 2}
    if extra:
        raise IncompatibleShape(f"potential has t-powers {sorted(extra)} outside the channels")
    v0, v2 = V.get(0, zero), V.get(2, zero)
    return Channels(sech2=-v2, constant=v0 + v2)


@dataclass(frozen=True)
class SecondOrderOperator:
    """leading * (-(F d/dx)^2) + first_order(x) d/dx + V(x).

    ``omega`` fixes the first-order coefficient -2 F Omega (scaled by
    ``first_order_weight``); V is the channel sum plus an optional pointwise
    residual used by the general family.
    """

    F: DeformationProfile
    channels: Channels
    omega: SuperpotentialShape = field(default_factory=Zero)
    leading: float = 1.0
    first_order_weight: float = 1.0
    residual: Optional[Callable] = None
    order: Optional[str] = None

    def first_order(self, x):
        if self.first_order_weight == 0 or isinstance(self.omega, Zero):
            return np.zeros_like(np.asarray(x, dtype=float))
        return -2.0 * self.first_order_weight * self.F(x) * self.omega.value(x)

    @property
    def has_first_order(self) -> bool:
        return self.first_order_weight != 0 and not isinstance(self.omega, Zero)

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        ch = self.channels.as_float()
        out = np.full_like(x, ch.constant)
        if ch.inv_sq:
            out = out + ch.inv_sq / (x * x)
        if ch.sq:
            out = out + ch.sq * x * x
        if ch.sech2:
            out = out + ch.sech2 / np.cosh(x) ** 2
        if self.residual is not None:
            out = out + self.residual(x)
        return out

    def potential_u(self, u):
        """Potential in the algebraic coordinate u (p, or t = tanh y)."""
        if getattr(self.F, "coord", None) != "tanh":
            return self.potential(u)
        u = np.asarray(u, dtype=float)
        ch = self.channels.as_float()
        return ch.constant + ch.sech2 * (1.0 - u * u)

    def __sub__(self, other: "SecondOrderOperator") -> "SecondOrderOperator":
        if self.F != other.F or self.omega != other.omega:
            raise ValueError("operators must share profile and gauge term")
        res = None
        if self.residual is not None or other.residual is not None:
            r1 = self.residual or (lambda x: 0.0)
            r2 = other.residual or (lambda x: 0.0)
            res = lambda x: r1(x) - r2(x)  # noqa: E731
        return SecondOrderOperator(self.F, self.channels - other.channels, self.omega,
                                   self.leading - other.leading,
                                   self.first_order_weight - other.first_order_weight, res)


def compose(pair: LadderPair, order: str = ABAR_A, exact: bool = False) -> SecondOrderOperator:
    """Compose Abar A (``order="AbarA"``) or A Abar (``order="AAbar"``)."""
    if order not in (ABAR_A, A_ABAR):
        raise ValueError(f"order must be {ABAR_A!r} or {A_ABAR!r}")
    if pair.named:
        ch = _channels(pair, _potential_laurent(pair, order))
        if not exact:
            ch = ch.as_float()
        return SecondOrderOperator(pair.F, ch, pair.omega, order=order)

    s = -1.0 if order == ABAR_A else 1.0
    F, W, Om = pair.F, pair.W, pair.omega

    def residual(x):
        return (W.value(x) ** 2 - Om.value(x) ** 2
                + F(x) * (s * W.deriv(x) - Om.deriv(x)))

    return SecondOrderOperator(F, Channels(), Om, residual=residual, order=order)


# gauge factor ----------------------------------------------------------------

@dataclass(frozen=True)
class GaugeFactor:
    """S with S' = Omega / F; exp(-S) = u^rho G^sigma exp(-kappa u^2) when exact."""

    pair: LadderPair
    rho: Fraction = Fraction(0)
    sigma: Fraction = Fraction(0)
    kappa: Fraction = Fraction(0)
    exact: bool = True
    origin: float = 0.0

    @property
    def exponents(self):
        return (self.rho, self.sigma, self.kappa)

    @property
    def trivial(self) -> bool:
        return isinstance(self.pair.omega, Zero)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.trivial:
            return np.zeros_like(x)
        if self.exact:
            F = self.pair.F
            u = np.tanh(x) if F.coord == "tanh" else x
            g0, g2 = (float(v) for v in F.g_coeffs)
            G = g0 + g2 * u * u
            log_e = float(self.sigma) * np.log(G) - float(self.kappa) * u * u
            if self.rho != 0:
                log_e = log_e + float(self.rho) * np.log(np.abs(u))
            return -log_e
        ratio = lambda s: float(self.pair.omega.value(s) / self.pair.F(s))  # noqa: E731
        return np.array([integrate.quad(ratio, self.origin, xi, epsabs=1e-13, epsrel=1e-13)[0]
                         for xi in np.atleast_1d(x)]).reshape(x.shape)

    def d1(self, x):
        return self.pair.omega.value(x) / self.pair.F(x)

    def d2(self, x):
        F, Om = self.pair.F, self.pair.omega
        return (Om.deriv(x) * F(x) - Om.value(x) * F.deriv(x)) / F(x) ** 2


def gauge_factor(pair: LadderPair) -> GaugeFactor:
    """Antiderivative S of Omega/F, so that A_Omega = e^{-S} (F d/dx + W) e^{S}."""
    om = pair.omega
    if isinstance(om, Zero):
        return GaugeFactor(pair)
    if pair.named:
        coeffs = om.laurent(pair.F.coord)
        c, h = coeffs.get(1, Fraction(0)), coeffs.get(-1, Fraction(0))
        g0, g2 = pair.F.g_coeffs
        rho = -h / g0
        if g2 != 0:
            return GaugeFactor(pair, rho=rho, sigma=-c / (2 * g2) + h / (2 * g0))
        return GaugeFactor(pair, rho=rho, kappa=c / (2 * g0))
    lo, hi = pair.domain.lo, pair.domain.hi
    origin = 0.0 if lo < 0 < hi else (1.0 if math.isinf(hi) else 0.5 * (lo + hi))
    return GaugeFactor(pair, exact=False, origin=origin)


# ladder application ------------------------------------------------------------

def _check_rep_matches(pair: LadderPair, phi: ClosedForm):
    if not pair.named:
        raise IncompatibleShape("closed forms need a named family")
    g0, g2 = pair.F.g_coeffs
    if phi.coord != pair.F.coord or (phi.g0, phi.g2) != (g0, g2):
        raise IncompatibleShape("closed form built on a different deformation profile")


def apply_ladder(pair: LadderPair, which: str, phi):
    """Apply A (``which="A"``) or Abar (``which="Abar"``) to a wavefunction."""
    if which not in ("A", "Abar"):
        raise ValueError("which must be 'A' or 'Abar'")
    sign = 1 if which == "A" else -1
    if isinstance(phi, ClosedForm):
        _check_rep_matches(pair, phi)
        coord = pair.F.coord
        W, Om = pair.W.laurent(coord), pair.omega.laurent(coord)
        tot = _ladd((1, W), (sign, Om))
        return phi.ladder(sign, tot.get(1, 0), tot.get(-1, 0))
    if isinstance(phi, Sampled):
        if len(phi.x) < 16:
            raise ValueError("sampled wavefunction needs at least 16 grid points")
        f1 = np.gradient(phi.values, phi.x, edge_order=2)
        x = phi.x
        W = pair.W.value(x) + sign * pair.omega.value(x)
        values = sign * pair.F(x) * f1 + W * phi.values
        return Sampled(phi.x, values, phi.measure_weights, phi.q, dict(phi.meta))
    raise TypeError(f"unsupported wavefunction representation {type(phi).__name__}")


def evaluate(op: SecondOrderOperator, phi, points, margin: Optional[float] = None):
    """(op phi)(x) at the given points, with exact derivatives for closed forms."""
    x = np.asarray(points, dtype=float)
    dom = op.F.domain
    if margin is None:
        margin = 1e-6 * dom.scale
    singular = dom.kind == "half" and op.channels.inv_sq != 0
    if singular or (op.omega is not None and isinstance(op.omega, LinearPlusInverse)):
        if np.any(np.abs(x - dom.lo) <= margin):
            raise ValueError("evaluation at the singular endpoint p = 0")
    if np.any(x < dom.lo) or np.any(x > dom.hi):
        raise ValueError("evaluation point outside the domain")
    f, f1, f2 = phi.derivs(x)
    F, dF = op.F(x), op.F.deriv(x)
    out = op.first_order(x) * f1 + op.potential(x) * f
    if op.leading:
        out = out + op.leading * (-F * F * f2 - F * dF * f1)
    return out
