"""Physical minimal-length models mapped onto the ladder families.

Energies are measured in units where the momentum-space equations read
``(2E / hbar omega) R = P R`` with ``P`` the physical second-order operator;
each map finds family parameters and an offset with ``P = m H + offset``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .ladder import (ABAR_A, A_ABAR, HALF_LINE, Channels, Domain, GeneralProfile,
                     GeneralShape, LadderPair, LinearP, LinearPlusInverse, QuadraticP,
                     SecondOrderOperator, SinhSq, compose, evaluate)
from .reps import ClosedForm
from .shape import OneDim, Radial, Sinh, spectrum_by_iteration


@dataclass(frozen=True)
class PhysicalParams1D:
    mu: float
    omega: float
    hbar: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.mu > 0 and self.omega > 0 and self.hbar > 0):
            raise ValueError("mu, omega and hbar must be positive")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    @property
    def m(self) -> float:
        return self.mu * self.hbar * self.omega


@dataclass(frozen=True)
class PhysicalParamsRadial:
    mu: float
    omega: float
    hbar: float
    beta: float
    beta_prime: float
    D: int
    L2: float
    gamma: float = 0.0

    def __post_init__(self):
        PhysicalParams1D(self.mu, self.omega, self.hbar, self.beta, self.gamma)
        if self.beta_prime < 0:
            raise ValueError("beta_prime must be >= 0")
        if int(self.D) != self.D or self.D < 2:
            raise ValueError("D must be an integer >= 2")
        if self.L2 < 0:
            raise ValueError("L2 must be >= 0")

    @property
    def m(self) -> float:
        return self.mu * self.hbar * self.omega


@dataclass(frozen=True)
class SinhPotentialSpec:
    """H = -[(a + b sinh^2 y) d/dy]^2 - gamma_pot / cosh^2 y (a well of depth gamma_pot)."""

    a: float
    b: float
    gamma_pot: float

    def __post_init__(self):
        if not (self.a > 0 and self.b >= 0 and self.gamma_pot > 0):
            raise ValueError("need a > 0, b >= 0, gamma_pot > 0")


@dataclass(frozen=True)
class GeneralPairSpec:
    g: Callable
    dg: Callable
    alpha: float
    beta_gen: float
    d2g: Optional[Callable] = None
    name: str = ""


# helpers ---------------------------------------------------------------------

def scaled_operator(op: SecondOrderOperator, m: float, offset: float) -> SecondOrderOperator:
    """m * op + offset, keeping the channel form."""
    ch = op.channels.as_float()
    ch = Channels(m * ch.inv_sq, m * ch.sq, m * ch.sech2, m * ch.constant + offset)
    return SecondOrderOperator(op.F, ch, op.omega, leading=m * op.leading,
                               first_order_weight=m * op.first_order_weight, order=op.order)


def _test_functions(half_line: bool, rng, count=4):
    out = []
    for _ in range(count):
        coeffs = rng.uniform(-1, 1, size=4)
        if half_line:
            coeffs[0] = 0.0  # keep away from the origin
        out.append(ClosedForm.polynomial_gaussian(coeffs, kappa=rng.uniform(0.2, 0.6),
                                                  half_line=half_line))
    return out


def operator_match(op1: SecondOrderOperator, op2: SecondOrderOperator, points, seed=0,
                   n_functions=4) -> float:
    """max |op1 phi - op2 phi| / max |op2 phi| over random smooth test functions."""
    rng = np.random.default_rng(seed)
    half = op1.F.domain.kind == "half"
    worst = 0.0
    for phi in _test_functions(half, rng, n_functions):
        v1, v2 = evaluate(op1, phi, points), evaluate(op2, phi, points)
        worst = max(worst, float(np.max(np.abs(v1 - v2)) / np.max(np.abs(v2))))
    return worst


def sample_points(domain: Domain, n=1000, seed=0, span=4.0):
    rng = np.random.default_rng(seed)
    if domain.kind == "half":
        return np.sort(rng.uniform(0.05, span, n))
    lo = max(domain.lo, -span)
    hi = min(domain.hi, span)
    return np.sort(rng.uniform(lo, hi, n))


# one-dimensional oscillator -------------------------------------------------------

def oscillator_1d_operator(phys: PhysicalParams1D) -> SecondOrderOperator:
    """2H/(hbar omega) in momentum space, with x = i hbar [(1 + beta p^2) d/dp + gamma p].

    Expanding x^2 gives m [-(F d/dp)^2 - 2 gamma p F d/dp - gamma F - gamma^2 p^2]
    plus p^2 / m from the kinetic term.
    """
    m, b, g = phys.m, phys.beta, phys.gamma
    ch = Channels(sq=1.0 / m - m * g * (g + b), constant=-m * g)
    return SecondOrderOperator(QuadraticP(1.0, b), ch, LinearP(g), leading=m,
                               first_order_weight=m)


def deformed_oscillator_energy(phys: PhysicalParams1D, k: int) -> float:
    """Known closed form for the minimal-length oscillator levels."""
    mu, w, hb, be = phys.mu, phys.omega, phys.hbar, phys.beta
    return hb * w * (0.5 * mu * hb * w * be * (k * k + k + 0.5)
                     + (k + 0.5) * math.sqrt(1.0 + be * be * mu * mu * hb * hb * w * w / 4))


@dataclass(frozen=True)
class Mapping:
    family: object
    m: float
    energy_offset: float
    hbar_omega: float
    gauge: object = None
    diagnostics: dict = field(default_factory=dict)

    def lambdas(self, k_max: int) -> np.ndarray:
        return spectrum_by_iteration(self.family, k_max).values

    def energies(self, k_max: int) -> np.ndarray:
        """E_k = (hbar omega / 2)(m Lambda_k + offset), k = 0..k_max."""
        return 0.5 * self.hbar_omega * (self.m * self.lambdas(k_max) + self.energy_offset)

    def model_operator(self) -> SecondOrderOperator:
        """m H + offset for the mapped family (gauge term included)."""
        return scaled_operator(compose(self.family.pair(), ABAR_A), self.m, self.energy_offset)


def map_1d(phys: PhysicalParams1D) -> Mapping:
    m, b = phys.m, phys.beta
    c = 0.5 * (b + math.sqrt(b * b + 4.0 / (m * m)))
    fam = OneDim(1.0, b, c, c2=phys.gamma)
    P = oscillator_1d_operator(phys)
    H = compose(fam.pair(), ABAR_A).channels.as_float()
    # sq channels agree by the choice of c; the constant channel leaves the offset
    offset = P.channels.constant - m * H.constant
    return Mapping(fam, m, offset, phys.hbar * phys.omega, LinearP(phys.gamma),
                   {"sq_mismatch": P.channels.sq - m * H.sq})


# radial oscillator -------------------------------------------------------------

def radial_operator(phys: PhysicalParamsRadial) -> SecondOrderOperator:
    """The momentum-space radial equation as m[...] + p^2/m acting on R(p)."""
    m, be, bp, g, D, L2 = phys.m, phys.beta, phys.beta_prime, phys.gamma, phys.D, phys.L2
    F = QuadraticP(1.0, be + bp, HALF_LINE)
    # first-order part -m {(D-1)/p + [(D-1)beta + 2 gamma] p} F d/dp = -2 m F Omega d/dp
    om = LinearPlusInverse(((D - 1) * be + 2 * g) / 2, (D - 1) / 2)
    ch = Channels(inv_sq=m * L2,
                  sq=1.0 / m - m * (g * (be * D + bp + g) - be * be * L2),
                  constant=-m * (g * D - 2 * be * L2))
    return SecondOrderOperator(F, ch, om, leading=m, first_order_weight=m)


def _roots(lin, const):
    """Roots of u^2 - lin u - const = 0, ascending; None if complex."""
    disc = lin * lin + 4 * const
    if disc < 0:
        return None
    r = math.sqrt(disc)
    return ((lin - r) / 2, (lin + r) / 2)


def map_radial(phys: PhysicalParamsRadial) -> Mapping:
    """Six-parameter radial family matching the radial equation channel by channel.

    inv_sq: (g1 + g2)(g1 - g2 + a) = L^2, solved for u = g1 + g2.  Of the two
    roots the smaller makes R_0 ~ p^{-u/a} bounded at the origin (the regular
    solution); both roots are reported.
    sq: m^2 (c1 + c2)(c1 - c2 - b) = 1 - m^2 [gamma(beta D + beta' + gamma) - beta^2 L^2],
    solved for v = c1 + c2 > 0.
    """
    m = phys.m
    P = radial_operator(phys)
    a, b = 1.0, phys.beta + phys.beta_prime
    c2, g2 = P.omega.c, P.omega.g
    ch = P.channels
    inv_eq = f"(g1 + {g2!r})(g1 - {g2!r} + {a!r}) = {phys.L2!r}"
    sq_eq = f"(c1 + {c2!r})(c1 - {c2!r} - {b!r}) = {ch.sq / m!r}"
    u_roots = _roots(2 * g2 - a, phys.L2)
    v_roots = _roots(2 * c2 + b, ch.sq / m)
    if u_roots is None or v_roots is None or not v_roots[1] > 0:
        raise ValueError("no admissible root for the radial identification; matching "
                         f"equations: {inv_eq}; {sq_eq}; roots u={u_roots}, v={v_roots}")
    u, v = u_roots[0], v_roots[1]
    g1, c1 = u - g2, v - c2
    fam = Radial(a, b, c1, g1, c2, g2)
    H = compose(fam.pair(), ABAR_A).channels.as_float()
    offset = ch.constant - m * H.constant
    diag = {
        "inv_sq_equation": inv_eq,
        "sq_equation": sq_eq,
        "g1_roots": tuple(r - g2 for r in u_roots),
        "c1_roots": tuple(r - c2 for r in v_roots),
        "g1_selected": g1,
        "c1_selected": c1,
        "inv_sq_mismatch": ch.inv_sq - m * H.inv_sq,
        "sq_mismatch": ch.sq - m * H.sq,
    }
    return Mapping(fam, m, offset, phys.hbar * phys.omega, P.omega, diag)


def radial_operator_residual(phys: PhysicalParamsRadial, n_points=1000, seed=0) -> float:
    """Pointwise relative mismatch between m H + offset and the radial equation."""
    mp = map_radial(phys)
    P = radial_operator(phys)
    pts = sample_points(P.F.domain, n_points, seed)
    return operator_match(mp.model_operator(), P, pts, seed)


def oscillator_1d_residual(phys: PhysicalParams1D, n_points=1000, seed=0) -> float:
    mp = map_1d(phys)
    P = oscillator_1d_operator(phys)
    pts = sample_points(P.F.domain, n_points, seed)
    return operator_match(mp.model_operator(), P, pts, seed)


# sinh well ---------------------------------------------------------------------

@dataclass(frozen=True)
class SinhMapping:
    family: Sinh
    energy_offset: float

    def energies(self, k_max: int) -> np.ndarray:
        return spectrum_by_iteration(self.family, k_max).values + self.energy_offset


def sinh_potential_operator(spec: SinhPotentialSpec) -> SecondOrderOperator:
    return SecondOrderOperator(SinhSq(spec.a, spec.b), Channels(sech2=-spec.gamma_pot))


def sinh_from_potential(spec: SinhPotentialSpec) -> SinhMapping:
    """g from g(g + a - b) = gamma_pot (positive root); H = H_family(g) - g(g - b)."""
    a, b = spec.a, spec.b
    g = 0.5 * ((b - a) + math.sqrt((b - a) ** 2 + 4 * spec.gamma_pot))
    return SinhMapping(Sinh(a, b, g), -g * (g - b))


# general pair ---------------------------------------------------------------

@dataclass(frozen=True)
class GeneralPairReport:
    pair: LadderPair
    max_residual: float
    n_points: int
    min_F: float

    @property
    def passed(self) -> bool:
        return self.max_residual < 1e-10


def _commutator(pair: LadderPair, phi, x):
    """(A Abar - Abar A) phi applied factor by factor from phi, phi', phi''."""
    F, W = pair.F, pair.W
    f, f1, f2 = phi.derivs(x)
    Fx, dF = F(x), F.deriv(x)
    w, dw = W.value(x), W.deriv(x)
    abar = -Fx * f1 + w * f
    abar1 = -dF * f1 - Fx * f2 + dw * f + w * f1
    a_op = Fx * f1 + w * f
    a1 = dF * f1 + Fx * f2 + dw * f + w * f1
    return (Fx * abar1 + w * abar) - (-Fx * a1 + w * a_op)


def build_general_pair(spec: GeneralPairSpec, domain: Domain = Domain(-4.0, 4.0, "finite"),
                       n_points=1000, seed=0) -> GeneralPairReport:
    """Pair with F = 1 + (alpha g^2 + beta_gen)/g' and W = g, plus its identity check.

    The check applies A Abar - Abar A to random smooth functions and compares
    with 2(g' + alpha g^2 + beta_gen) times the function.
    """
    al, bg = spec.alpha, spec.beta_gen
    g, dg = spec.g, spec.dg
    pts = sample_points(domain, n_points, seed)
    if np.any(dg(pts) == 0):
        raise ValueError("g' vanishes on the domain")

    def f(y):
        return (al * g(y) ** 2 + bg) / dg(y)

    df = None
    if spec.d2g is not None:
        def df(y):
            gy, d1, d2 = g(y), dg(y), spec.d2g(y)
            return (2 * al * gy * d1 * d1 - (al * gy * gy + bg) * d2) / (d1 * d1)

    F = GeneralProfile(f, df, domain)
    dense = np.linspace(domain.lo, domain.hi, 10 * n_points) if math.isfinite(domain.scale) else pts
    min_F = float(np.min(F(dense)))
    if not min_F > 0:
        raise ValueError(f"1 + f <= 0 on the domain (min {min_F:.3g})")
    pair = LadderPair(F, GeneralShape(g, dg))
    rng = np.random.default_rng(seed)
    target = lambda y: 2 * (dg(y) + al * g(y) ** 2 + bg)  # noqa: E731
    worst = 0.0
    for phi in _test_functions(False, rng):
        lhs = _commutator(pair, phi, pts)
        rhs = target(pts) * phi(pts)
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))))
    # the composed operators must say the same
    diff = compose(pair, A_ABAR).residual(pts) - compose(pair, ABAR_A).residual(pts)
    worst = max(worst, float(np.max(np.abs(diff - target(pts))) / np.max(np.abs(target(pts)))))
    return GeneralPairReport(pair, worst, len(pts), min_F)


# registry of g functions for configs
G_REGISTRY = {
    "tanh": lambda c=1.0: (lambda y: c * np.tanh(y), lambda y: c / np.cosh(y) ** 2,
                           lambda y: -2 * c * np.tanh(y) / np.cosh(y) ** 2),
    "linear": lambda c=1.0: (lambda y: c * y, lambda y: np.full_like(y, c),
                             lambda y: np.zeros_like(y)),
    "sinh": lambda c=1.0: (lambda y: c * np.sinh(y), lambda y: c * np.cosh(y),
                           lambda y: c * np.sinh(y)),
    "cubic": lambda c=1.0: (lambda y: c * (y + y ** 3 / 3), lambda y: c * (1 + y * y),
                            lambda y: 2 * c * y),
}


def general_spec(kind: str, alpha: float, beta_gen: float, c: float = 1.0) -> GeneralPairSpec:
    if kind not in G_REGISTRY:
        raise ValueError(f"unknown g {kind!r}; choose from {sorted(G_REGISTRY)}")
    g, dg, d2g = G_REGISTRY[kind](c)
    return GeneralPairSpec(g, dg, alpha, beta_gen, d2g, name=kind)
