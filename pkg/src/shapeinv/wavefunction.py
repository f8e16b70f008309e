"""Exact eigenfunctions by ladder recursion, norms, moments and uncertainty.

Inner products use the measure dx/F (dp/F for the quadratic families, which
is dt/G in t = tanh y for the sinh family).  States built with a gauge term
carry the factor exp(-S); the covariant convention divides it out, i.e. it
integrates against exp(2S) dx/F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .ladder import (ABAR_A, FULL_LINE, HALF_LINE, QuadraticP, SinhSq, apply_ladder, compose,
                     evaluate, gauge_factor)
from .oracle import liouville_map
from .reps import (ClosedForm, Sampled, as_fraction, poly_add, poly_eval, poly_mul, poly_scale,
                   poly_shift)
from .shape import (UNBOUNDED, Sinh, bound_state_count, closed_form_value, derive_shape_rule,
                    exact_params)

_DPS = 40

WEIGHTED = "weighted"
COVARIANT = "covariant"


def _mpf(x):
    x = as_fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


# construction ---------------------------------------------------------------

def _annihilated(c, h, g0, g2):
    """Exponents (rho, sigma, kappa) of the solution of (G d/du + c u + h/u) phi = 0."""
    rho = -h / g0
    if g2 != 0:
        return rho, -c / (2 * g2) + h / (2 * g0), Fraction(0)
    return rho, Fraction(0), c / (2 * g0)


def ground_state(family) -> ClosedForm:
    """Closed-form solution of A phi = 0 (gauge factor exp(-S) included)."""
    fam = exact_params(family.validate())
    pair = fam.pair()
    F = pair.F
    g0, g2 = (as_fraction(v) for v in F.g_coeffs)
    W, Om = pair.W.laurent(F.coord), pair.omega.laurent(F.coord)
    c = as_fraction(W.get(1, 0) + Om.get(1, 0))
    h = as_fraction(W.get(-1, 0) + Om.get(-1, 0))
    rho, sigma, kappa = _annihilated(c, h, g0, g2)
    gauge = None
    if Om:
        gauge = tuple(as_fraction(v) for v in gauge_factor(pair).exponents)
    return ClosedForm(poly=(1,), g0=g0, g2=g2, sigma=sigma, rho=rho, kappa=kappa,
                      coord=F.coord, half_line=F.domain.kind == "half", gauge=gauge)


def excited_state(family, k: int, cache: Optional[dict] = None) -> ClosedForm:
    """phi_k(params) = Abar(params) phi_{k-1}(map(params)), in exact arithmetic.

    ``cache`` (optional, owned by the caller) memoizes states keyed by
    (params, k).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    fam = exact_params(family.validate())
    if isinstance(fam, Sinh):
        count = bound_state_count(fam)
        if count is not UNBOUNDED and k >= count:
            raise ValueError(f"sinh tower has {count} bound states; k={k} is beyond it")
    key = (fam, k)
    if cache is not None and key in cache:
        return cache[key]
    if k == 0:
        out = ground_state(fam)
    else:
        rule = derive_shape_rule(fam)
        params = [fam]
        for _ in range(k):
            params.append(rule.apply(params[-1]))
        out = ground_state(params[-1])
        for p in reversed(params[:-1]):
            out = apply_ladder(p.pair(), "Abar", out)
    if cache is not None:
        cache[key] = out
    return out


def eigenvalue(family, k: int) -> float:
    return float(closed_form_value(family, k))


# exact integrals -------------------------------------------------------------

def _domain_integral(poly, rho, tau, kappa, coord, g0, g2, half_line):
    """int u^rho P(u) G(u)^tau exp(-kappa u^2) du over the u-domain, as an mpf.

    Rational-power cases reduce to Beta and Gamma functions; the rest goes to
    adaptive quadrature at the working precision.
    """
    with mpmath.workdps(_DPS):
        G0, G2, K, T, R = _mpf(g0), _mpf(g2), _mpf(kappa), _mpf(tau), _mpf(rho)
        terms = [(j, _mpf(cj)) for j, cj in enumerate(poly) if cj != 0]
        total = mpmath.mpf(0)
        if coord == "p" and kappa == 0 and g2 > 0:
            for j, cj in terms:
                s = R + j
                if not half_line and int(s) % 2:
                    continue
                x, y = (s + 1) / 2, -T - (s + 1) / 2
                if x <= 0 or y <= 0:
                    raise ValueError("integral diverges (not normalizable)")
                val = G0 ** (T + x) * G2 ** (-x) * mpmath.beta(x, y) / 2
                total += cj * (val if half_line else 2 * val)
            return total
        if coord == "p" and g2 == 0 and kappa > 0:
            for j, cj in terms:
                s = R + j
                if not half_line and int(s) % 2:
                    continue
                x = (s + 1) / 2
                if x <= 0:
                    raise ValueError("integral diverges (not normalizable)")
                val = G0 ** T * mpmath.gamma(x) * K ** (-x) / 2
                total += cj * (val if half_line else 2 * val)
            return total
        if coord == "tanh" and kappa == 0 and g0 + g2 == 0:
            for j, cj in terms:
                s = int(R) + j
                if s % 2:
                    continue
                if not T > -1:
                    raise ValueError("integral diverges (not normalizable)")
                total += cj * G0 ** T * mpmath.beta(mpmath.mpf(s + 1) / 2, T + 1)
            return total
        if coord == "p" and (kappa < 0 or (kappa == 0 and g2 == 0)):
            raise ValueError("integral diverges (not normalizable)")

        def f(u):
            val = mpmath.polyval([c for _, c in reversed(list(enumerate(
                _mpf(c) for c in poly)))], u) if poly else 0
            return val * u ** R * (G0 + G2 * u * u) ** T * mpmath.exp(-K * u * u)

        if coord == "tanh":
            return mpmath.quad(f, [-1, 0, 1])
        if half_line:
            return mpmath.quad(f, [0, 1, mpmath.inf])
        return mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf])


def _strip(phi: ClosedForm, convention: str) -> ClosedForm:
    if convention == COVARIANT:
        return phi.without_gauge()
    if convention != WEIGHTED:
        raise ValueError(f"unknown normalization convention {convention!r}")
    return phi


def inner_product(phi: ClosedForm, psi: ClosedForm, convention: str = WEIGHTED) -> float:
    """<phi, psi> under dx/F (or exp(2S) dx/F for the covariant convention)."""
    if isinstance(phi, Sampled) or isinstance(psi, Sampled):
        return _sampled_inner(phi, psi)
    phi, psi = _strip(phi, convention), _strip(psi, convention)
    if (phi.g0, phi.g2, phi.coord, phi.half_line) != (psi.g0, psi.g2, psi.coord, psi.half_line):
        raise ValueError("states live on different profiles")
    if phi.is_zero or psi.is_zero:
        return 0.0
    poly = poly_mul(phi.poly, psi.poly)
    val = _domain_integral(poly, phi.rho + psi.rho, phi.sigma + psi.sigma - 1,
                           phi.kappa + psi.kappa, phi.coord, phi.g0, phi.g2, phi.half_line)
    return float(val) * phi.scale * psi.scale


def norm(phi, convention: str = WEIGHTED) -> float:
    return math.sqrt(inner_product(phi, phi, convention))


def _sampled_inner(phi, psi):
    if not (isinstance(phi, Sampled) and isinstance(psi, Sampled)):
        raise TypeError("cannot mix sampled and closed-form states")
    if len(phi.x) != len(psi.x) or np.any(phi.x != psi.x):
        raise ValueError("sampled states must share a grid")
    return float(np.sum(phi.values * psi.values * phi.measure_weights))


def normalizability(phi: ClosedForm) -> dict:
    """Finite-norm verdicts under the weighted, flat and covariant conventions."""
    return {"weighted": phi.normalizable, "flat": phi.normalizable_flat,
            "covariant": phi.without_gauge().normalizable}


def normalize(phi, convention: str = WEIGHTED):
    """Rescale to unit norm; the norm is exact up to the 40-digit working precision."""
    if isinstance(phi, Sampled):
        n = math.sqrt(_sampled_inner(phi, phi))
        return replace(phi, values=phi.values / n)
    verdict = normalizability(phi)
    key = "covariant" if convention == COVARIANT else "weighted"
    if not verdict[key]:
        raise ValueError(f"state is not normalizable under the {key} measure")
    return phi.scaled(1.0 / norm(phi, convention))


# diagnostics -----------------------------------------------------------------

def annihilation_residual(family) -> float:
    """||A phi_0|| / ||phi_0|| (exact: A acts on the closed form symbolically)."""
    phi = ground_state(family)
    out = apply_ladder(exact_params(family).pair(), "A", phi)
    if out.is_zero:
        return 0.0
    return norm(out, COVARIANT) / norm(phi, COVARIANT)


def _align(f: ClosedForm, g: ClosedForm):
    """Rewrite f and g over the same origin power (differences must be integers)."""
    if (f.sigma, f.kappa) != (g.sigma, g.kappa):
        raise ValueError("forms differ in weight exponents")
    d = f.rho - g.rho
    if d.denominator != 1:
        raise ValueError("origin powers differ by a non-integer")
    d = int(d)
    if d >= 0:
        return poly_shift(f.poly, d), g.poly, g.rho
    return f.poly, poly_shift(g.poly, -d), f.rho


def eigen_residual(family, k: int, points=None) -> dict:
    """(H - Lambda_k) phi_k, exactly and pointwise in floating point.

    ``exact`` is ||(H - Lambda_k) phi_k|| / ||Lambda_k phi_k|| from the
    symbolic Abar(A phi); ``pointwise`` evaluates the composed operator on
    ``points`` in double precision and divides by max |Lambda_k phi_k|.
    """
    fam = exact_params(family)
    phi = excited_state(fam, k)
    lam = closed_form_value(fam, k)
    pair = fam.pair()
    hphi = apply_ladder(pair, "Abar", apply_ladder(pair, "A", phi))
    scale = abs(float(lam)) if lam != 0 else 1.0
    if hphi.is_zero:
        diff_poly, rho = (() if lam == 0 else poly_scale(phi.poly, -as_fraction(lam))), phi.rho
    else:
        a, b, rho = _align(hphi, phi)
        diff_poly = poly_add(a, poly_scale(b, -as_fraction(lam)))
    diff = replace(phi, poly=diff_poly, rho=rho)
    exact = 0.0 if diff.is_zero else norm(diff, COVARIANT) / (scale * norm(phi, COVARIANT))
    if points is None:
        points = _default_points(phi)
    op = compose(pair, ABAR_A)
    hv = evaluate(op, phi, points)
    pv = phi(points)
    pointwise = float(np.max(np.abs(hv - float(lam) * pv)) / (scale * np.max(np.abs(pv))))
    return {"k": k, "eigenvalue": float(lam), "exact": exact, "pointwise": pointwise}


def _default_points(phi: ClosedForm, n=1000):
    if phi.coord == "tanh":
        return np.linspace(-4, 4, n)
    if phi.half_line:
        return np.linspace(0.05, 4, n)
    return np.linspace(-4, 4, n)


def sign_grid(phi: ClosedForm, n: int = 10_000):
    """Coordinate grid spanning the state's support (q-uniform) for sign counting."""
    return liouville_map(_profile_of(phi), n).x


def _profile_of(phi: ClosedForm):
    if phi.coord == "tanh":
        return SinhSq(phi.g0, phi.g2 + phi.g0)
    return QuadraticP(phi.g0, phi.g2, HALF_LINE if phi.half_line else FULL_LINE)


def node_count(phi, n: int = 10_000) -> int:
    """Interior sign changes on an n-point grid (positive weights are skipped)."""
    if isinstance(phi, Sampled):
        v = phi.values
    else:
        x = sign_grid(phi, n)
        u = phi.to_u(x)
        v = poly_eval(phi.poly, u)
        if not phi.half_line and int(phi.rho) % 2:
            v = v * np.sign(u)
    s = np.sign(v)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


# moments and uncertainty -----------------------------------------------------------

@dataclass(frozen=True)
class Moments:
    p_mean: float
    p2: float
    x_mean: float
    x2: float
    dx: float
    dp: float

    @property
    def product(self) -> float:
        return self.dx * self.dp


def moments(phi, phys) -> Moments:
    """<p>, <p^2>, <x>, <x^2> with x = i hbar [(1 + beta p^2) d/dp + gamma p].

    ``phi`` must be normalized under the covariant convention.  x is applied
    to the full state (gauge factor included) and the result is integrated
    against exp(2S) dp/F, so any dependence on gamma would show up here.
    """
    if isinstance(phi, Sampled):
        return _sampled_moments(phi, phys)
    if phi.coord != "p" or phi.half_line:
        raise ValueError("moments need a one-dimensional full-line state")
    if abs(phi.g0 - 1) > 0 or abs(float(phi.g2) - phys.beta) > 1e-15 * max(1.0, phys.beta):
        raise ValueError("state was not built on F = 1 + beta p^2")
    n2 = inner_product(phi, phi, COVARIANT)
    if abs(n2 - 1) > 1e-9:
        raise ValueError("moments need a normalized state")
    hb = phys.hbar
    p1 = replace(phi, poly=poly_shift(phi.poly, 1))
    p_mean = inner_product(phi, p1, COVARIANT)
    p2 = inner_product(p1, p1, COVARIANT)
    # x phi = i hbar chi with chi = F phi' + gamma p phi
    chi = phi.ladder(1, as_fraction(phys.gamma), 0)
    x2 = hb * hb * inner_product(chi, chi, COVARIANT) if not chi.is_zero else 0.0
    # <phi, x phi> = i hbar <phi, chi>; its real part vanishes for real phi and
    # <phi, chi> itself is zero by the boundary behaviour
    x_imag = hb * inner_product(phi, chi, COVARIANT) if not chi.is_zero else 0.0
    if abs(x_imag) > 1e-9 * max(1.0, math.sqrt(x2)):
        raise ValueError("position operator is not symmetric on this state")
    x_mean = 0.0
    return Moments(p_mean, p2, x_mean, x2, math.sqrt(max(x2 - x_mean ** 2, 0.0)),
                   math.sqrt(max(p2 - p_mean ** 2, 0.0)))


def _sampled_moments(phi: Sampled, phys) -> Moments:
    """Moments of samples on a p-grid with weights for dp/F (gamma = 0 part only)."""
    p, v, w = phi.x, phi.values, phi.measure_weights
    F = 1.0 + phys.beta * p * p
    n2 = float(np.sum(v * v * w))
    dv = np.gradient(v, p, edge_order=2)
    p_mean = float(np.sum(p * v * v * w)) / n2
    p2 = float(np.sum(p * p * v * v * w)) / n2
    x2 = phys.hbar ** 2 * float(np.sum((F * dv) ** 2 * w)) / n2
    return Moments(p_mean, p2, 0.0, x2, math.sqrt(x2), math.sqrt(max(p2 - p_mean ** 2, 0.0)))


@dataclass(frozen=True)
class UncertaintyCheck:
    lhs: float
    rhs: float
    minimal_length: float
    passed: bool


def check_uncertainty(m: Moments, beta: float, hbar: float, slack: float = 1e-9
                      ) -> UncertaintyCheck:
    """dx >= (hbar/2)(1/dp + beta dp) and dx >= hbar sqrt(beta)."""
    if m.dp == 0:
        raise ValueError("dp = 0: degenerate state")
    rhs = 0.5 * hbar * (1.0 / m.dp + beta * m.dp)
    lmin = hbar * math.sqrt(beta)
    ok = m.dx >= rhs - slack and m.dx >= lmin - slack
    return UncertaintyCheck(m.dx, rhs, lmin, bool(ok))


# sampling ----------------------------------------------------------------------

def sample(phi: ClosedForm, n: int = 2001, convention: str = WEIGHTED) -> Sampled:
    """Samples on a q-uniform grid; measure weights are h (dq = dx/F)."""
    grid = liouville_map(_profile_of(phi), n)
    vals = phi(grid.x)
    if convention == COVARIANT and phi.gauge is not None:
        vals = phi.without_gauge()(grid.x)
    weights = np.full(n, grid.h)
    return Sampled(grid.x, vals, weights, grid.q, {"convention": convention})
