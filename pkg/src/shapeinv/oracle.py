"""Finite-difference check of the algebraic spectra.

Each operator -L (F d/dx)^2 + V is sent to -L d^2/dq^2 + V by the Liouville
coordinate q = int dx/F, discretized with second-order central differences
and Dirichlet walls, and solved with the Sturm multisection in ``tridiag``.
A companion solve on a grid of half the density gives a Richardson estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ladder import (ABAR_A, Channels, GeneralProfile, LadderPair, QuadraticP,
                     SecondOrderOperator, SinhSq, Zero, compose, gauge_factor)
from .shape import UNBOUNDED, Sinh, SpectrumTable, bound_state_count
from .tridiag import lowest_eigenvalues

DEFAULT_N = 4001


# Liouville coordinate ----------------------------------------------------------

def _quad_q(a, b, p):
    if b == 0:
        return p / a
    k = math.sqrt(a * b)
    return np.arctan(p * math.sqrt(b / a)) / k


def _quad_p(a, b, q):
    if b == 0:
        return a * q
    k = math.sqrt(a * b)
    return math.sqrt(a / b) * np.tan(k * q)


def _tanh_q(a, b, t):
    """int_0^t ds / (a + (b - a) s^2), the Liouville coordinate in t = tanh y."""
    d = b - a
    if d == 0:
        return t / a
    if d > 0:
        return np.arctan(t * math.sqrt(d / a)) / math.sqrt(a * d)
    return np.arctanh(t * math.sqrt(-d / a)) / math.sqrt(-a * d)


def _tanh_t(a, b, q):
    d = b - a
    if d == 0:
        return a * q
    if d > 0:
        return math.sqrt(a / d) * np.tan(math.sqrt(a * d) * q)
    return math.sqrt(a / -d) * np.tanh(math.sqrt(-a * d) * q)


@dataclass(frozen=True)
class LiouvilleGrid:
    """Uniform interior grid in q with its preimage in the model coordinate.

    ``x`` holds p for the quadratic profiles and y for the sinh profile; ``u``
    is the algebraic coordinate (p, or t = tanh y) the potential is built in.
    """

    q_min: float
    q_max: float
    N: int
    q: np.ndarray
    x: np.ndarray
    u: np.ndarray
    boundary_margin: float
    truncated: bool
    profile: object = field(repr=False, compare=False)
    continued: bool = False

    @property
    def h(self) -> float:
        return (self.q_max - self.q_min) / (self.N + 1)

    def refined(self, N: int) -> "LiouvilleGrid":
        """Same interval, different interior point count."""
        return _build_grid(self.profile, self.q_min, self.q_max, N, self.truncated,
                           self.continued)

    def check_map(self, tol=1e-10) -> float:
        """max |dq/dx * F(x) - 1| at the grid points.

        dq/dx comes from a complex-step derivative of the forward map, which
        has no subtractive cancellation.
        """
        F = self.profile
        if self.continued:
            raise ValueError("the continued sinh grid has no real y preimage past |t| = 1")
        x = self.x
        step = 1e-30
        dqdx = np.imag(_forward(F, x + 1j * step)) / step
        err = float(np.max(np.abs(dqdx * F(x) - 1.0)))
        if err > tol:
            raise AssertionError(f"Liouville map check failed: {err:.3g}")
        return err


def _forward(F, x):
    a, b = float(F.a), float(F.b)
    if isinstance(F, QuadraticP):
        return _quad_q(a, b, x)
    if b == 0:
        return x / a  # F = a; avoids arctanh(tanh y) near |t| = 1
    return _tanh_q(a, b, np.tanh(x))


def _build_grid(F, q_lo, q_hi, N, truncated, continued=False):
    if N < 64:
        raise ValueError("the oracle grid needs N >= 64 interior points")
    q = q_lo + (q_hi - q_lo) * np.arange(1, N + 1) / (N + 1)
    a, b = float(F.a), float(F.b)
    if isinstance(F, QuadraticP):
        x = _quad_p(a, b, q)
        u = x
    else:
        u = _tanh_t(a, b, q)
        if continued:
            x = np.full_like(u, np.nan)
        elif b == 0:
            x = a * q
        else:
            x = np.arctanh(u)
    margin = (q_hi - q_lo) / (N + 1)
    return LiouvilleGrid(q_lo, q_hi, N, q, x, u, margin, truncated, F, continued)


def default_x_max(stiffness: float = 0.0) -> float:
    """Truncation radius for infinite q-ranges: max(12, 8 s^{-1/4})."""
    if stiffness > 0:
        return max(12.0, 8.0 * stiffness ** -0.25)
    return 12.0


def liouville_map(F, N: int = DEFAULT_N, x_max: Optional[float] = None,
                  continued: bool = False) -> LiouvilleGrid:
    """Grid in q = int dx/F for a quadratic or sinh deformation profile.

    Finite q-ranges are used whole, unless the range is more than twice the
    q-extent of ``x_max`` (then the tail is negligible and is cut off).
    ``continued`` (sinh with b < a only) extends t past +-1 to the zero of
    a + (b - a) t^2, a diagnostic domain on which the algebraic states form
    a complete tower.
    """
    if isinstance(F, GeneralProfile):
        raise ValueError("the general profile has no closed Liouville map")
    a, b = float(F.a), float(F.b)
    if x_max is None:
        x_max = default_x_max()
    if isinstance(F, QuadraticP):
        half = F.domain.kind == "half"
        q_inf = math.inf if b == 0 else math.pi / (2 * math.sqrt(a * b))
        q_cut = float(_quad_q(a, b, x_max))
        truncated = q_inf > 2 * q_cut
        q_hi = q_cut if truncated else q_inf
        return _build_grid(F, 0.0 if half else -q_hi, q_hi, N, truncated)
    if continued:
        if not b < a:
            raise ValueError("the continued sinh domain needs b < a")
        t_end = math.sqrt(a / (a - b))
        # q diverges logarithmically at t_end; cut where the ground state is negligible
        q_hi = float(_tanh_q(a, b, t_end * (1 - 1e-12)))
        return _build_grid(F, -q_hi, q_hi, N, True, continued=True)
    q_inf = float(_tanh_q(a, b, 1.0)) if b > 0 else math.inf
    q_cut = float(_tanh_q(a, b, math.tanh(x_max)))
    truncated = q_inf > 2 * q_cut
    q_hi = q_cut if truncated else q_inf
    return _build_grid(F, -q_hi, q_hi, N, truncated)


# discretization --------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteOperator:
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    grid: LiouvilleGrid = field(repr=False)
    leading: float = 1.0
    potential: Optional[np.ndarray] = field(default=None, repr=False)


def gauge_reduced(op: SecondOrderOperator) -> SecondOrderOperator:
    """Remove the first-order term by conjugating with exp(S), S' = Omega/F.

    For op = L(-(F d/dx)^2) - 2 L F Omega d/dx + V, the conjugate
    exp(S) op exp(-S) is L(-(F d/dx)^2) + V + L (Omega^2 + F Omega').
    """
    if not op.has_first_order:
        return op
    if op.first_order_weight != op.leading:
        raise ValueError("first-order weight must equal the leading weight")
    S = gauge_factor(LadderPair(op.F, Zero(), op.omega))
    F, L = op.F, op.leading
    base = op.potential

    def reduced(x):
        s1, s2 = S.d1(x), S.d2(x)
        Fx = F(x)
        om = Fx * s1
        dom = F.deriv(x) * s1 + Fx * s2
        return base(x) + L * (om * om + Fx * dom)

    # channels are folded into the pointwise residual
    return SecondOrderOperator(F, Channels(), Zero(), leading=L, first_order_weight=0.0,
                               residual=reduced, order=op.order)


def _potential_on(op: SecondOrderOperator, grid: LiouvilleGrid) -> np.ndarray:
    if isinstance(op.F, SinhSq):
        if op.residual is not None:
            raise ValueError("sinh operators must be in channel form")
        return op.potential_u(grid.u)
    return op.potential(grid.x)


def to_normal_form(op: SecondOrderOperator, grid: LiouvilleGrid) -> DiscreteOperator:
    """-L d^2/dq^2 + V(x(q)) with Dirichlet walls, as a symmetric tridiagonal."""
    if op.has_first_order:
        raise ValueError("operator has a first-order term; gauge-transform it first "
                         "(oracle.gauge_reduced) so the discretization stays symmetric")
    if op.F != grid.profile:
        raise ValueError("grid was built for a different deformation profile")
    L = float(op.leading)
    h = grid.h
    V = _potential_on(op, grid)
    if not np.all(np.isfinite(V)):
        raise ValueError("potential is not finite on the grid")
    diag = 2.0 * L / (h * h) + V
    off = np.full(grid.N - 1, -L / (h * h))
    return DiscreteOperator(diag, off, grid, L, V)


# eigenvalues -----------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    """Richardson-extrapolated eigenvalues with the raw fine-grid values."""

    eigenvalues: tuple
    raw: tuple
    companion: tuple
    errors: tuple
    N: int
    N_companion: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _solve(D: DiscreteOperator, n):
    return lowest_eigenvalues(D.diagonal, D.off_diagonal, n)


def eigenvalues_numeric(D: DiscreteOperator, n_lowest: int, op: SecondOrderOperator
                        ) -> OracleResult:
    """Lowest eigenvalues plus a Richardson estimate from a half-density grid.

    ``op`` is the operator ``D`` was built from; the companion grid is
    discretized from it again.
    """
    N = D.grid.N
    if n_lowest < 1 or n_lowest > N // 4:
        raise ValueError(f"n_lowest must be in [1, N/4] = [1, {N // 4}] for N = {N}")
    fine = _solve(D, n_lowest)
    M = (N + 1) // 2
    coarse_grid = D.grid.refined(M)
    coarse = _solve(to_normal_form(op, coarse_grid), n_lowest)
    r = (N + 1) / (M + 1)  # h_coarse / h_fine
    extra = fine + (fine - coarse) / (r * r - 1)
    return OracleResult(tuple(float(v) for v in extra), tuple(float(v) for v in fine),
                        tuple(float(v) for v in coarse),
                        tuple(float(v) for v in np.abs(extra - fine)), N, M)


def solve(op: SecondOrderOperator, n_lowest: int, N: int = DEFAULT_N,
          x_max: Optional[float] = None, continued: bool = False) -> OracleResult:
    """Liouville map, gauge reduction if needed, discretization and eigensolve."""
    if x_max is None and isinstance(op.F, QuadraticP):
        x_max = default_x_max(float(op.channels.as_float().sq) / float(op.leading))
    op = gauge_reduced(op)
    grid = liouville_map(op.F, N, x_max=x_max, continued=continued)
    return eigenvalues_numeric(to_normal_form(op, grid), n_lowest, op)


def family_operator(family) -> SecondOrderOperator:
    """Abar A of a named family (gauge term included when present)."""
    return compose(family.pair(), ABAR_A)


def solve_family(family, n_lowest: int, N: int = DEFAULT_N, **kw) -> OracleResult:
    return solve(family_operator(family), n_lowest, N, **kw)


def raw_levels(op: SecondOrderOperator, n_lowest: int, N: int,
               x_max: Optional[float] = None, continued: bool = False) -> np.ndarray:
    """Fine-grid eigenvalues only (no Richardson), for convergence studies."""
    if x_max is None and isinstance(op.F, QuadraticP):
        x_max = default_x_max(float(op.channels.as_float().sq) / float(op.leading))
    op = gauge_reduced(op)
    grid = liouville_map(op.F, N, x_max=x_max, continued=continued)
    return _solve(to_normal_form(op, grid), n_lowest)


def convergence_ratios(op: SecondOrderOperator, exact: Sequence[float], N: int = 1000,
                       **kw) -> np.ndarray:
    """err(N) / err(2N + 1) per level; 2N + 1 interior points halve h exactly."""
    exact = np.asarray(exact, dtype=float)
    n = len(exact)
    e1 = raw_levels(op, n, N, **kw) - exact
    e2 = raw_levels(op, n, 2 * N + 1, **kw) - exact
    return e1 / e2


# comparison ------------------------------------------------------------------

@dataclass(frozen=True)
class LevelCheck:
    k: int
    analytic: float
    numeric: float
    rel_error: float
    passed: bool


@dataclass(frozen=True)
class Comparison:
    levels: tuple
    tol: float
    passed: bool
    worst: Optional[int]
    max_error: float
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def compare(analytic, numeric, tol: float, levels: Optional[int] = None) -> Comparison:
    """Per-level relative errors of numeric against analytic values.

    Relative error uses |analytic_k|, or the largest |analytic| in the
    compared range when analytic_k is zero.  For sinh tables the comparison
    stops at the last algebraic bound state.
    """
    a_vals = list(analytic.values) if isinstance(analytic, SpectrumTable) else list(analytic)
    n_vals = list(numeric.eigenvalues) if isinstance(numeric, OracleResult) else list(numeric)
    avail = min(len(a_vals), len(n_vals))
    n = avail if levels is None else levels
    note = ""
    if isinstance(analytic, SpectrumTable) and isinstance(analytic.family, Sinh):
        count = bound_state_count(analytic.family)
        if count is not UNBOUNDED and count < n:
            n, note = int(count), f"restricted to {count} bound states"
    if n > avail:
        raise ValueError(f"requested {n} levels but only {avail} are available")
    a = np.asarray(a_vals[:n], dtype=float)
    b = np.asarray(n_vals[:n], dtype=float)
    scale = float(np.max(np.abs(a))) if n else 0.0
    denom = np.where(a != 0, np.abs(a), scale if scale > 0 else 1.0)
    err = np.abs(b - a) / denom
    checks = tuple(LevelCheck(k, float(a[k]), float(b[k]), float(err[k]), bool(err[k] <= tol))
                   for k in range(n))
    worst = int(np.argmax(err)) if n else None
    max_err = float(err.max()) if n else 0.0
    return Comparison(checks, tol, all(c.passed for c in checks), worst, max_err, note)
