"""Moment-sequence side: difference tests, the moment sequence of a function
at a base point, discrete reconstruction of the representing measure on
[0, 1], and the change of variables back to (C, rho).

Recovered measures are compared through the functions they induce, never
atom by atom: the reconstruction grid j/K maps to different t-locations at
different base points, and only the induced function is canonical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientLength, NonPositiveX, NotCompletelyMonotone, StieltjesError
from .measure import MeasureSpec, eval_derivs
from .operators import delta_k_terms
from .precision import EXTENDED, F64, Arith, binomials, resolve, rising

DEFAULT_DEPTH = 64
# reconstruction depths above this always run in extended precision
EXTENDED_DEPTH = 20


@dataclass(frozen=True)
class MomentSequence:
    entries: tuple

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, n):
        return self.entries[n]

    @property
    def N(self) -> int:
        return len(self.entries) - 1


@dataclass(frozen=True)
class DiscreteUnitMeasure:
    atoms: tuple  # (u, mass) pairs, u in [0, 1]
    clamped: tuple = ()  # (j, raw mass) of small negatives set to zero

    def moment(self, n: int):
        return sum((m * u**n for u, m in self.atoms), 0 * self.atoms[0][1]) if self.atoms else 0.0

    @property
    def total_mass(self):
        return self.moment(0)


@dataclass
class CMVerdict:
    ok: bool
    violation: tuple | None = None  # (n, k, value)

    def __bool__(self) -> bool:
        return self.ok


def _as_seq(c) -> tuple:
    return c.entries if isinstance(c, MomentSequence) else tuple(c)


def is_cm_sequence(c, tol: float = 0.0, arith: Arith = F64, relative: bool = False) -> CMVerdict:
    """Check (-1)^k (Delta^k c)_n >= -tol for all n + k <= N.

    With ``relative=True`` the threshold for each entry is ``tol`` times its
    cancellation scale.  The reported violation is the first in (k, n)
    lexicographic order.
    """
    seq = _as_seq(c)
    N = len(seq) - 1
    for k in range(N + 1):
        for n in range(N - k + 1):
            value, scale = delta_k_terms(seq, n, k, arith)
            bound = tol * scale if relative else tol
            if value < -bound:
                return CMVerdict(False, (n, k, value))
    return CMVerdict(True)


def moment_sequence_at(fn, lam, x, N: int, arith: Arith = F64) -> MomentSequence:
    """c_n = (-1)^n (Gamma(lam)/Gamma(n+lam)) x^n f^(n)(x), n = 0..N."""
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    jet = fn.jet(x, N, arith)
    xa = arith.num(x)
    out = []
    xn = arith.num(1)
    for n in range(N + 1):
        v = xn * arith.num(jet.derivs[n]) / rising(arith, lam, n)
        out.append(-v if n % 2 else v)
        xn = xn * xa
    return MomentSequence(tuple(out))


def bernstein_masses(c, K: int, arith: Arith = F64) -> list[tuple]:
    """Raw masses C(K,j) (-1)^(K-j) (Delta^(K-j) c)_j at u = j/K, with their scales."""
    seq = _as_seq(c)
    if K < 1:
        raise StieltjesError(f"depth K must be >= 1, got {K}")
    if K > len(seq) - 1:
        raise InsufficientLength(f"depth K={K} needs c_0..c_{K}, have {len(seq)} entries")
    binom = binomials(arith, K)
    out = []
    for j in range(K + 1):
        d, s = delta_k_terms(seq, j, K - j, arith)
        out.append((binom[j] * d, binom[j] * s))
    return out


def reconstruct(c, K: int, tol: float = 0.0, arith: Arith = F64) -> DiscreteUnitMeasure:
    """Discrete measure on {0, 1/K, ..., 1} whose low moments match c.

    Total mass equals c_0 and the first moment equals c_1; the second moment
    is c_2 + (c_1 - c_2)/K.  Negative masses no worse than ``-tol * scale``
    are clamped to zero and listed in ``clamped``; anything more negative
    raises NotCompletelyMonotone.
    """
    raw = bernstein_masses(c, K, arith)
    atoms = []
    clamped = []
    for j, (m, s) in enumerate(raw):
        if m < 0:
            if m < -tol * s:
                raise NotCompletelyMonotone(
                    f"reconstructed mass at u={j}/{K} is {arith.fmt(m)} (scale {arith.fmt(s)})",
                    violation=(j, K - j, m),
                )
            clamped.append((j, m))
            m = arith.num(0)
        atoms.append((arith.num(j) / K, m))
    return DiscreteUnitMeasure(tuple(atoms), tuple(clamped))


def pushforward_to_rho(nu: DiscreteUnitMeasure, x, lam, arith: Arith = F64):
    """Map u = x/(x+t) back: returns (C_hat, [(t, w), ...]).

    The atom at u = 0 becomes the constant; an atom (u, m) with u > 0 becomes
    t = x(1/u - 1) with mass m (x/u)^lam.  Zero masses are dropped.
    """
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    xa = arith.num(x)
    lam_a = arith.num(lam)
    C = arith.num(0)
    atoms = []
    for u, m in nu.atoms:
        if m < 0:
            raise StieltjesError(f"negative mass {m} at u={u}")
        if u == 0:
            C = C + m
        elif m:
            atoms.append((xa * (1 / u - 1), m * arith.power(xa / u, lam_a)))
    return C, atoms


@dataclass
class RecoveredMeasure:
    x: float
    lam: float
    K: int
    C_hat: object
    rho_atoms: list
    precision: str = "f64"
    moment_residuals: list = field(default_factory=list)
    sup_error: float = 0.0
    grid: list = field(default_factory=list)
    clamped: list = field(default_factory=list)

    def induced(self, y, arith: Arith = F64):
        """Value at y of C_hat + sum w/(y+t)^lam."""
        ya = arith.num(y)
        lam = arith.num(self.lam)
        total = arith.num(self.C_hat)
        for t, w in self.rho_atoms:
            total += arith.num(w) * arith.power(ya + arith.num(t), -lam)
        return total

    def as_measure_spec(self) -> MeasureSpec:
        return MeasureSpec(
            C=float(self.C_hat), atoms=tuple((float(t), float(w)) for t, w in self.rho_atoms)
        )

    def to_json(self, fmt=None) -> dict:
        fmt = fmt or float
        return {
            "x": self.x,
            "lambda": self.lam,
            "K": self.K,
            "precision": self.precision,
            "C": fmt(self.C_hat),
            "atoms": [[fmt(t), fmt(w)] for t, w in self.rho_atoms],
            "diagnostics": {
                "moment_residuals": [fmt(r) for r in self.moment_residuals],
                "sup_error": self.sup_error,
                "grid": [self.grid[0], self.grid[-1], len(self.grid)] if self.grid else [],
                "clamped": [[j, fmt(m)] for j, m in self.clamped],
            },
        }


def default_grid(x, count: int = 41) -> list[float]:
    """Log-spaced check points on [x/2, 5x]."""
    return [float(v) for v in np.geomspace(float(x) / 2, 5 * float(x), count)]


def _fn_value(fn, y, arith: Arith):
    return fn.jet(y, 0, arith).derivs[0]


def recover_measure(fn, lam, x, K: int = DEFAULT_DEPTH, precision=None, tol: float | None = None,
                    grid: Sequence[float] | None = None) -> RecoveredMeasure:
    """Recover (C, rho) from the moment sequence of ``fn`` at base point ``x``.

    Pipeline: moments c_0..c_K at x, Bernstein reconstruction of nu_x at depth
    K, pushforward to t-space.  Diagnostics record c_n minus the reconstructed
    moments and the sup error of the induced function against ``fn`` on
    ``grid`` (default :func:`default_grid`).
    """
    if K > EXTENDED_DEPTH:
        arith = EXTENDED
    else:
        arith = resolve(precision, K)
    tol = arith.eps_rel if tol is None else tol
    c = moment_sequence_at(fn, lam, x, K, arith)
    nu = reconstruct(c, K, tol=tol, arith=arith)
    C_hat, atoms = pushforward_to_rho(nu, x, lam, arith)
    residuals = [c[n] - nu.moment(n) for n in range(K + 1)]
    rec = RecoveredMeasure(
        x=x, lam=lam, K=K, C_hat=C_hat, rho_atoms=atoms, precision=arith.name,
        moment_residuals=residuals, clamped=list(nu.clamped),
    )
    rec.grid = list(grid) if grid is not None else default_grid(x)
    rec.sup_error = max(float(abs(rec.induced(y, arith) - _fn_value(fn, y, arith))) for y in rec.grid)
    return rec


@dataclass
class ConsistencyReport:
    x1: float
    x2: float
    sup_discrepancy: float
    C_difference: float
    error_x1: float
    error_x2: float
    grid: list

    @property
    def within_bound(self) -> bool:
        return self.sup_discrepancy <= self.error_x1 + self.error_x2

    def to_json(self) -> dict:
        return {
            "x1": self.x1,
            "x2": self.x2,
            "sup_discrepancy": self.sup_discrepancy,
            "C_difference": self.C_difference,
            "sup_error_x1": self.error_x1,
            "sup_error_x2": self.error_x2,
            "within_bound": self.within_bound,
        }


def base_point_consistency(fn, lam, x1, x2, K: int = DEFAULT_DEPTH, precision=None,
                           grid: Sequence[float] | None = None) -> ConsistencyReport:
    """Recover at two base points and compare the induced functions on one grid."""
    if grid is None:
        lo, hi = min(x1, x2), max(x1, x2)
        grid = [float(v) for v in np.geomspace(lo / 2, 5 * hi, 41)]
    r1 = recover_measure(fn, lam, x1, K, precision, grid=grid)
    r2 = recover_measure(fn, lam, x2, K, precision, grid=grid)
    arith = EXTENDED if EXTENDED.name in (r1.precision, r2.precision) else F64
    disc = max(float(abs(r1.induced(y, arith) - r2.induced(y, arith))) for y in grid)
    return ConsistencyReport(
        x1=x1, x2=x2, sup_discrepancy=disc,
        C_difference=float(abs(arith.num(r1.C_hat) - arith.num(r2.C_hat))),
        error_x1=r1.sup_error, error_x2=r2.sup_error, grid=list(grid),
    )
