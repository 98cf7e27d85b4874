"""Decision procedures over grids: complete monotonicity, condition (b) of the
order-lambda characterization, the lambda = 1 diagonal condition, the kernel
embedding integral, lambda limits and the upper-half-plane sign check.

A "consistent" verdict is grid-limited evidence; only "violated" is a
certificate (of non-membership in the tested class).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .errors import BadOrderPair, StieltjesError
from .operators import f_nk_operator, f_nk_sum, f_table
from .precision import EXTENDED, F64, Arith, resolve

DEFAULT_GRID = (1e-3, 1e3, 61)


def log_grid(lo: float = DEFAULT_GRID[0], hi: float = DEFAULT_GRID[1], count: int = DEFAULT_GRID[2]) -> list[float]:
    if not 0 < lo < hi or count < 1:
        raise StieltjesError(f"grid needs 0 < lo < hi and count >= 1, got {lo}:{hi}:{count}")
    if count == 1:
        return [float(lo)]
    pts = [float(v) for v in np.geomspace(lo, hi, count)]
    # geomspace lands near, not on, exact decades; snap so x = 1 etc. are hit exactly
    return [float(f"{v:.15g}") for v in pts]


@dataclass
class Violation:
    x: float
    n: int
    k: int
    value: object
    scale: object


@dataclass
class ClassificationReport:
    function: dict
    test: str
    lam: float | None
    grid: list
    n_max: int
    k_max: int
    tol: float
    precision: str
    violations: list = field(default_factory=list)
    min_normalized: float = math.inf
    per_point: list = field(default_factory=list)  # (x, min normalized, n, k)

    @property
    def verdict(self) -> str:
        return "violated" if self.violations else "consistent"

    @property
    def evidence(self) -> str:
        return "certificate" if self.violations else "grid-limited"

    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def find(self, x, n, k) -> Violation | None:
        for v in self.violations:
            if v.n == n and v.k == k and math.isclose(v.x, x, rel_tol=1e-12):
                return v
        return None

    def _note(self, x, n, k, value, scale) -> None:
        s = float(scale)
        r = float(value) / s if s else 0.0
        if r < self.min_normalized:
            self.min_normalized = r
        if not self.per_point or self.per_point[-1][0] != x:
            self.per_point.append([x, r, n, k])
        elif r < self.per_point[-1][1]:
            self.per_point[-1][1:] = [r, n, k]
        if value < -self.tol * scale:
            self.violations.append(Violation(x, n, k, value, scale))


def _report(fn, test, lam, grid, n_max, k_max, tol, arith) -> ClassificationReport:
    return ClassificationReport(
        function=fn.to_json(), test=test, lam=lam, grid=list(grid), n_max=n_max,
        k_max=k_max, tol=tol, precision=arith.name,
    )


def check_cm(fn, grid: Iterable[float] | None = None, n_max: int = 8, tol: float | None = None,
             precision=None) -> ClassificationReport:
    """Sign test (-1)^n f^(n)(x) >= 0 for n <= n_max on the grid."""
    grid = log_grid() if grid is None else list(grid)
    arith = resolve(precision, n_max)
    tol = arith.eps_rel if tol is None else tol
    rep = _report(fn, "cm", None, grid, n_max, 0, tol, arith)
    for x in grid:
        jet = fn.jet(x, n_max, arith)
        for n in range(n_max + 1):
            v = jet.derivs[n]
            v = -v if n % 2 else v
            rep._note(x, n, 0, v, abs(v))
    return rep


def check_condition_b(fn, lam, grid: Iterable[float] | None = None, n_max: int | None = None,
                      k_max: int | None = None, tol: float | None = None, precision=None) -> ClassificationReport:
    """Every F^[lam]_{n,k}(x) on the grid must be >= -tol * scale."""
    grid = log_grid() if grid is None else list(grid)
    rep = None
    for x in grid:
        table = f_table(fn, lam, x, n_max, k_max, precision)
        if rep is None:
            arith = resolve(table.precision)
            rep = _report(fn, "b", lam, grid, table.n_max, table.k_max,
                          arith.eps_rel if tol is None else tol, arith)
        for n, k, v, s in table.entries():
            rep._note(x, n, k, v, s)
    return rep


def check_condition_c(fn, grid: Iterable[float] | None = None, k_max: int | None = None,
                      tol: float | None = None, precision=None) -> ClassificationReport:
    """lambda = 1 diagonal test: F_{0,0} >= 0 and F_{k-1,k} >= 0 for 1 <= k <= k_max."""
    grid = log_grid() if grid is None else list(grid)
    if k_max is None:
        k_max = 8
    arith = resolve(precision, 2 * k_max - 1)
    tol = arith.eps_rel if tol is None else tol
    rep = _report(fn, "c", 1.0, grid, max(k_max - 1, 0), k_max, tol, arith)
    for x in grid:
        jet = fn.jet(x, max(2 * k_max - 1, 0), arith)
        for n, k in [(0, 0)] + [(k - 1, k) for k in range(1, k_max + 1)]:
            v, s = f_nk_sum(jet, 1, n, k, arith)
            rep._note(x, n, k, v, s)
    return rep


# -- kernel embedding -------------------------------------------------------

EMBEDDING_TOL = 1e-10


def _embedding_integral(lam: float, lam2: float, c: float) -> float:
    """int_0^inf u^(a-1) (c+u)^(-lam2) du with a = lam2 - lam, done on (0, 1].

    u = c(1-s)/s maps the half line to s in (0, 1]; the integrand then behaves
    like (1-s)^(a-1) at s = 1 and like s^(lam-1) at s = 0.  Each half of the
    interval gets the power substitution that removes its endpoint singularity.
    Both s and 1-s are carried as logarithms since either can underflow.
    """
    a = lam2 - lam
    log_c = math.log(c)

    def log_g(ls: float, lw: float) -> float:
        # log of u^(a-1) (c+u)^(-lam2) du/ds with u = c w/s, w = 1-s
        log_u = log_c + lw - ls
        log_cu = log_c + float(np.logaddexp(0.0, lw - ls))
        return (a - 1.0) * log_u - lam2 * log_cu + log_c - 2.0 * ls

    # s = 1 - v^(1/a): (1-s)^(a-1) ds = dv / a
    def right(v: float) -> float:
        if v <= 0.0:
            return 0.0
        lw = math.log(v) / a
        ls = math.log1p(-math.exp(lw))
        return math.exp(log_g(ls, lw) + lw - math.log(a * v))

    # s = v^(1/lam): s^(lam-1) ds = dv / lam
    def left(v: float) -> float:
        if v <= 0.0:
            return 0.0
        ls = math.log(v) / lam
        lw = math.log1p(-math.exp(ls))
        return math.exp(log_g(ls, lw) + ls - math.log(lam * v))

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    lo, _ = integrate.quad(left, 0.0, 0.5**lam, **opts)
    hi, _ = integrate.quad(right, 0.0, 0.5**a, **opts)
    return lo + hi


def kernel_embedding_residual(lam: float, lam2: float, x: float, t: float) -> float:
    """Quadrature of the order-lam2 representation of (x+t)^(-lam), minus (x+t)^(-lam)."""
    if not (0 < lam < lam2):
        raise BadOrderPair(f"need 0 < lambda < lambda', got {lam}, {lam2}")
    c = x + t
    if not c > 0:
        raise StieltjesError("x + t must be positive")
    a = lam2 - lam
    # Gamma(lam2)/(Gamma(lam) Gamma(a)) in log form; the prefactor can be ~1/a
    pref = math.exp(special.gammaln(lam2) - special.gammaln(lam) - special.gammaln(a))
    return pref * _embedding_integral(lam, lam2, c) - c ** (-lam)


# -- lambda limits ------------------------------------------------------------


@dataclass
class LimitRow:
    lam: float
    value: object  # F^[lam]_{n,k}(x) / lam^k
    target: object
    gap: float


@dataclass
class LimitReport:
    x: float
    n: int
    k: int
    large: list  # LimitRow, target (-1)^n f^(n)(x)
    small_01: list  # F^[lam]_{0,1}(x) against x f'(x)
    small_10: list  # F^[lam]_{1,0}(x) against -f'(x)

    def gap_ratios(self) -> list[float]:
        g = [r.gap for r in self.large]
        return [b / a if a else math.nan for a, b in zip(g, g[1:])]

    def to_json(self, fmt=float) -> dict:
        def rows(rs):
            return [{"lambda": r.lam, "value": fmt(r.value), "target": fmt(r.target), "gap": r.gap} for r in rs]

        return {
            "x": self.x, "n": self.n, "k": self.k,
            "large_lambda": rows(self.large),
            "gap_ratios": self.gap_ratios(),
            "small_lambda_F01": rows(self.small_01),
            "small_lambda_F10": rows(self.small_10),
        }


def limit_checks(fn, x, n: int, k: int, lam_list: Sequence[float] = (1e1, 1e2, 1e3, 1e4),
                 small_list: Sequence[float] = (1e-2, 1e-4, 1e-6), precision=None) -> LimitReport:
    """F^[lam]_{n,k}(x)/lam^k along ``lam_list`` against (-1)^n f^(n)(x), and the
    small-lambda limits F_{0,1} -> x f'(x), F_{1,0} -> -f'(x)."""
    arith = resolve(precision, n + k)
    jet = fn.jet(x, max(n + k, 1), arith)
    xa = arith.num(x)
    target = -jet.derivs[n] if n % 2 else jet.derivs[n]
    large = []
    for lam in lam_list:
        v, _ = f_nk_sum(jet, lam, n, k, arith)
        v = v / arith.num(lam) ** k
        large.append(LimitRow(lam, v, target, float(abs(v - target))))
    small_01, small_10 = [], []
    for lam in small_list:
        v01, _ = f_nk_sum(jet, lam, 0, 1, arith)
        t01 = xa * jet.derivs[1]
        small_01.append(LimitRow(lam, v01, t01, float(abs(v01 - t01))))
        v10, _ = f_nk_sum(jet, lam, 1, 0, arith)
        t10 = -jet.derivs[1]
        small_10.append(LimitRow(lam, v10, t10, float(abs(v10 - t10))))
    return LimitReport(x, n, k, large, small_01, small_10)


def lambda_polynomial_residual(fn, x, n: int, k: int, nodes: Sequence[float], probe: float,
                               arith: Arith = EXTENDED):
    """Interpolate F^[lam]_{n,k}(x) through k+1 lambda nodes and return the
    difference from the direct value at ``probe`` (zero for a degree-k polynomial)."""
    if len(nodes) != k + 1:
        raise StieltjesError(f"need exactly k+1 = {k + 1} nodes, got {len(nodes)}")
    jet = fn.jet(x, n + k, arith)
    lams = [arith.num(v) for v in nodes]
    vals = [f_nk_sum(jet, v, n, k, arith)[0] for v in nodes]
    p = arith.num(probe)
    interp = arith.num(0)
    for i, li in enumerate(lams):
        w = arith.num(1)
        for j, lj in enumerate(lams):
            if j != i:
                w = w * (p - lj) / (li - lj)
        interp += w * vals[i]
    direct = f_nk_sum(jet, probe, n, k, arith)[0]
    return interp - direct


def exp_kernel_limit(x: float, t: float, lam: float) -> tuple[float, float, float]:
    """((lam t)^lam / (x + lam t)^lam, e^(-x/t), gap)."""
    if not t > 0:
        raise StieltjesError(f"t must be positive, got {t}")
    value = math.exp(-lam * math.log1p(x / (lam * t)))
    target = math.exp(-x / t)
    return value, target, abs(value - target)


# -- upper half plane -----------------------------------------------------------


def upper_half_plane_grid(re_lo: float = -5.0, re_hi: float = 5.0, im_lo: float = 0.05,
                          im_hi: float = 5.0, n_re: int = 20, n_im: int = 20) -> list[complex]:
    if not 0 < im_lo <= im_hi:
        raise StieltjesError("imaginary range must lie in (0, inf)")
    return [complex(a, b) for b in np.linspace(im_lo, im_hi, n_im) for a in np.linspace(re_lo, re_hi, n_re)]


@dataclass
class PickReport:
    function: dict
    points: int
    max_imag: float
    min_real_axis: float
    violations: list  # (z, Im f(z)) or (x, f(x))
    tol: float

    @property
    def verdict(self) -> str:
        return "violated" if self.violations else "consistent"

    def to_json(self) -> dict:
        return {
            "function": self.function,
            "test": "pick",
            "verdict": self.verdict,
            "evidence": "certificate" if self.violations else "grid-limited",
            "points": self.points,
            "max_imag": self.max_imag,
            "min_real_axis": self.min_real_axis,
            "tol": self.tol,
            "violations": [
                {"z": [v[0].real, v[0].imag], "where": v[2], "value": v[1]} for v in self.violations
            ],
        }


def pick_property_check(fn, points: Sequence[complex] | None = None, real_points: Sequence[float] | None = None,
                        tol: float = 1e-12) -> PickReport:
    """Im f(z) <= tol on the sampled upper half plane and f(x) >= -tol on the sampled ray."""
    points = upper_half_plane_grid() if points is None else list(points)
    real_points = log_grid(1e-3, 1e3, 25) if real_points is None else list(real_points)
    violations = []
    max_imag = -math.inf
    for z in points:
        if not z.imag > 0:
            raise StieltjesError(f"point {z} is not in the upper half plane")
        im = fn.complex_value(z).imag
        max_imag = max(max_imag, im)
        if im > tol:
            violations.append((z, im, "imag"))
    min_real = math.inf
    for x in real_points:
        v = fn.complex_value(complex(x, 0.0)).real
        min_real = min(min_real, v)
        if v < -tol:
            violations.append((complex(x, 0.0), v, "real"))
    return PickReport(fn.to_json(), len(points), max_imag, min_real, violations, tol)
