"""The F^[lambda]_{n,k} families, the sequence difference operator and the
measure-backed closed-form oracle.

Every alternating sum here also reports its cancellation scale (the sum of
absolute values of its summands).  Nonnegativity verdicts compare a value
against ``-eps_rel * scale`` rather than an absolute epsilon, because the
summands grow like Gamma(n+k+lambda) while the result can be tiny.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import BadIndices, InsufficientOrder, NonPositiveX, OutOfRange, StieltjesError
from .expr import Jet, derivs_to_coeffs, series_mul, series_pow
from .measure import MeasureSpec, _piece_power_integral
from .precision import F64, Arith, binomials, resolve, rising, scratch_context

DEFAULT_TABLE_F64 = 8
DEFAULT_TABLE_EXTENDED = 16


def _check_nk(n: int, k: int) -> None:
    if n < 0 or k < 0:
        raise BadIndices(f"indices must be nonnegative, got n={n}, k={k}")


def gamma_ratio(n: int, j: int, k: int, lam, arith: Arith = F64):
    """Gamma(n+k+lam)/Gamma(n+j+lam) as the product of (n+lam+i) for i = j..k-1."""
    if n < 0 or j < 0 or j > k:
        raise BadIndices(f"need 0 <= j <= k and n >= 0, got n={n}, j={j}, k={k}")
    base = arith.num(lam) + n
    out = arith.num(1)
    for i in range(j, k):
        out = out * (base + i)
    return out


def f_nk_sum(jet: Jet, lam, n: int, k: int, arith: Arith = F64):
    """F^[lam]_{n,k}(x) by the binomial sum over x^j f^(n+j)(x).  Returns (value, scale)."""
    _check_nk(n, k)
    if jet.order < n + k:
        raise InsufficientOrder(f"jet of order {jet.order} cannot give F_{{{n},{k}}}")
    x = arith.num(jet.x0)
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {jet.x0}")
    binom = binomials(arith, k)
    # ratio_j = Gamma(n+k+lam)/Gamma(n+j+lam), built downward from ratio_k = 1
    ratios = [arith.num(1)] * (k + 1)
    base = arith.num(lam) + n
    for j in range(k - 1, -1, -1):
        ratios[j] = ratios[j + 1] * (base + j)
    value = arith.num(0)
    scale = arith.num(0)
    xj = arith.num(1)
    for j in range(k + 1):
        term = binom[j] * ratios[j] * xj * arith.num(jet.derivs[n + j])
        value += term
        scale += abs(term)
        xj = xj * x
    if n % 2:
        value = -value
    return value, scale


def _power_series(arith: Arith, x, alpha, N: int) -> list:
    var = [arith.num(x), arith.num(1)] + [arith.num(0)] * (N - 1)
    return series_pow(arith, var[: N + 1], alpha)


def _shifted_coeffs(arith: Arith, jet: Jet, n: int, k: int) -> list:
    # Taylor coefficients of D^n f: f^(n+m)(x)/m!, m = 0..k
    return derivs_to_coeffs(arith, [arith.num(d) for d in jet.derivs[n : n + k + 1]])


def f_nk_operator(fn, lam, n: int, k: int, x, arith: Arith = F64, jet: Jet | None = None):
    """F^[lam]_{n,k}(x) = (-1)^n x^-(n+lam-1) D^k x^(n+k+lam-1) D^n f(x), by jet composition.

    ``jet`` may carry precomputed derivatives of ``fn`` at ``x`` (order >= n+k).
    """
    _check_nk(n, k)
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    if jet is None:
        jet = fn.jet(x, n + k, arith)
    elif jet.order < n + k:
        raise InsufficientOrder(f"jet of order {jet.order} cannot give F_{{{n},{k}}}")
    g = _shifted_coeffs(arith, jet, n, k)
    lam = arith.num(lam)
    p = _power_series(arith, x, lam + (n + k - 1), k)
    dk = series_mul(g, p)[k] * math.factorial(k)
    out = arith.power(arith.num(x), -(lam + (n - 1))) * dk
    return -out if n % 2 else out


WIDDER_VARIANTS = ("sum", "deriv1", "deriv2")


def f_nk_widder(fn, n: int, k: int, x, variant: str = "sum", arith: Arith = F64, jet: Jet | None = None):
    """The lambda = 1 family F_{n,k}(x) by one of its three formulas.

    ``sum``: binomial sum with (n+k)!/(n+j)!; ``deriv1``: (-1)^n x^-n D^k x^(n+k) D^n f;
    ``deriv2``: (-1)^n D^(n+k) x^k f.
    """
    _check_nk(n, k)
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    if variant not in WIDDER_VARIANTS:
        raise StieltjesError(f"unknown variant {variant!r}; use one of {WIDDER_VARIANTS}")
    if jet is None:
        jet = fn.jet(x, n + k, arith)
    elif jet.order < n + k:
        raise InsufficientOrder(f"jet of order {jet.order} cannot give F_{{{n},{k}}}")
    xa = arith.num(x)
    sign = -1 if n % 2 else 1
    if variant == "sum":
        binom = binomials(arith, k)
        total = arith.num(0)
        for j in range(k + 1):
            fact_ratio = arith.num(math.factorial(n + k) // math.factorial(n + j))
            total += binom[j] * fact_ratio * xa**j * arith.num(jet.derivs[n + j])
        return sign * total
    if variant == "deriv1":
        g = _shifted_coeffs(arith, jet, n, k)
        # x^(n+k) around x: coefficients C(n+k, m) x^(n+k-m)
        bn = binomials(arith, n + k)
        poly = [bn[m] * xa ** (n + k - m) for m in range(k + 1)]
        dk = series_mul(g, poly)[k] * math.factorial(k)
        return sign * dk / xa**n
    f_coeffs = derivs_to_coeffs(arith, [arith.num(d) for d in jet.derivs])
    bk = binomials(arith, k)
    poly = [bk[m] * xa ** (k - m) if m <= k else arith.num(0) for m in range(n + k + 1)]
    d = series_mul(f_coeffs, poly)[n + k] * math.factorial(n + k)
    return sign * d


def _oracle_piece(x, a, b, h, lam, n: int, k: int, digits: int):
    """int_a^b t^k/(x+t)^(n+k+lam) dt with t^k = ((x+t) - x)^k expanded binomially.

    The expansion cancels like (2(x+b)/b)^k, so it runs in a private context
    with that many extra digits.
    """
    extra = math.ceil(k * math.log10(2.0 * (x + b) / b)) if k else 0
    ctx = scratch_context(digits + 20 + extra)
    arith = Arith(
        name="scratch",
        eps_rel=0.0,
        num=ctx.mpf,
        exp=ctx.exp,
        expm1=ctx.expm1,
        log=ctx.log,
        log1p=ctx.log1p,
        sqrt=ctx.sqrt,
        power=lambda u, v: ctx.power(ctx.mpf(u), ctx.mpf(v)),
        digits=ctx.dps,
    )
    X = ctx.mpf(x)
    s_total = ctx.mpf(lam) + n + k
    binom = binomials(arith, k)
    total = ctx.mpf(0)
    for i in range(k + 1):
        coeff = binom[i] * (-X) ** (k - i)
        total += coeff * _piece_power_integral(arith, X, a, b, s_total - i)
    return ctx.mpf(h) * total


def f_nk_measure_oracle(m: MeasureSpec, lam, n: int, k: int, x, arith: Arith = F64):
    """Closed form (Gamma(n+k+lam)/Gamma(lam)) [C delta_{n0} + int t^k/(x+t)^(n+k+lam) d rho]."""
    _check_nk(n, k)
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    xa = arith.num(x)
    s = arith.num(lam) + (n + k)
    inner = arith.num(m.C) if n == 0 else arith.num(0)
    for t, w in m.atoms:
        if w:
            ta = arith.num(t)
            inner += arith.num(w) * ta**k * arith.power(xa + ta, -s)
    for a, b, h in m.pieces:
        if h:
            inner += arith.num(_oracle_piece(float(x), a, b, h, float(lam), n, k, arith.digits))
    return rising(arith, lam, n + k) * inner


def delta_k_terms(c: Sequence, n: int, k: int, arith: Arith = F64):
    """(value, scale) of sum_j (-1)^j C(k,j) c_{n+j}, i.e. (-1)^k (Delta^k c)_n."""
    if n < 0 or k < 0:
        raise BadIndices(f"indices must be nonnegative, got n={n}, k={k}")
    if n + k >= len(c):
        raise OutOfRange(f"need c_{n + k} but sequence has length {len(c)}")
    binom = binomials(arith, k)
    value = arith.num(0)
    scale = arith.num(0)
    for j in range(k + 1):
        term = binom[j] * arith.num(c[n + j])
        value = value - term if j % 2 else value + term
        scale += abs(term)
    return value, scale


def delta_k(c: Sequence, n: int, k: int, arith: Arith = F64):
    return delta_k_terms(c, n, k, arith)[0]


@dataclass
class FTable:
    x: float
    lam: float
    n_max: int
    k_max: int
    values: list
    scales: list
    precision: str = "f64"
    crosscheck: float = 0.0  # max |sum - operator| / scale over sampled entries

    def normalized(self, n: int, k: int) -> float:
        s = float(self.scales[n][k])
        return float(self.values[n][k]) / s if s else 0.0

    def entries(self):
        for n in range(self.n_max + 1):
            for k in range(self.k_max + 1):
                yield n, k, self.values[n][k], self.scales[n][k]

    def write_csv(self, path: str | Path, fmt=None) -> tuple[Path, Path]:
        """Write values to ``path`` and cancellation scales to the sibling ``.scales.csv``."""
        fmt = fmt or (lambda v: format(float(v), ".17g"))
        path = Path(path)
        scales_path = path.with_name(path.stem + ".scales.csv")
        header = [f"k={k}" for k in range(self.k_max + 1)]
        for target, rows in ((path, self.values), (scales_path, self.scales)):
            with open(target, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([fmt(v) for v in row])
        return path, scales_path


def _sample_entries(n_max: int, k_max: int) -> list[tuple[int, int]]:
    picks = {(0, 0), (n_max, k_max), (n_max, 0), (0, k_max), (n_max // 2, k_max // 2)}
    picks.update((max(i - 1, 0), i) for i in range(1, min(n_max + 1, k_max) + 1))
    return sorted(p for p in picks if p[0] <= n_max and p[1] <= k_max)


def f_table(fn, lam, x, n_max: int | None = None, k_max: int | None = None, precision=None) -> FTable:
    """Full table of F^[lam]_{n,k}(x) for n <= n_max, k <= k_max.

    Values come from the binomial sum; a sampled subset is recomputed by jet
    composition and the worst normalized disagreement lands in ``crosscheck``.
    """
    if n_max is None or k_max is None:
        forced = resolve(precision, 0) if precision not in (None, "auto") else None
        default = DEFAULT_TABLE_EXTENDED if forced is not None and forced.name == "extended" else DEFAULT_TABLE_F64
        n_max = default if n_max is None else n_max
        k_max = default if k_max is None else k_max
    arith = resolve(precision, n_max + k_max)
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    jet = fn.jet(x, n_max + k_max, arith)
    values = [[None] * (k_max + 1) for _ in range(n_max + 1)]
    scales = [[None] * (k_max + 1) for _ in range(n_max + 1)]
    for n in range(n_max + 1):
        for k in range(k_max + 1):
            values[n][k], scales[n][k] = f_nk_sum(jet, lam, n, k, arith)
    worst = 0.0
    for n, k in _sample_entries(n_max, k_max):
        op = f_nk_operator(fn, lam, n, k, x, arith)
        s = scales[n][k]
        if s:
            worst = max(worst, float(abs(op - values[n][k]) / s))
    return FTable(
        x=x, lam=lam, n_max=n_max, k_max=k_max, values=values, scales=scales,
        precision=arith.name, crosscheck=worst,
    )
