"""Arithmetic back-ends: hardware binary64 and a 60-digit software float.

Every numerical routine in the package takes an ``arith`` argument and only
touches numbers through it, so the same code runs in either precision.
"""
from __future__ import annotations

import math
import os
from functools import lru_cache
from dataclasses import dataclass
from typing import Any, Callable

from mpmath.ctx_mp import MPContext

EXTENDED_DPS = 60
ENV_VAR = "STIELTJES_PRECISION"

_mp = MPContext()
_mp.dps = EXTENDED_DPS


@dataclass(frozen=True)
class Arith:
    name: str
    eps_rel: float
    num: Callable[[Any], Any]
    exp: Callable[[Any], Any]
    expm1: Callable[[Any], Any]
    log: Callable[[Any], Any]
    log1p: Callable[[Any], Any]
    sqrt: Callable[[Any], Any]
    power: Callable[[Any, Any], Any]
    digits: int

    def to_float(self, v) -> float:
        return float(v)

    def fmt(self, v) -> str:
        """Deterministic text form: 17 significant digits or the full extended mantissa."""
        if self.name == "f64":
            return format(float(v), ".17g")
        return _mp.nstr(_mp.mpf(v), self.digits, min_fixed=-5, max_fixed=20)

    def __repr__(self) -> str:
        return f"Arith({self.name})"


def _f64_power(a, b):
    return math.pow(a, b)


F64 = Arith(
    name="f64",
    eps_rel=1e-8,
    num=float,
    exp=math.exp,
    expm1=math.expm1,
    log=math.log,
    log1p=math.log1p,
    sqrt=math.sqrt,
    power=_f64_power,
    digits=17,
)

EXTENDED = Arith(
    name="extended",
    eps_rel=1e-30,
    num=_mp.mpf,
    exp=_mp.exp,
    expm1=_mp.expm1,
    log=_mp.log,
    log1p=_mp.log1p,
    sqrt=_mp.sqrt,
    power=lambda a, b: _mp.power(_mp.mpf(a), _mp.mpf(b)),
    digits=EXTENDED_DPS,
)

MODES = {"f64": F64, "extended": EXTENDED}

# n+k above which table computations switch to extended precision when no mode is forced
AUTO_EXTENDED_ORDER = 10


def resolve(mode: str | Arith | None = None, order: int | None = None) -> Arith:
    """Pick the arithmetic for a computation.

    ``mode`` may be an :class:`Arith`, ``"f64"``, ``"extended"``, ``"auto"`` or
    None.  None falls back to the ``STIELTJES_PRECISION`` environment variable
    and then to ``"auto"``; auto selects extended precision when ``order``
    (the largest n+k involved) exceeds 10.
    """
    if isinstance(mode, Arith):
        return mode
    if mode is None:
        mode = os.environ.get(ENV_VAR) or "auto"
    mode = mode.strip().lower()
    if mode == "auto":
        if order is not None and order > AUTO_EXTENDED_ORDER:
            return EXTENDED
        return F64
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"unknown precision mode {mode!r} (use f64, extended or auto)") from None


def rising(arith: Arith, a, m: int):
    """Rising product a (a+1) ... (a+m-1); equals Gamma(a+m)/Gamma(a)."""
    out = arith.num(1)
    a = arith.num(a)
    for i in range(m):
        out = out * (a + i)
    return out


def binomials(arith: Arith, k: int) -> list:
    """Row k of Pascal's triangle by the multiplicative recurrence."""
    row = [arith.num(1)]
    for j in range(1, k + 1):
        row.append(row[-1] * (k - j + 1) / j)
    return row


@lru_cache(maxsize=32)
def _scratch(dps: int) -> MPContext:
    ctx = MPContext()
    ctx.dps = dps
    return ctx


def scratch_context(dps: int) -> MPContext:
    """A private mpmath context at ``dps`` digits, for one-off deep-cancellation sums."""
    return _scratch(max(int(dps), EXTENDED_DPS))
