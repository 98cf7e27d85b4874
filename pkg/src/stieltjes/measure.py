"""Representing data (C, rho) and closed-form generalized Stieltjes kernels.

A measure is a finite list of atoms plus constant-density pieces.  Richer
densities can be approximated by refining into more pieces; every integral
against such a measure stays in closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import BadInterval, NegativeMass, NonPositiveX, OnCut, OverlappingPieces, StieltjesError
from .precision import F64, Arith, rising

# |n + lambda - 1| below this selects the logarithmic piece formula
LOG_BRANCH_THRESHOLD = 1e-9


@dataclass(frozen=True)
class MeasureSpec:
    C: float = 0.0
    atoms: tuple[tuple[float, float], ...] = ()
    pieces: tuple[tuple[float, float, float], ...] = ()

    @property
    def is_zero_rho(self) -> bool:
        return all(w == 0 for _, w in self.atoms) and all(h == 0 for *_, h in self.pieces)

    def to_json(self) -> dict:
        return {
            "C": self.C,
            "atoms": [list(a) for a in self.atoms],
            "pieces": [list(p) for p in self.pieces],
        }


def validate(raw: Mapping[str, Any] | MeasureSpec) -> MeasureSpec:
    """Check a raw ``{"C", "atoms", "pieces"}`` description and return a sorted MeasureSpec."""
    if isinstance(raw, MeasureSpec):
        raw = raw.to_json()
    unknown = set(raw) - {"C", "atoms", "pieces"}
    if unknown:
        raise StieltjesError(f"unknown measure fields: {sorted(unknown)}")
    C = float(raw.get("C", 0.0) or 0.0)
    atoms = [tuple(float(v) for v in a) for a in raw.get("atoms", []) or []]
    pieces = [tuple(float(v) for v in p) for p in raw.get("pieces", []) or []]

    values = [C] + [v for a in atoms for v in a] + [v for p in pieces for v in p]
    if not all(math.isfinite(v) for v in values):
        raise StieltjesError("measure entries must be finite")
    if C < 0:
        raise NegativeMass(f"constant C={C} is negative")
    for a in atoms:
        if len(a) != 2:
            raise StieltjesError(f"atom {a} must be [t, w]")
        t, w = a
        if t < 0:
            raise NegativeMass(f"atom location t={t} is negative")
        if w < 0:
            raise NegativeMass(f"atom mass w={w} is negative")
    for p in pieces:
        if len(p) != 3:
            raise StieltjesError(f"piece {p} must be [a, b, h]")
        a, b, h = p
        if h < 0:
            raise NegativeMass(f"piece density h={h} is negative")
        if a < 0 or a >= b:
            raise BadInterval(f"piece interval [{a}, {b}] is not 0 <= a < b")
    atoms.sort()
    pieces.sort()
    for p, q in zip(pieces, pieces[1:]):
        if q[0] < p[1]:
            raise OverlappingPieces(f"pieces [{p[0]}, {p[1]}] and [{q[0]}, {q[1]}] overlap")
    return MeasureSpec(C=C, atoms=tuple(atoms), pieces=tuple(pieces))


def _check_x(x) -> None:
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")


def _piece_power_integral(arith: Arith, x, a, b, s):
    """Integral of (x+t)^(-s) over [a, b], stable across s = 1."""
    lo = arith.num(x) + arith.num(a)
    hi = arith.num(x) + arith.num(b)
    L = arith.log(hi / lo)
    d = s - 1
    if abs(d) < LOG_BRANCH_THRESHOLD:
        return L
    # (lo^(1-s) - hi^(1-s)) / (s-1) written with expm1 so that small s-1 loses nothing
    return -arith.power(lo, -d) * arith.expm1(-d * L) / d


def kernel_integral(m: MeasureSpec, x, lam, n: int, arith: Arith = F64):
    """Integral of d rho(t) / (x+t)^(n+lam)."""
    _check_x(x)
    x = arith.num(x)
    s = arith.num(lam) + n
    total = arith.num(0)
    for t, w in m.atoms:
        if w:
            total += arith.num(w) * arith.power(x + arith.num(t), -s)
    for a, b, h in m.pieces:
        if h:
            total += arith.num(h) * _piece_power_integral(arith, x, a, b, s)
    return total


def eval_derivs(m: MeasureSpec, lam, x, N: int, arith: Arith = F64) -> list:
    """f(x), f'(x), ..., f^(N)(x) for f = C + integral d rho/(x+t)^lam."""
    _check_x(x)
    out = []
    for n in range(N + 1):
        v = rising(arith, lam, n) * kernel_integral(m, x, lam, n, arith)
        if n % 2:
            v = -v
        if n == 0:
            v = v + arith.num(m.C)
        out.append(v)
    return out


def _cpow_neg(z: complex, lam: float) -> complex:
    # principal branch: z^(-lam) = exp(-lam * Log z)
    return cmath.exp(-lam * cmath.log(z))


def eval_complex(m: MeasureSpec, lam, z) -> complex:
    """C + integral d rho(t)/(z+t)^lam on the cut plane, principal branch."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0:
        raise OnCut(f"z={z} lies on the cut (-inf, 0]")
    lam = float(lam)
    total = complex(m.C)
    for t, w in m.atoms:
        if w:
            total += w * _cpow_neg(z + t, lam)
    for a, b, h in m.pieces:
        if not h:
            continue
        za, zb = z + a, z + b
        if abs(lam - 1) < LOG_BRANCH_THRESHOLD:
            # z+t sweeps a segment that avoids the cut, so Log is continuous along it
            total += h * (cmath.log(zb) - cmath.log(za))
        else:
            e = 1 - lam
            total += h * (cmath.exp(e * cmath.log(zb)) - cmath.exp(e * cmath.log(za))) / e
    return total
