"""FunctionSpec: the object being classified.

Two kinds exist: a measure-backed function ``C + int d rho/(x+t)^order`` with
exact derivative kernels, and an expression evaluated through Taylor jets.
Both expose the same small surface (``jet``, ``complex_value``, ``to_json``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Union

from . import expr as _expr
from . import measure as _measure
from .errors import StieltjesError
from .expr import Jet
from .precision import F64, Arith


@dataclass(frozen=True)
class MeasureFunction:
    measure: _measure.MeasureSpec
    order: float = 1.0

    def __post_init__(self):
        if not self.order > 0:
            raise StieltjesError(f"order must be positive, got {self.order}")

    def jet(self, x, N: int, arith: Arith = F64) -> Jet:
        derivs = _measure.eval_derivs(self.measure, self.order, x, N, arith)
        return Jet(x0=arith.num(x), derivs=tuple(derivs))

    def complex_value(self, z) -> complex:
        return _measure.eval_complex(self.measure, self.order, z)

    def to_json(self) -> dict:
        return {"measure": self.measure.to_json(), "lambda": self.order}

    def describe(self) -> str:
        return f"measure(order={self.order})"


@dataclass(frozen=True)
class ExprFunction:
    ast: _expr.Expr
    source: str = ""

    def jet(self, x, N: int, arith: Arith = F64) -> Jet:
        return _expr.jet_eval(self.ast, x, N, arith)

    def complex_value(self, z) -> complex:
        return _expr.eval_complex(self.ast, z)

    def to_json(self) -> dict:
        return {"expr": self.source or _expr.to_string(self.ast)}

    def describe(self) -> str:
        return self.source or _expr.to_string(self.ast)


FunctionSpec = Union[MeasureFunction, ExprFunction]


def from_expr(src: str) -> ExprFunction:
    return ExprFunction(_expr.parse(src), src)


def from_measure(raw, order: float = 1.0) -> MeasureFunction:
    return MeasureFunction(_measure.validate(raw), float(order))


def from_json(obj: Mapping[str, Any], default_order: float = 1.0) -> FunctionSpec:
    """Build a FunctionSpec from ``{"expr": ...}``, ``{"measure": {...}, "lambda": ...}``
    or a bare MeasureSpec object (which takes ``default_order``)."""
    if not isinstance(obj, Mapping):
        raise StieltjesError("function spec must be a JSON object")
    if "expr" in obj:
        return from_expr(str(obj["expr"]))
    if "measure" in obj:
        return from_measure(obj["measure"], obj.get("lambda", default_order))
    return from_measure(obj, default_order)


def load(path: str | Path, default_order: float = 1.0) -> FunctionSpec:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StieltjesError(f"{path}: invalid JSON ({exc})") from None
    return from_json(obj, default_order)
