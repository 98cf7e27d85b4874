"""Generalized Stieltjes functions: evaluation, derivative-inequality tables,
complete-monotonicity tests and moment-based reconstruction."""

from .errors import StieltjesError
from .functions import ExprFunction, MeasureFunction, from_expr, from_json, from_measure
from .measure import MeasureSpec, validate
from .precision import EXTENDED, F64, resolve

__all__ = [
    "EXTENDED",
    "F64",
    "ExprFunction",
    "MeasureFunction",
    "MeasureSpec",
    "StieltjesError",
    "from_expr",
    "from_json",
    "from_measure",
    "resolve",
    "validate",
]

__version__ = "0.1.0"
