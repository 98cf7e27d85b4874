"""Deterministic JSON/CSV text for reports.

Binary64 numbers are written with 17 significant digits, extended numbers
with the full 60-digit mantissa, so identical runs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

from .precision import EXTENDED, F64, Arith


def _is_mp(v) -> bool:
    return hasattr(v, "_mpf_")


def fmt_number(v, arith: Arith = F64) -> str:
    if _is_mp(v):
        text = str(v)
        if "inf" in text or "nan" in text:
            return "null"
        return EXTENDED.fmt(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    f = float(v)
    if not math.isfinite(f):
        return "null"
    return format(f, ".17g")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with fixed number formatting and insertion-ordered keys."""
    out = io.StringIO()

    def write(o, level: int) -> None:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                out.write("{}")
                return
            out.write("{\n")
            for i, (k, v) in enumerate(o.items()):
                out.write(f"{pad}{json.dumps(str(k))}: ")
                write(v, level + 1)
                out.write(",\n" if i < len(o) - 1 else "\n")
            out.write(end + "}")
        elif isinstance(o, (list, tuple)):
            if not o:
                out.write("[]")
                return
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                out.write("[" + ", ".join(_scalar(v) for v in o) + "]")
                return
            out.write("[\n")
            for i, v in enumerate(o):
                out.write(pad)
                write(v, level + 1)
                out.write(",\n" if i < len(o) - 1 else "\n")
            out.write(end + "]")
        else:
            out.write(_scalar(o))

    write(obj, 0)
    out.write("\n")
    return out.getvalue()


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, complex):
        return f"[{fmt_number(v.real)}, {fmt_number(v.imag)}]"
    return fmt_number(v)


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt_number(v) for v in row])
    return buf.getvalue()
