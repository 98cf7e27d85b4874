"""Command-line front end.

Exit codes: 0 consistent / success, 1 violation certificate (or a failed
sequence/kernel check), 2 input or domain error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import classify, functions, hausdorff, operators
from .errors import NotCompletelyMonotone, StieltjesError
from .precision import resolve
from .report import csv_text, dumps

log = logging.getLogger("stieltjes")

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    expr: str | None = None
    measure: str | None = None
    lam: float = 1.0
    x: float = 1.0
    x2: float | None = None
    K: int = hausdorff.DEFAULT_DEPTH
    n_max: int | None = None
    k_max: int | None = None
    grid: tuple[float, float, int] = classify.DEFAULT_GRID
    precision: str | None = None
    out: str | None = None
    fmt: str = "json"
    test: str = "b"
    n: int = 0
    k: int = 1
    tol: float | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise StieltjesError(f"--lambda must be positive, got {self.lam}")
        for name in ("n_max", "k_max", "K", "n", "k"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise StieltjesError(f"--{name.replace('_', '').lower()} must be nonnegative")
        lo, hi, count = self.grid
        if not 0 < lo < hi or count < 1:
            raise StieltjesError(f"--grid needs 0 < lo < hi and count >= 1, got {lo}:{hi}:{count}")


def parse_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:count, got {text!r}") from None


def _load_function(cfg: RunConfig):
    if cfg.expr is not None:
        return functions.from_expr(cfg.expr)
    if cfg.measure is not None:
        return functions.load(cfg.measure, default_order=cfg.lam)
    raise StieltjesError("one of --expr or --measure is required")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _violation_json(v: classify.Violation) -> dict:
    return {"x": v.x, "n": v.n, "k": v.k, "value": v.value, "scale": v.scale}


def run_classify(cfg: RunConfig) -> int:
    fn = _load_function(cfg)
    grid = classify.log_grid(*cfg.grid)
    if cfg.test == "pick":
        rep = classify.pick_property_check(fn, tol=cfg.tol if cfg.tol is not None else 1e-12)
        if cfg.fmt == "csv":
            _emit(cfg, csv_text(["re", "im", "where", "value"],
                                [[v[0].real, v[0].imag, v[2], v[1]] for v in rep.violations]))
        else:
            _emit(cfg, dumps(rep.to_json()))
        return EXIT_VIOLATION if rep.violations else EXIT_OK
    if cfg.test == "b":
        rep = classify.check_condition_b(fn, cfg.lam, grid, cfg.n_max, cfg.k_max, cfg.tol, cfg.precision)
    elif cfg.test == "c":
        rep = classify.check_condition_c(fn, grid, cfg.k_max, cfg.tol, cfg.precision)
    elif cfg.test == "cm":
        rep = classify.check_cm(fn, grid, 8 if cfg.n_max is None else cfg.n_max, cfg.tol, cfg.precision)
    else:
        raise StieltjesError(f"unknown test {cfg.test!r}")
    if cfg.fmt == "csv":
        _emit(cfg, csv_text(["x", "min_normalized", "n", "k"], rep.per_point))
    else:
        _emit(cfg, dumps({
            "command": "classify",
            "function": rep.function,
            "test": rep.test,
            "lambda": rep.lam,
            "precision": rep.precision,
            "grid": {"lo": cfg.grid[0], "hi": cfg.grid[1], "count": cfg.grid[2]},
            "parameters": {"n_max": rep.n_max, "k_max": rep.k_max, "tol": rep.tol},
            "verdict": rep.verdict,
            "evidence": rep.evidence,
            "summary": {"min_normalized": rep.min_normalized, "violation_count": len(rep.violations)},
            "violations": [_violation_json(v) for v in rep.violations],
        }))
    return EXIT_VIOLATION if rep.violations else EXIT_OK


def run_recover(cfg: RunConfig) -> int:
    fn = _load_function(cfg)
    try:
        rec = hausdorff.recover_measure(fn, cfg.lam, cfg.x, cfg.K, cfg.precision, tol=cfg.tol)
    except NotCompletelyMonotone as exc:
        print(f"NotCompletelyMonotone: {exc}", file=sys.stderr)
        j, k, value = exc.violation or (None, None, None)
        _emit(cfg, dumps({
            "command": "recover", "x": cfg.x, "lambda": cfg.lam, "K": cfg.K,
            "error": "NotCompletelyMonotone",
            "violation": {"j": j, "k": k, "value": value},
        }))
        return EXIT_VIOLATION
    body = rec.to_json(fmt=lambda v: v)
    if cfg.x2 is not None:
        body["consistency"] = hausdorff.base_point_consistency(
            fn, cfg.lam, cfg.x, cfg.x2, cfg.K, cfg.precision).to_json()
    if cfg.fmt == "csv":
        rows = [["C", "", rec.C_hat]] + [["atom", t, w] for t, w in rec.rho_atoms]
        _emit(cfg, csv_text(["kind", "t", "w"], rows))
    else:
        _emit(cfg, dumps(body))
    return EXIT_OK


def run_table(cfg: RunConfig) -> int:
    fn = _load_function(cfg)
    table = operators.f_table(fn, cfg.lam, cfg.x, cfg.n_max, cfg.k_max, cfg.precision)
    arith = resolve(table.precision)
    if cfg.fmt == "csv":
        header = [f"k={k}" for k in range(table.k_max + 1)]
        if cfg.out:
            table.write_csv(cfg.out, fmt=lambda v: dumps(v).strip())
        else:
            sys.stdout.write(csv_text(header, table.values))
    else:
        _emit(cfg, dumps({
            "command": "table", "function": fn.to_json(), "x": cfg.x, "lambda": cfg.lam,
            "precision": arith.name, "n_max": table.n_max, "k_max": table.k_max,
            "crosscheck": table.crosscheck, "values": table.values, "scales": table.scales,
        }))
    return EXIT_OK


def run_moments(cfg: RunConfig) -> int:
    fn = _load_function(cfg)
    arith = resolve(cfg.precision, cfg.K)
    c = hausdorff.moment_sequence_at(fn, cfg.lam, cfg.x, cfg.K, arith)
    tol = arith.eps_rel if cfg.tol is None else cfg.tol
    verdict = hausdorff.is_cm_sequence(c, tol, arith, relative=True)
    if cfg.fmt == "csv":
        _emit(cfg, csv_text(["n", "c_n"], [[n, v] for n, v in enumerate(c.entries)]))
    else:
        v = verdict.violation
        _emit(cfg, dumps({
            "command": "moments", "function": fn.to_json(), "x": cfg.x, "lambda": cfg.lam,
            "precision": arith.name, "moments": list(c.entries),
            "completely_monotone": verdict.ok,
            "violation": None if v is None else {"n": v[0], "k": v[1], "value": v[2]},
        }))
    return EXIT_OK if verdict.ok else EXIT_VIOLATION


def run_limits(cfg: RunConfig) -> int:
    fn = _load_function(cfg)
    rep = classify.limit_checks(fn, cfg.x, cfg.n, cfg.k, precision=cfg.precision)
    if cfg.fmt == "csv":
        rows = [["large", r.lam, r.value, r.target, r.gap] for r in rep.large]
        rows += [["small_F01", r.lam, r.value, r.target, r.gap] for r in rep.small_01]
        rows += [["small_F10", r.lam, r.value, r.target, r.gap] for r in rep.small_10]
        _emit(cfg, csv_text(["family", "lambda", "value", "target", "gap"], rows))
    else:
        body = {"command": "limits", "function": fn.to_json()}
        body.update(rep.to_json(fmt=lambda v: v))
        _emit(cfg, dumps(body))
    return EXIT_OK


KERNEL_SWEEP_X = (0.5, 1.0, 2.0)
KERNEL_SWEEP_T = (0.0, 1.0, 10.0)
KERNEL_SWEEP_PAIRS = ((1.0, 2.0), (0.5, 1.5))


def run_verify_kernel(cfg: RunConfig) -> int:
    tol = classify.EMBEDDING_TOL if cfg.tol is None else cfg.tol
    rows = []
    for lam, lam2 in KERNEL_SWEEP_PAIRS:
        for x in KERNEL_SWEEP_X:
            for t in KERNEL_SWEEP_T:
                rows.append([lam, lam2, x, t, classify.kernel_embedding_residual(lam, lam2, x, t)])
    worst = max(abs(r[-1]) for r in rows)
    if cfg.fmt == "csv":
        _emit(cfg, csv_text(["lambda", "lambda_prime", "x", "t", "residual"], rows))
    else:
        _emit(cfg, dumps({
            "command": "verify-kernel", "tol": tol, "max_abs_residual": worst,
            "passed": worst <= tol,
            "rows": [dict(zip(["lambda", "lambda_prime", "x", "t", "residual"], r)) for r in rows],
        }))
    return EXIT_OK if worst <= tol else EXIT_VIOLATION


COMMANDS = {
    "classify": run_classify,
    "recover": run_recover,
    "table": run_table,
    "moments": run_moments,
    "limits": run_limits,
    "verify-kernel": run_verify_kernel,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stieltjes", description="Classify and reconstruct generalized Stieltjes functions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_fn=True):
        if needs_fn:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--expr", help="expression in x, e.g. 'exp(-x)'")
            src.add_argument("--measure", metavar="PATH", help="MeasureSpec or FunctionSpec JSON file")
            p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="order lambda > 0")
        p.add_argument("--precision", choices=["f64", "extended", "auto"], default=None,
                       help="arithmetic (default: $STIELTJES_PRECISION, else auto)")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
        p.add_argument("--tol", type=float, default=None, help="relative tolerance (times cancellation scale)")

    p = sub.add_parser("classify", help="run a membership test over a grid")
    common(p)
    p.add_argument("--test", choices=["b", "c", "cm", "pick"], default="b")
    p.add_argument("--grid", type=parse_grid, default=classify.DEFAULT_GRID, metavar="LO:HI:COUNT")
    p.add_argument("--nmax", dest="n_max", type=int)
    p.add_argument("--kmax", dest="k_max", type=int)

    p = sub.add_parser("recover", help="reconstruct (C, rho) from the moment sequence at x")
    common(p)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--x2", type=float, default=None, help="second base point for a consistency check")
    p.add_argument("--K", type=int, default=hausdorff.DEFAULT_DEPTH)

    p = sub.add_parser("table", help="dump F^[lambda]_{n,k}(x)")
    common(p)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--nmax", dest="n_max", type=int)
    p.add_argument("--kmax", dest="k_max", type=int)

    p = sub.add_parser("moments", help="dump the moment sequence at x and test it")
    common(p)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--K", type=int, default=16, help="last moment index")

    p = sub.add_parser("limits", help="large- and small-lambda limits of F^[lambda]_{n,k}(x)")
    common(p)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--k", type=int, default=1)

    p = sub.add_parser("verify-kernel", help="embedding-integral residual sweep")
    common(p, needs_fn=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    try:
        cfg = RunConfig(**fields)
        return COMMANDS[cfg.command](cfg)
    except (StieltjesError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
