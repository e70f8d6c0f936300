"""``bench`` command line: run the grid, render tables, inspect one solve."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .analysis import convergence_report
from .mp_scalar import PrecisionContext, format_scientific
from .problems import get_problem, reference_root
from .solvers import StoppingCriteria, Status, get_method, solve

EXIT_OK, EXIT_UNCONVERGED, EXIT_USAGE = 0, 1, 2


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _x0_overrides(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise bench.ConfigError(f"--x0 expects PROBLEM=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().lower()] = v.strip()
    return out


def cmd_run(args) -> int:
    layers = []
    if args.config:
        layers.append(bench.parse_config_text(Path(args.config).read_text()))
    layers.append(
        {
            "methods": bench._split_list(args.methods) if args.methods else None,
            "problems": bench._split_list(args.problems) if args.problems else None,
            "digits": args.digits,
            "epsilon": args.epsilon,
            "max_iterations": args.max_iters,
            "format": args.format,
            "sig_digits": args.sig_digits,
            "timestamp": args.timestamp,
            "x0": _x0_overrides(args.x0),
        }
    )
    cfg = bench.build_config(*layers).validated()
    report = bench.run_benchmark(cfg)
    _write(bench.emit_report(report, cfg.format, cfg.sig_digits), args.out)
    return EXIT_OK if report.all_converged else EXIT_UNCONVERGED


def _load(path) -> bench.BenchmarkReport:
    return bench.report_from_json(Path(path).read_text())


def cmd_table1(args) -> int:
    _write(bench.emit_table1(_load(args.report), args.format), args.out)
    return EXIT_OK


def cmd_table2(args) -> int:
    _write(bench.emit_table2(_load(args.report), args.format, args.sig_digits, rounded=args.rounded), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    ctx = PrecisionContext(args.digits)
    method = get_method(args.method)
    p = get_problem(args.problem)
    x0 = args.x0 or p.default_x0
    trace = solve(method, p, x0, stop=StoppingCriteria(args.epsilon, args.max_iters), ctx=ctx)
    rep = convergence_report(trace, reference_root(p, ctx))
    lines = [f"{method.label} on {p.id} ({p.description}) from x0 = {x0}"]
    lines.append(f"{'n':>3}  {'|x_{n+1} - x_n|':>22}  {'|f(x_{n+1})|':>22}")
    for n, (s, r) in enumerate(zip(trace.step_sizes, trace.residuals)):
        lines.append(f"{n:>3}  {format_scientific(s, args.sig_digits):>22}  {format_scientific(r, args.sig_digits):>22}")
    coc = "undefined" if rep.coc is None else format_scientific(rep.coc, 6)
    lines.append(f"status: {trace.status.value}  evaluations: {trace.evals.total}  COC: {coc}")
    if trace.message:
        lines.append(f"note: {trace.message}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if trace.status is Status.CONVERGED else EXIT_UNCONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the method x problem grid")
    run.add_argument("--config", help="key = value config file; flags override it")
    run.add_argument("--methods", help="comma-separated method ids (nm,m4,m8,lmm,rwb,wkl,neta,ch,hm,cm)")
    run.add_argument("--problems", help="comma-separated problem ids (f1..f6)")
    run.add_argument("--digits", type=int)
    run.add_argument("--epsilon")
    run.add_argument("--max-iters", type=int)
    run.add_argument("--format", choices=bench.FORMATS)
    run.add_argument("--sig-digits", type=int)
    run.add_argument("--x0", action="append", metavar="PROBLEM=VALUE", help="override a starting point")
    run.add_argument("--timestamp", help="timestamp recorded in the report metadata")
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    for name, func in (("table1", cmd_table1), ("table2", cmd_table2)):
        t = sub.add_parser(name, help=f"render {name} from a stored json report")
        t.add_argument("report")
        t.add_argument("--format", choices=bench.FORMATS, default="markdown")
        t.add_argument("--out")
        if name == "table2":
            t.add_argument("--sig-digits", type=int, default=2)
            t.add_argument("--rounded", action="store_true", help="round half-even instead of truncating")
        t.set_defaults(func=func)

    s = sub.add_parser("solve", help="print a single iteration trace")
    s.add_argument("method")
    s.add_argument("problem")
    s.add_argument("--x0")
    s.add_argument("--digits", type=int, default=2048)
    s.add_argument("--epsilon", default="1e-320")
    s.add_argument("--max-iters", type=int, default=100)
    s.add_argument("--sig-digits", type=int, default=2)
    s.set_defaults(func=cmd_solve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (bench.ConfigError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
