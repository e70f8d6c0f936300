"""Method x problem benchmark grid and its table renderings."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field, replace
from decimal import Decimal

from . import baseline
from .analysis import ConvergenceReport, convergence_report
from .mp_scalar import PrecisionContext, format_scientific, leading_digits, parse_scalar
from .problems import PROBLEMS, ROOT_CHOICE_NOTES, get_problem, reference_root
from .solvers import TABLE_ORDER, MethodId, MethodParams, Status, StoppingCriteria, get_method, solve

log = logging.getLogger(__name__)

FORMATS = ("markdown", "csv", "json")
CSV_HEADER = ["method", "problem", "x0", "evals", "coc", "iterations", "status"]
COC_TOLERANCE = 0.5
# digits kept for COC and step sizes in csv/json output
STORED_DIGITS = 30

COC_RULE = (
    "COC = log|e[n+1]/e[n]| / log|e[n]/e[n-1]| over the latest three iterates whose errors "
    "are resolved above the working-precision noise floor (the window slides back when the "
    "final iterate equals the root to full precision)"
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchmarkConfig:
    methods: tuple = tuple(TABLE_ORDER)
    problems: tuple = tuple(PROBLEMS)
    x0: dict = field(default_factory=dict)
    digits: int = 2048
    epsilon: str = "1e-320"
    max_iterations: int = 100
    params: MethodParams = field(default_factory=MethodParams)
    format: str = "markdown"
    sig_digits: int = 2
    timestamp: str | None = None

    def validated(self) -> "BenchmarkConfig":
        if not self.methods:
            raise ConfigError("no methods requested")
        if not self.problems:
            raise ConfigError("no problems requested")
        try:
            methods = tuple(get_method(m) for m in self.methods)
            problems = tuple(get_problem(p).id for p in self.problems)
            for pid in self.x0:
                get_problem(pid)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected one of {', '.join(FORMATS)}")
        if self.sig_digits < 1:
            raise ConfigError("sig_digits must be >= 1")
        try:
            PrecisionContext(self.digits)
            StoppingCriteria(self.epsilon, self.max_iterations)
            self.params.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if Decimal(self.epsilon) <= Decimal("1e-320") and self.digits < 700:
            log.warning("epsilon %s with only %d digits: residuals may never resolve below epsilon", self.epsilon, self.digits)
        return replace(self, methods=methods, problems=problems)

    def start(self, problem_id: str) -> str:
        return self.x0.get(problem_id, get_problem(problem_id).default_x0)


@dataclass
class BenchmarkReport:
    cells: list
    metadata: dict

    def cell(self, method, problem_id) -> ConvergenceReport | None:
        method = get_method(method)
        for c in self.cells:
            if c.method is method and c.problem == problem_id:
                return c
        return None

    @property
    def methods(self) -> list:
        seen = []
        for c in self.cells:
            if c.method not in seen:
                seen.append(c.method)
        return seen

    @property
    def problems(self) -> list:
        seen = []
        for c in self.cells:
            if c.problem not in seen:
                seen.append(c.problem)
        return seen

    @property
    def all_converged(self) -> bool:
        return all(c.status is Status.CONVERGED for c in self.cells)


def run_benchmark(cfg: BenchmarkConfig) -> BenchmarkReport:
    cfg = cfg.validated()
    ctx = PrecisionContext(cfg.digits)
    stop = StoppingCriteria(cfg.epsilon, cfg.max_iterations)
    cells = []
    for pid in cfg.problems:
        p = get_problem(pid)
        gamma = reference_root(p, ctx)
        for m in cfg.methods:
            trace = solve(m, p, cfg.start(pid), cfg.params, stop, ctx)
            report = convergence_report(trace, gamma)
            report.x0 = cfg.start(pid)
            cells.append(report)
    metadata = {
        "digits": cfg.digits,
        "epsilon": cfg.epsilon,
        "max_iterations": cfg.max_iterations,
        "params": cfg.params.as_dict(),
        "timestamp": cfg.timestamp,
        "coc_rule": COC_RULE,
        "root_choice": {pid: note for pid, note in ROOT_CHOICE_NOTES.items() if pid in cfg.problems},
    }
    return BenchmarkReport(cells, metadata)


# -- formatting ------------------------------------------------------------

def _coc_display(rho) -> str:
    if rho is None:
        return "-"
    r = float(rho)
    if abs(r - round(r)) <= 0.1:
        return str(int(round(r)))
    return f"{r:.1f}"


def _stored(v) -> str:
    return "" if v is None else format_scientific(v, STORED_DIGITS)


def cell_text(c: ConvergenceReport) -> str:
    text = f"({c.total_evals}, {_coc_display(c.coc)})"
    if c.status is not Status.CONVERGED:
        text += f" {c.status.value}"
    return text


def emit_table1(report: BenchmarkReport, fmt: str = "markdown") -> str:
    """(functional evaluations, COC) per problem and method."""
    if fmt == "markdown":
        methods = report.methods or list(TABLE_ORDER)
        lines = [
            "| f(x) | x0 | " + " | ".join(m.label for m in methods) + " |",
            "|" + "---|" * (len(methods) + 2),
        ]
        for pid in report.problems:
            row = [pid, str(next(c.x0 for c in report.cells if c.problem == pid))]
            for m in methods:
                c = report.cell(m, pid)
                row.append(cell_text(c) if c else "")
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in report.cells:
            w.writerow([c.method.value, c.problem, c.x0, c.total_evals, _stored(c.coc), c.iterations, c.status.value])
        return buf.getvalue()
    if fmt == "json":
        rows = [
            {"method": c.method.value, "problem": c.problem, "x0": c.x0, "evals": c.total_evals,
             "coc": _stored(c.coc) or None, "iterations": c.iterations, "status": c.status.value}
            for c in report.cells
        ]
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def table2_columns(report: BenchmarkReport, method=MethodId.M8, sig_digits: int = 2, rounded: bool = False) -> dict[str, list[str]]:
    render = format_scientific if rounded else leading_digits
    cols = {}
    for pid in report.problems:
        c = report.cell(method, pid)
        if c is not None:
            cols[pid] = [render(s, sig_digits) for s in c.step_sizes]
    return cols


def emit_table2(
    report: BenchmarkReport, fmt: str = "markdown", sig_digits: int = 2, method=MethodId.M8, rounded: bool = False
) -> str:
    """Successive step sizes |x_{n+1} - x_n| of one method, one column per problem.

    Entries show the leading ``sig_digits`` digits (truncated) unless
    ``rounded`` asks for round-half-even.
    """
    cols = table2_columns(report, method, sig_digits, rounded)
    depth = max((len(v) for v in cols.values()), default=0)
    grid = [[col[i] if i < len(col) else baseline.PLACEHOLDER for col in cols.values()] for i in range(depth)]
    if fmt == "markdown":
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(r) + " |" for r in grid]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", *cols])
        for i, r in enumerate(grid, start=1):
            w.writerow([i, *r])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(cols, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


# -- comparison with the published values ----------------------------------

@dataclass
class Discrepancy:
    table: str
    method: str
    problem: str
    field: str
    ours: str
    published: str


def table1_discrepancies(report: BenchmarkReport) -> list[Discrepancy]:
    out = []
    for c in report.cells:
        ref = baseline.TABLE1.get(c.problem, {}).get(c.method)
        if ref is None or c.x0 != baseline.X0[c.problem]:
            continue
        evals, rho = ref
        if c.total_evals != evals:
            out.append(Discrepancy("1", c.method.value, c.problem, "evals", str(c.total_evals), str(evals)))
        if c.coc is None or abs(float(c.coc) - rho) > COC_TOLERANCE:
            out.append(Discrepancy("1", c.method.value, c.problem, "coc", _coc_display(c.coc) if c.coc is None else f"{float(c.coc):.2f}", str(rho)))
    return out


def table2_discrepancies(report: BenchmarkReport) -> list[Discrepancy]:
    """Compare the first two significant digits (truncated) and the exponent."""
    out = []
    for pid, published in baseline.TABLE2.items():
        c = report.cell(MethodId.M8, pid)
        if c is None or c.x0 != baseline.X0[pid]:
            continue
        ours = table2_columns(report, sig_digits=2)[pid]
        for i in range(max(len(ours), len(published))):
            a = ours[i] if i < len(ours) else baseline.PLACEHOLDER
            b = published[i] if i < len(published) else baseline.PLACEHOLDER
            if a != b:
                out.append(Discrepancy("2", "m8", pid, f"step {i + 1}", a, b))
    return out


def emit_discrepancies(report: BenchmarkReport) -> str:
    rows = table1_discrepancies(report) + table2_discrepancies(report)
    if not rows:
        return "No discrepancies against the published tables.\n"
    lines = ["| table | method | problem | field | ours | published |", "|---|---|---|---|---|---|"]
    lines += [f"| {d.table} | {d.method} | {d.problem} | {d.field} | {d.ours} | {d.published} |" for d in rows]
    return "\n".join(lines) + "\n"


def emit_markdown_report(report: BenchmarkReport, sig_digits: int = 2) -> str:
    md = report.metadata
    parts = [
        "# Benchmark report\n",
        f"precision: {md['digits']} digits, epsilon: {md['epsilon']}, max iterations: {md['max_iterations']}\n",
        "parameters: " + ", ".join(f"{k}={v}" for k, v in md["params"].items()) + "\n",
        "## (functional evaluations, COC)\n",
        emit_table1(report, "markdown"),
    ]
    if any(c.method is MethodId.M8 for c in report.cells):
        parts += ["## M-8 step sizes |x_{n+1} - x_n|\n", emit_table2(report, "markdown", sig_digits)]
    parts += ["## Discrepancies\n", emit_discrepancies(report), "## Notes\n", f"- {md['coc_rule']}\n"]
    parts += [f"- {pid}: {note}\n" for pid, note in md.get("root_choice", {}).items()]
    failed = [c for c in report.cells if c.status is not Status.CONVERGED]
    parts += [f"- {c.method.label} on {c.problem}: {c.status.value} {c.message}\n" for c in failed]
    return "\n".join(parts)


# -- persistence -----------------------------------------------------------

def report_to_json(report: BenchmarkReport) -> str:
    cells = [
        {
            "method": c.method.value,
            "problem": c.problem,
            "x0": c.x0,
            "evals": c.total_evals,
            "coc": _stored(c.coc) or None,
            "iterations": c.iterations,
            "status": c.status.value,
            "message": c.message,
            "step_sizes": [_stored(s) for s in c.step_sizes],
        }
        for c in report.cells
    ]
    return json.dumps({"metadata": report.metadata, "cells": cells}, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> BenchmarkReport:
    data = json.loads(text)
    ctx = PrecisionContext(int(data["metadata"]["digits"]))
    cells = []
    for d in data["cells"]:
        cells.append(
            ConvergenceReport(
                method=get_method(d["method"]),
                problem=d["problem"],
                x0=d["x0"],
                total_evals=int(d["evals"]),
                coc=parse_scalar(d["coc"], ctx) if d.get("coc") else None,
                step_sizes=[parse_scalar(s, ctx) for s in d["step_sizes"]],
                status=Status(d["status"]),
                iterations=int(d["iterations"]),
                message=d.get("message", ""),
            )
        )
    return BenchmarkReport(cells, data["metadata"])


def emit_report(report: BenchmarkReport, fmt: str, sig_digits: int = 2) -> str:
    if fmt == "json":
        return report_to_json(report)
    if fmt == "csv":
        return emit_table1(report, "csv")
    if fmt == "markdown":
        return emit_markdown_report(report, sig_digits)
    raise ValueError(f"unknown format {fmt!r}")


# -- config files ----------------------------------------------------------

_INT_KEYS = {"digits", "max_iterations", "sig_digits"}
_PARAM_KEYS = set(MethodParams().as_dict())


def _split_list(value: str) -> tuple:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines with ``#`` comments.

    ``x0.<problem> = value`` overrides one starting point.
    """
    values: dict = {}
    x0: dict = {}
    params: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key.startswith("x0."):
            x0[key[3:]] = value
        elif key in ("methods", "problems"):
            values[key] = _split_list(value)
        elif key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from None
        elif key in _PARAM_KEYS:
            params[key] = value
        elif key in ("epsilon", "format", "timestamp"):
            values[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if x0:
        values["x0"] = x0
    if params:
        values["params"] = params
    return values


def build_config(*layers: dict) -> BenchmarkConfig:
    """Merge config layers, later ones winning."""
    merged: dict = {}
    x0: dict = {}
    params: dict = {}
    for layer in layers:
        for k, v in layer.items():
            if v is None:
                continue
            if k == "x0":
                x0.update(v)
            elif k == "params":
                params.update(v)
            else:
                merged[k] = v
    return BenchmarkConfig(x0=x0, params=MethodParams(**params), **merged)
