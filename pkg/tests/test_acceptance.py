"""Acceptance criteria, one test each, at their stated tolerances."""

import random
import time

import pytest

from quadroot import bench
from quadroot.analysis import (
    error_constant_m4,
    error_constant_m8,
    measured_error_ratio,
    taylor_coefficients,
)
from quadroot.baseline import TABLE1, TABLE2
from quadroot.mp_scalar import PrecisionContext, format_scientific
from quadroot.problems import PROBLEMS, polynomial_problem
from quadroot.quadrature import (
    approx_dfy,
    approx_dfz,
    dfy_from_weights,
    dfz_from_weights,
    solve_nu,
    solve_omega,
)
from quadroot.solvers import ORDER, MethodId, Status, solve

DIGITS = 2048
SEED = 20240611


@pytest.fixture(scope="module")
def grid():
    start = time.perf_counter()
    report = bench.run_benchmark(bench.BenchmarkConfig())
    return report, time.perf_counter() - start


def _trace_text(cell):
    steps = ", ".join(format_scientific(s, 2) for s in cell.step_sizes)
    return f"status={cell.status.value} iterations={cell.iterations} steps=[{steps}]"


def test_table1_evaluation_counts(grid, verdict):
    report, elapsed = grid
    assert len(report.cells) == 60
    bad = []
    for c in report.cells:
        want = TABLE1[c.problem][c.method][0]
        if c.total_evals != want:
            bad.append(f"{c.method.label}/{c.problem} got {c.total_evals} want {want} ({_trace_text(c)})")
    for line in bad:
        print("  mismatch", line)
    verdict(
        "1 Table 1 evaluation counts",
        not bad and elapsed < 120,
        f"{60 - len(bad)}/60 cells match, grid ran in {elapsed:.1f}s"
        + (f"; mismatches: {'; '.join(b.split(' (')[0] for b in bad)}" if bad else ""),
    )


def test_table1_coc(grid, verdict):
    report, _ = grid
    bad = []
    for c in report.cells:
        want = TABLE1[c.problem][c.method][1]
        if c.coc is None:
            bad.append(f"{c.method.label}/{c.problem} COC undefined want {want}")
        elif abs(c.coc - want) > 0.5:
            bad.append(f"{c.method.label}/{c.problem} got {float(c.coc):.2f} want {want}")
    print(bench.emit_discrepancies(report))
    verdict(
        "2 Table 1 COC within 0.5",
        not bad,
        f"{60 - len(bad)}/60 cells within tolerance" + (f"; outside: {'; '.join(bad)}" if bad else ""),
    )


def test_table2_step_sizes(grid, verdict):
    report, _ = grid
    cols = bench.table2_columns(report)
    bad = []
    for pid, want in TABLE2.items():
        got = cols[pid]
        if len(got) != len(want):
            bad.append(f"{pid} has {len(got)} rows, want {len(want)}")
        for n, (g, w) in enumerate(zip(got, want), start=1):
            if g != w:
                bad.append(f"{pid} row {n} got {g} want {w}")
    verdict(
        "3 Table 2 M-8 step sizes",
        not bad,
        f"{sum(len(v) for v in TABLE2.values()) - len(bad)}/{sum(len(v) for v in TABLE2.values())} entries match"
        + (f"; {'; '.join(bad)}" if bad else ""),
    )


def _rel(a, b):
    return abs(a - b) / abs(b)


def _random_nodes(rng, ctx, k):
    while True:
        # thousandths are not dyadic, so the node arithmetic actually rounds
        nodes = sorted(ctx.mpf(rng.randint(-3000, 3000)) / 1000 for _ in range(k))
        if all(b - a > 0.1 for a, b in zip(nodes, nodes[1:])):
            rng.shuffle(nodes)
            return nodes


def test_polynomial_exactness(verdict):
    ctx = PrecisionContext(DIGITS)
    rng = random.Random(SEED)
    tol = ctx.power_of_ten(-DIGITS + 24)
    worst = ctx.mpf(0)
    trials = 0
    while trials < 50:
        x, y, z = _random_nodes(rng, ctx, 3)
        q = polynomial_problem([rng.randint(-50, 50) for _ in range(rng.randint(1, 3))])
        c = polynomial_problem([rng.randint(-50, 50) for _ in range(rng.randint(1, 4))])
        if abs(q.df(y)) < 1e-3 or abs(c.df(z)) < 1e-3:
            continue
        trials += 1
        e1 = _rel(approx_dfy(q.f(x), q.f(y), q.df(x), x, y), q.df(y))
        e2 = _rel(approx_dfz(c.f(x), c.f(y), c.f(z), c.df(x), x, y, z), c.df(z))
        worst = max(worst, e1, e2)
    verdict("4 polynomial exactness", worst < tol, f"50 trials, worst relative error {format_scientific(worst, 2) if worst else '0'}")


def test_weight_system_equivalence(verdict):
    ctx = PrecisionContext(DIGITS)
    rng = random.Random(SEED + 1)
    tol = ctx.power_of_ten(-DIGITS + 24)
    worst = ctx.mpf(0)
    for _ in range(100):
        x, y, z = _random_nodes(rng, ctx, 3)
        fx, fy, fz, dfx = (ctx.mpf(rng.uniform(-5, 5)) for _ in range(4))
        w = solve_omega(x, y)
        closed = (-2 / (y - x), 2 / (y - x), ctx.mpf(-2))
        worst = max([worst] + [_rel(a, b) for a, b in zip((w.w1, w.w2, w.w3), closed)])
        worst = max(worst, _rel(dfy_from_weights(w, fx, fy, dfx), approx_dfy(fx, fy, dfx, x, y)))
        v = solve_nu(x, y, z)
        worst = max(worst, _rel(dfz_from_weights(v, fx, fy, fz, dfx), approx_dfz(fx, fy, fz, dfx, x, y, z)))
    verdict("5 weight-system equivalence", worst < tol, f"100 node sets, worst relative error {format_scientific(worst, 2) if worst else '0'}")


def test_theorem_error_constants(verdict):
    ctx = PrecisionContext(DIGITS)
    quad = polynomial_problem([-6, 1, 1], x0="3")
    k4 = error_constant_m4(*taylor_coefficients(quad, ctx.mpf(2), 3))
    _, r4 = measured_error_ratio(solve(MethodId.M4, quad, "3", ctx=ctx).iterates, 2, 4)
    cubic = polynomial_problem([-2, 3, -2, 1], x0="1.5")
    k8 = error_constant_m8(*taylor_coefficients(cubic, ctx.mpf(1), 4))
    _, r8 = measured_error_ratio(solve(MethodId.M8, cubic, "1.5", ctx=ctx).iterates, 1, 8)
    d4, d8 = abs(r4 / k4 - 1), abs(r8 / k8 - 1)
    ok = abs(k4 - ctx.mpf(1) / 125) < ctx.tiny(600) and d4 < 0.05 and d8 < 0.05
    verdict(
        "6 error constants",
        ok,
        f"M-4 K={format_scientific(k4, 4)} measured {format_scientific(r4, 4)}; "
        f"M-8 K={format_scientific(k8, 4)} measured {format_scientific(r8, 4)}",
    )


def test_order_law(grid, verdict):
    report, _ = grid
    bad, checked = [], 0
    for c in report.cells:
        if c.status is not Status.CONVERGED or c.method in (MethodId.RWB, MethodId.WKL) or c.problem == "f4":
            continue
        checked += 1
        if c.coc is None or c.coc < ORDER[c.method] - 0.5:
            bad.append(f"{c.method.label}/{c.problem} rho={c.coc}")
    verdict("7 order law", not bad and checked, f"{checked} cells checked" + (f"; below order: {'; '.join(bad)}" if bad else ""))


def test_affine_one_step(verdict):
    ctx = PrecisionContext(DIGITS)
    rng = random.Random(SEED + 2)
    bad = []
    for _ in range(5):
        slope = rng.choice([-1, 1]) * rng.randint(1, 10**6)
        root = rng.randint(-10**6, 10**6)
        x0 = str(rng.uniform(-1e6, 1e6))
        p = polynomial_problem([-slope * root, slope], "affine")
        for m in MethodId:
            t = solve(m, p, x0, ctx=ctx)
            if not (t.status is Status.CONVERGED and t.iterates[1] == root and t.residuals[0] == 0):
                bad.append(f"{m.label} slope={slope} root={root} x0={x0}")
    verdict("8 affine one-step", not bad, f"50 solves, first iterate exact in {50 - len(bad)}" + (f"; {'; '.join(bad)}" if bad else ""))
