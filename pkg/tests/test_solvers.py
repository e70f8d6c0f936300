import pytest
from hypothesis import given, settings, strategies as st

from quadroot.mp_scalar import PrecisionContext
from quadroot.problems import PROBLEMS, EvalCounter, polynomial_problem, reference_root
from quadroot.solvers import (
    COST,
    STEPS,
    MethodId,
    MethodParams,
    Status,
    StoppingCriteria,
    get_method,
    solve,
    step_m4,
    step_nm,
)

ALL = list(MethodId)


def affine(slope, root):
    # slope * (t - root)
    return polynomial_problem([-slope * root, slope], "affine")


@pytest.mark.parametrize("method", ALL)
def test_step_cost_is_fixed(ctx100, method):
    for pid in ("f1", "f3", "f6"):
        p = PROBLEMS[pid]
        c = EvalCounter()
        STEPS[method](p, ctx100.mpf(p.default_x0), c, MethodParams())
        assert c.total == COST[method]
        assert c.n_check == 0


@pytest.mark.parametrize("method", ALL)
def test_linear_exact_in_one_step(ctx, method):
    p = affine(1, 2)
    x1 = STEPS[method](p, ctx.mpf(5), EvalCounter(), MethodParams())
    assert x1 == 2


def test_nm_halves_on_double_root(ctx):
    assert step_nm(polynomial_problem([0, 0, 1]), ctx.mpf(1), EvalCounter()) == ctx.mpf("0.5")


def test_m4_exact_on_linear(ctx):
    assert step_m4(affine(1, 2), ctx.mpf(5), EvalCounter()) == 2


def double_newton(p, x):
    y = x - p.f(x) / p.df(x)
    return y - p.f(y) / p.df(y)


def test_m4_on_t2_minus_4_is_fourth_order(ctx):
    # t^2 - 4 at gamma = 2: c1 = 4, c2 = 1, c3 = 0, so K = 1/64
    p = polynomial_problem([-4, 0, 1])
    x = ctx.mpf(3)
    errs = []
    for _ in range(4):
        x = step_m4(p, x, EvalCounter())
        errs.append(x - 2)
    ratio = errs[-1] / errs[-2] ** 4
    assert abs(ratio - ctx.mpf(1) / 64) < ctx.mpf("0.05") / 64


def test_m4_tracks_double_newton_when_c3_vanishes(ctx):
    # t^2 + t - 6: both schemes have leading error (c2/c1)^3 e^4 = e^4 / 125
    p = polynomial_problem([-6, 1, 1])
    for e0 in ("1e-5", "1e-20", "1e-80"):
        x = 2 + ctx.mpf(e0)
        a = step_m4(p, x, EvalCounter()) - 2
        b = double_newton(p, x) - 2
        assert abs(a / b - 1) < 100 * ctx.mpf(e0)


@pytest.mark.parametrize(
    "method, pid, iterations, evals",
    [
        (MethodId.M8, "f1", 4, 16),
        (MethodId.M4, "f1", 6, 18),
        (MethodId.NM, "f1", 10, 20),
        (MethodId.LMM, "f1", 4, 24),
        (MethodId.NETA, "f1", 5, 20),
        (MethodId.CH, "f1", 5, 20),
        (MethodId.RWB, "f1", 5, 20),
        (MethodId.WKL, "f1", 5, 20),
        (MethodId.HM, "f3", 7, 21),
        (MethodId.CM, "f3", 7, 21),
        (MethodId.M8, "f6", 5, 20),
        (MethodId.RWB, "f6", 5, 20),
        (MethodId.HM, "f6", 8, 24),
    ],
)
def test_reproducible_cells(ctx, method, pid, iterations, evals):
    p = PROBLEMS[pid]
    t = solve(method, p, p.default_x0, ctx=ctx)
    assert t.status is Status.CONVERGED
    assert (t.iterations, t.evals.total) == (iterations, evals)


@pytest.mark.parametrize("method", ALL)
@pytest.mark.parametrize("pid", sorted(PROBLEMS))
def test_trace_invariants(ctx, method, pid):
    p = PROBLEMS[pid]
    t = solve(method, p, p.default_x0, ctx=ctx)
    n = len(t.iterates) - 1
    assert len(t.step_sizes) == len(t.residuals) == n
    assert t.evals.total == COST[method] * n
    assert t.evals.n_check == n
    eps = ctx.power_of_ten(-320)
    assert t.status is Status.CONVERGED
    assert t.step_sizes[-1] < eps and t.residuals[-1] < eps
    assert all(not (s < eps and r < eps) for s, r in zip(t.step_sizes[:-1], t.residuals[:-1]))


def test_m8_f6_last_step_resolves_degenerate_nodes(ctx):
    # the fifth step lands y and z on the same representable point
    p = PROBLEMS["f6"]
    t = solve(MethodId.M8, p, "1.2", ctx=ctx)
    assert t.status is Status.CONVERGED
    assert t.iterations == 5
    assert ctx.power_of_ten(-1571) < t.step_sizes[-1] < ctx.power_of_ten(-1569)


def test_linear_solve_needs_confirming_step(ctx):
    t = solve(MethodId.NM, affine(3, -1), "7", ctx=ctx)
    assert t.iterates[1] == -1
    assert t.residuals[0] == 0
    assert t.status is Status.CONVERGED and t.iterations == 2
    assert t.step_sizes[1] == 0


def test_max_iterations_status(ctx100):
    t = solve(MethodId.NM, PROBLEMS["f1"], "1.2", stop=StoppingCriteria("1e-50", 2), ctx=ctx100)
    assert t.status is Status.MAX_ITERATIONS and t.iterations == 2


def test_zero_derivative_is_degenerate(ctx100):
    # f(t) = t^2 - 1 at x = 0: f'(0) = 0
    t = solve(MethodId.M8, polynomial_problem([-1, 0, 1]), "0", ctx=ctx100)
    assert t.status is Status.DEGENERATE
    assert t.iterations == 0


def test_divergence_detected(ctx, ctx100):
    # arctan from 1.5: Newton overshoots with growing amplitude
    t = solve(MethodId.NM, PROBLEMS["f4"], "1.5", ctx=ctx)
    assert t.status is Status.DIVERGED
    assert abs(t.iterates[-1]) < 10**100
    # at 100 digits f'(x) = 1/(1+x^2) hits the noise floor first
    t = solve(MethodId.NM, PROBLEMS["f4"], "1.5", ctx=ctx100)
    assert t.status is Status.DEGENERATE


def test_parameter_validation(ctx100):
    with pytest.raises(ValueError):
        solve(MethodId.RWB, PROBLEMS["f1"], "1.2", MethodParams(a="0"), ctx=ctx100)
    with pytest.raises(ValueError):
        solve(MethodId.WKL, PROBLEMS["f1"], "1.2", MethodParams(alpha="1", beta="-1"), ctx=ctx100)
    with pytest.raises(ValueError):
        StoppingCriteria("0")
    with pytest.raises(ValueError):
        StoppingCriteria("1e-10", 0)


def test_method_ids():
    assert [m.value for m in MethodId] == ["nm", "m4", "m8", "lmm", "rwb", "wkl", "neta", "ch", "hm", "cm"]
    assert get_method("M-8") is MethodId.M8
    with pytest.raises(KeyError):
        get_method("secant")


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(ALL),
    st.integers(min_value=-10**6, max_value=10**6).filter(bool),
    st.integers(min_value=-10**6, max_value=10**6),
    st.integers(min_value=-10**6, max_value=10**6),
)
def test_affine_one_step_property(method, slope, root, start):
    ctx = PrecisionContext(200)
    p = polynomial_problem([-slope * root, slope])
    x1 = STEPS[method](p, ctx.mpf(start) / 7, EvalCounter(), MethodParams())
    assert abs(x1 - root) <= ctx.tiny(10) * max(1, abs(root))
