"""Iterative root-finding methods and the driver loop.

Each ``step_*`` function performs one iteration from ``x`` and charges every
functional evaluation it makes to ``counter``. Per-iteration costs are fixed
(see :data:`COST`); the driver checks this after each step.

A correction of the form ``F / D`` whose numerator ``F`` is a function value
that is exactly zero is taken to be zero. This is what happens once an
iterate hits the root at working precision: the remaining substeps are
evaluated (and counted) but move nothing.
"""

from __future__ import annotations

import enum
from decimal import Decimal, InvalidOperation
from dataclasses import dataclass, field

from .mp_scalar import PrecisionContext, is_finite, parse_scalar
from .problems import DomainError, EvalCounter, Kind, Problem, evaluate
from .quadrature import DegenerateNodesError, approx_dfy, approx_dfz


class MethodId(str, enum.Enum):
    NM = "nm"
    M4 = "m4"
    M8 = "m8"
    LMM = "lmm"
    RWB = "rwb"
    WKL = "wkl"
    NETA = "neta"
    CH = "ch"
    HM = "hm"
    CM = "cm"

    @property
    def label(self) -> str:
        return {"m4": "M-4", "m8": "M-8"}.get(self.value, self.value.upper())


COST = {
    MethodId.NM: 2, MethodId.M4: 3, MethodId.M8: 4, MethodId.LMM: 6, MethodId.RWB: 4,
    MethodId.WKL: 4, MethodId.NETA: 4, MethodId.CH: 4, MethodId.HM: 3, MethodId.CM: 3,
}

ORDER = {
    MethodId.NM: 2, MethodId.M4: 4, MethodId.M8: 8, MethodId.LMM: 16, MethodId.RWB: 6,
    MethodId.WKL: 6, MethodId.NETA: 6, MethodId.CH: 6, MethodId.HM: 3, MethodId.CM: 3,
}

# Column order of the benchmark tables.
TABLE_ORDER = [
    MethodId.HM, MethodId.CM, MethodId.LMM, MethodId.NM, MethodId.RWB,
    MethodId.NETA, MethodId.CH, MethodId.WKL, MethodId.M4, MethodId.M8,
]


def get_method(name) -> MethodId:
    if isinstance(name, MethodId):
        return name
    key = str(name).strip().lower().replace("-", "")
    try:
        return MethodId(key)
    except ValueError:
        raise KeyError(f"unknown method {name!r}; expected one of {', '.join(m.value for m in MethodId)}") from None


@dataclass(frozen=True)
class MethodParams:
    """Free parameters of the RWB, WKL, NETA and CH families."""

    a: str = "1"
    b: str = "1"
    c: str = "1"
    alpha: str = "1"
    beta: str = "1"
    a_neta: str = "10"
    beta_ch: str = "1"

    def validate(self):
        if float(self.a) == 0:
            raise ValueError("RWB requires a != 0")
        if float(self.alpha) + float(self.beta) == 0:
            raise ValueError("WKL requires alpha + beta != 0")

    def as_dict(self) -> dict[str, str]:
        return {k: getattr(self, k) for k in ("a", "b", "c", "alpha", "beta", "a_neta", "beta_ch")}


@dataclass(frozen=True)
class StoppingCriteria:
    epsilon: str = "1e-320"
    max_iterations: int = 100

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        try:
            positive = Decimal(self.epsilon) > 0
        except InvalidOperation:
            raise ValueError(f"malformed epsilon {self.epsilon!r}") from None
        if not positive:
            raise ValueError("epsilon must be positive")


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"
    DEGENERATE = "DegenerateStep"


class DegenerateStep(ArithmeticError):
    """A denominator vanished at working precision.

    ``point`` is the most advanced node reached inside the step and
    ``residual`` is ``|f(point)|`` when known, so the driver can still
    accept the step if that node already satisfies the tolerance.
    """

    def __init__(self, message, point=None, residual=None):
        super().__init__(message)
        self.point = point
        self.residual = residual


@dataclass
class IterationTrace:
    method: MethodId
    problem: str
    x0: object
    iterates: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    evals: EvalCounter = field(default_factory=EvalCounter)
    status: Status = Status.MAX_ITERATIONS
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1


# -- helpers ---------------------------------------------------------------

def _guard(den, scale, where, point=None, residual=None):
    mp = den.context
    if not mp.isfinite(den) or abs(den) <= mp.mpf(10) ** (8 - mp.dps) * scale:
        raise DegenerateStep(f"vanishing denominator in {where}", point, residual)


def _correction(num, den, where, scale=1, point=None, residual=None):
    """``num / den``; zero when ``num`` is exactly zero."""
    if num == 0:
        return num
    _guard(den, scale, where, point, residual)
    return num / den


def _mag(*values):
    return max([abs(v) for v in values] + [0]) or 1


def _f(p, x, counter):
    return evaluate(p, Kind.F, x, counter)


def _df(p, x, counter):
    return evaluate(p, Kind.DF, x, counter)


def _d2f(p, x, counter):
    return evaluate(p, Kind.D2F, x, counter)


def _newton_substep(p, x, counter):
    fx = _f(p, x, counter)
    dfx = _df(p, x, counter)
    return fx, dfx, x - _correction(fx, dfx, "f'(x)", point=x, residual=abs(fx))


# -- the methods -----------------------------------------------------------

def step_nm(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    return _newton_substep(p, x, counter)[2]


def _m4_substep(p, x, fx, dfx, y, counter):
    fy = _f(p, y, counter)
    if fy == 0:
        return fy, y
    try:
        dfy = approx_dfy(fx, fy, dfx, x, y)
    except DegenerateNodesError as exc:
        raise DegenerateStep("y coincides with x", y, abs(fy)) from exc
    return fy, y - _correction(fy, dfy, "f'(y) estimate", point=y, residual=abs(fy))


def step_m4(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    fx, dfx, y = _newton_substep(p, x, counter)
    return _m4_substep(p, x, fx, dfx, y, counter)[1]


def step_m8(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    fx, dfx, y = _newton_substep(p, x, counter)
    fy, z = _m4_substep(p, x, fx, dfx, y, counter)
    fz = _f(p, z, counter)
    if fz == 0:
        return z
    try:
        dfz = approx_dfz(fx, fy, fz, dfx, x, y, z)
    except DegenerateNodesError as exc:
        raise DegenerateStep("quadrature nodes coincide", z, abs(fz)) from exc
    return z - _correction(fz, dfz, "f'(z) estimate", point=z, residual=abs(fz))


def _king_correction(fa, fb, dfa, where, point):
    # (2 f(a) - f(b)) / (2 f(a) - 5 f(b)) * f(b) / f'(a)
    return _correction(
        (2 * fa - fb) * fb, (2 * fa - 5 * fb) * dfa, where,
        scale=_mag(fa, fb) * _mag(dfa), point=point, residual=abs(fb),
    )


def step_lmm(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    fx, dfx, y = _newton_substep(p, x, counter)
    fy = _f(p, y, counter)
    z = y - _king_correction(fx, fy, dfx, "second substep", y)
    fz = _f(p, z, counter)
    dfz = _df(p, z, counter)
    w = z - _correction(fz, dfz, "f'(z)", point=z, residual=abs(fz))
    fw = _f(p, w, counter)
    return w - _king_correction(fz, fw, dfz, "third substep", w)


def _jarratt(p, x, counter):
    fx = _f(p, x, counter)
    dfx = _df(p, x, counter)
    u = _correction(fx, dfx, "f'(x)", point=x, residual=abs(fx))
    y = x - 2 * u / 3
    dfy = _df(p, y, counter)
    z = x - _correction(
        (3 * dfy + dfx) * u, 6 * dfy - 2 * dfx, "6f'(y) - 2f'(x)",
        scale=_mag(dfx, dfy), point=x, residual=abs(fx),
    )
    return fx, dfx, dfy, z


def step_rwb(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    params = params or MethodParams()
    fx, dfx, dfy, z = _jarratt(p, x, counter)
    mp = z.context
    a, b, c = mp.mpf(params.a), mp.mpf(params.b), mp.mpf(params.c)
    fz = _f(p, z, counter)
    num = ((2 * a - b) * dfx + b * dfy + c * fx) * fz
    den = ((-a - b) * dfx + (3 * a + b) * dfy + c * fx) * dfx
    return z - _correction(num, den, "third substep", scale=_mag(dfx, dfy, fx) * _mag(dfx), point=z, residual=abs(fz))


def step_wkl(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    params = params or MethodParams()
    fx, dfx, dfy, z = _jarratt(p, x, counter)
    mp = z.context
    al, be = mp.mpf(params.alpha), mp.mpf(params.beta)
    fz = _f(p, z, counter)
    num = ((5 * al + 3 * be) * dfx - (3 * al + be) * dfy) * fz
    den = (2 * al * dfx + 2 * be * dfy) * dfx
    return z - _correction(num, den, "third substep", scale=_mag(dfx, dfy) * _mag(dfx), point=z, residual=abs(fz))


def step_neta(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    params = params or MethodParams()
    fx, dfx, y = _newton_substep(p, x, counter)
    a = y.context.mpf(params.a_neta)
    fy = _f(p, y, counter)
    scale = _mag(fx, fy) * _mag(dfx)
    z = y - _correction((fx + a * fy) * fy, (fx + (a - 2) * fy) * dfx, "second substep", scale, y, abs(fy))
    fz = _f(p, z, counter)
    return z - _correction((fx - fy) * fz, (fx - 3 * fy) * dfx, "third substep", scale, z, abs(fz))


def step_ch(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    params = params or MethodParams()
    fx, dfx, y = _newton_substep(p, x, counter)
    beta = y.context.mpf(params.beta_ch)
    fy = _f(p, y, counter)
    scale = _mag(fx, fy) * _mag(dfx)
    z = y - _correction(fx * fy, (fx - 2 * fy) * dfx, "second substep", scale, y, abs(fy))
    fz = _f(p, z, counter)
    # H(u) = (1 + (beta + 2) u) / (1 + beta u), u = f(y)/f(x), cleared of f(x)
    return z - _correction(
        (fx + (beta + 2) * fy) * fz, (fx + beta * fy) * dfx, "third substep", scale, z, abs(fz)
    )


def step_cm(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    fx = _f(p, x, counter)
    dfx = _df(p, x, counter)
    d2fx = _d2f(p, x, counter)
    u = _correction(fx, dfx, "f'(x)", point=x, residual=abs(fx))
    return x - u * (1 + d2fx * u / (2 * dfx))


def step_hm(p: Problem, x, counter: EvalCounter, params: MethodParams | None = None):
    fx = _f(p, x, counter)
    dfx = _df(p, x, counter)
    d2fx = _d2f(p, x, counter)
    return x - _correction(
        2 * fx * dfx, 2 * dfx**2 - d2fx * fx, "2f'^2 - f''f",
        scale=_mag(dfx) ** 2 + abs(d2fx * fx), point=x, residual=abs(fx),
    )


STEPS = {
    MethodId.NM: step_nm, MethodId.M4: step_m4, MethodId.M8: step_m8, MethodId.LMM: step_lmm,
    MethodId.RWB: step_rwb, MethodId.WKL: step_wkl, MethodId.NETA: step_neta, MethodId.CH: step_ch,
    MethodId.HM: step_hm, MethodId.CM: step_cm,
}

DIVERGENCE_BOUND = 10**100


def solve(
    method,
    p: Problem,
    x0,
    params: MethodParams | None = None,
    stop: StoppingCriteria | None = None,
    ctx: PrecisionContext | None = None,
) -> IterationTrace:
    """Iterate ``method`` on ``p`` from ``x0``.

    Converged means ``|x_{n+1} - x_n| < eps`` and ``|f(x_{n+1})| < eps``. The
    residual for that test is an extra evaluation booked under
    ``evals.n_check``, outside the per-iteration cost.
    """
    method = get_method(method)
    params = params or MethodParams()
    params.validate()
    stop = stop or StoppingCriteria()
    ctx = ctx or PrecisionContext()
    step = STEPS[method]
    eps = parse_scalar(stop.epsilon, ctx)
    x = parse_scalar(x0, ctx) if isinstance(x0, str) else ctx.mpf(x0)

    trace = IterationTrace(method, p.id, x, iterates=[x])
    counter = trace.evals
    for _ in range(stop.max_iterations):
        before = counter.total
        accepted_fallback = False
        try:
            x_new = step(p, x, counter, params)
        except DegenerateStep as exc:
            if exc.point is None or exc.residual is None or not exc.residual < eps:
                trace.status, trace.message = Status.DEGENERATE, str(exc)
                return trace
            x_new, accepted_fallback = exc.point, True
        except (DomainError, ZeroDivisionError) as exc:
            trace.status, trace.message = Status.DIVERGED, str(exc)
            return trace
        spent = counter.total - before
        if not accepted_fallback and spent != COST[method]:
            raise AssertionError(f"{method.value} charged {spent} evaluations, expected {COST[method]}")

        if not is_finite(x_new) or abs(x_new) > DIVERGENCE_BOUND:
            trace.status, trace.message = Status.DIVERGED, f"iterate left the finite range: {x_new}"
            return trace

        counter.n_check += 1
        try:
            residual = abs(p.f(x_new))
        except ZeroDivisionError:
            trace.status, trace.message = Status.DIVERGED, f"f undefined at {x_new}"
            return trace
        step_size = abs(x_new - x)
        trace.iterates.append(x_new)
        trace.step_sizes.append(step_size)
        trace.residuals.append(residual)
        x = x_new
        if step_size < eps and residual < eps:
            trace.status = Status.CONVERGED
            return trace
        if accepted_fallback:
            trace.status, trace.message = Status.DEGENERATE, "degenerate step short of tolerance"
            return trace
    trace.status = Status.MAX_ITERATIONS
    return trace
