"""Convergence-order estimates and asymptotic error constants."""

from __future__ import annotations

from dataclasses import dataclass, field

from .mp_scalar import PrecisionContext
from .problems import Problem
from .solvers import IterationTrace, MethodId, Status


class UndefinedCOCError(ValueError):
    pass


class UnsupportedOrderError(ValueError):
    pass


@dataclass
class ConvergenceReport:
    method: MethodId
    problem: str
    x0: object
    total_evals: int
    coc: object  # None when no valid window exists
    step_sizes: list = field(default_factory=list)
    status: Status = Status.CONVERGED
    iterations: int = 0
    message: str = ""


def _resolved(err, gamma, mp) -> bool:
    # errors below the working-precision noise floor carry no order information
    return abs(err) > mp.mpf(10) ** (16 - mp.dps) * max(1, abs(gamma))


def coc_window(iterates, gamma) -> tuple[int, object]:
    """Latest usable COC window as ``(n, rho)``.

    ``rho = log|e[n+1]/e[n]| / log|e[n]/e[n-1]|`` for the largest ``n`` such
    that ``e[n-1]``, ``e[n]`` and ``e[n+1]`` are all resolved at the working
    precision and the ratios are nondegenerate.
    """
    if len(iterates) < 3:
        raise UndefinedCOCError("need at least three iterates")
    mp = iterates[0].context
    gamma = mp.mpf(gamma)
    errs = [x - gamma for x in iterates]
    for n in range(len(errs) - 2, 0, -1):
        window = errs[n - 1 : n + 2]
        if not all(_resolved(e, gamma, mp) for e in window):
            continue
        den = mp.log(abs(errs[n] / errs[n - 1]))
        if den == 0:
            continue
        return n, mp.log(abs(errs[n + 1] / errs[n])) / den
    raise UndefinedCOCError("no window of three iterates resolved away from the root")


def coc(trace: IterationTrace, gamma):
    """Computational order of convergence from the last resolvable window."""
    return coc_window(trace.iterates, gamma)[1]


def convergence_report(trace: IterationTrace, gamma) -> ConvergenceReport:
    try:
        rho = coc(trace, gamma)
    except UndefinedCOCError:
        rho = None
    return ConvergenceReport(
        method=trace.method,
        problem=trace.problem,
        x0=trace.x0,
        total_evals=trace.evals.total,
        coc=rho,
        step_sizes=list(trace.step_sizes),
        status=trace.status,
        iterations=trace.iterations,
        message=trace.message,
    )


def error_constant_m4(c1, c2, c3):
    """Leading coefficient K in ``e_{n+1} = K e_n^4`` for the fourth-order method."""
    return -(c3 * c1 - c2**2) * c2 / c1**3


def error_constant_m8(c1, c2, c3, c4):
    """Leading coefficient K in ``e_{n+1} = K e_n^8`` for the eighth-order method."""
    inner = c3 * c1**3 * c4 - c4 * c1**2 * c2**2 - c3**2 * c1**2 * c2 + 2 * c3 * c1 * c2**3 - c2**5
    return -(c2**2) * inner / c1**7


def taylor_coefficients(p: Problem, gamma, m_max: int, ctx: PrecisionContext | None = None):
    """``[c_1, ..., c_m_max]`` with ``c_m = f^(m)(gamma) / m!``.

    c_1 and c_2 use the analytic derivatives. c_3 and c_4 come from
    fourth-order central differences of the analytic ``f''`` with step
    ``10**(-digits/8)``.
    """
    if m_max < 1:
        return []
    if m_max > 4:
        raise UnsupportedOrderError("Taylor coefficients are available up to m = 4")
    mp = ctx.mp if ctx is not None else gamma.context
    g = mp.mpf(gamma)
    out = [p.df(g), p.d2f(g) / 2]
    if m_max > 2:
        h = mp.mpf(10) ** (-(mp.dps // 8))
        s = [p.d2f(g + k * h) for k in (-2, -1, 0, 1, 2)]
        d3 = (s[0] - 8 * s[1] + 8 * s[3] - s[4]) / (12 * h)
        d4 = (-s[0] + 16 * s[1] - 30 * s[2] + 16 * s[3] - s[4]) / (12 * h**2)
        out += [d3 / 6, d4 / 24]
    return out[:m_max]


def measured_error_ratio(iterates, gamma, order: int):
    """``e[n+1] / e[n]**order`` for the last step whose result is still resolved.

    Returns ``(n, ratio)``.
    """
    mp = iterates[0].context
    gamma = mp.mpf(gamma)
    errs = [x - gamma for x in iterates]
    for n in range(len(errs) - 2, -1, -1):
        if _resolved(errs[n + 1], gamma, mp) and errs[n] != 0:
            return n, errs[n + 1] / errs[n] ** order
    raise UndefinedCOCError("no resolved step")
