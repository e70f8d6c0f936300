"""Test functions with hand-coded first and second derivatives."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .mp_scalar import PrecisionContext, is_finite

Fn = Callable[..., object]


class DomainError(ArithmeticError):
    pass


class Kind(enum.Enum):
    F = "f"
    DF = "df"
    D2F = "d2f"


@dataclass
class EvalCounter:
    """Functional-evaluation tally for one solve.

    ``n_check`` holds evaluations made only to test the stopping rule; they
    are kept out of :attr:`total`.
    """

    n_f: int = 0
    n_df: int = 0
    n_d2f: int = 0
    n_check: int = 0

    @property
    def total(self) -> int:
        return self.n_f + self.n_df + self.n_d2f

    def copy(self) -> "EvalCounter":
        return EvalCounter(self.n_f, self.n_df, self.n_d2f, self.n_check)


@dataclass(frozen=True)
class Problem:
    """A scalar equation ``f(x) = 0``.

    ``f``, ``df`` and ``d2f`` take a scalar bound to a precision context and
    read the context from ``x.context``, so they evaluate transcendental
    functions (and pi) at the caller's precision.
    """

    id: str
    f: Fn
    df: Fn
    d2f: Fn
    default_x0: str
    root_hint: str
    description: str = ""
    exact_root: Callable[[PrecisionContext], object] | None = field(default=None, compare=False)


def evaluate(p: Problem, kind: Kind, x, counter: EvalCounter | None = None):
    if not is_finite(x):
        raise DomainError(f"{p.id}: non-finite argument")
    fn = {Kind.F: p.f, Kind.DF: p.df, Kind.D2F: p.d2f}[kind]
    if counter is not None:
        if kind is Kind.F:
            counter.n_f += 1
        elif kind is Kind.DF:
            counter.n_df += 1
        else:
            counter.n_d2f += 1
    try:
        return fn(x)
    except ZeroDivisionError as exc:
        raise DomainError(f"{p.id}: undefined at x = {x}") from exc


# -- the six benchmark functions ------------------------------------------

def _f1(x):
    return x**3 + 4 * x**2 - 10


def _df1(x):
    return 3 * x**2 + 8 * x


def _d2f1(x):
    return 6 * x + 8


def _f2(x):
    mp = x.context
    return x * mp.exp(x**2) - mp.sin(x) ** 2 + 3 * mp.cos(x) + 5


def _df2(x):
    mp = x.context
    return (1 + 2 * x**2) * mp.exp(x**2) - mp.sin(2 * x) - 3 * mp.sin(x)


def _d2f2(x):
    mp = x.context
    return (6 * x + 4 * x**3) * mp.exp(x**2) - 2 * mp.cos(2 * x) - 3 * mp.cos(x)


def _f3(x):
    mp = x.context
    return mp.sin(x) ** 2 - x**2 + 1


def _df3(x):
    mp = x.context
    return mp.sin(2 * x) - 2 * x


def _d2f3(x):
    mp = x.context
    return 2 * mp.cos(2 * x) - 2


def _f4(x):
    return x.context.atan(x)


def _df4(x):
    return 1 / (1 + x**2)


def _d2f4(x):
    return -2 * x / (1 + x**2) ** 2


def _f5(x):
    mp = x.context
    return x**4 + mp.sin(mp.pi / x**2) - 5


def _df5(x):
    mp = x.context
    u = mp.pi / x**2
    return 4 * x**3 - 2 * u / x * mp.cos(u)


def _d2f5(x):
    mp = x.context
    u = mp.pi / x**2
    return 12 * x**2 + 6 * u / x**2 * mp.cos(u) - 4 * u**2 / x**2 * mp.sin(u)


def _f6(x):
    return x.context.exp(-(x**2) + x + 2) - 1


def _df6(x):
    return (1 - 2 * x) * x.context.exp(-(x**2) + x + 2)


def _d2f6(x):
    return ((1 - 2 * x) ** 2 - 2) * x.context.exp(-(x**2) + x + 2)


PROBLEMS: dict[str, Problem] = {
    p.id: p
    for p in [
        Problem("f1", _f1, _df1, _d2f1, "1.2", "1.365", "x^3 + 4x^2 - 10"),
        Problem("f2", _f2, _df2, _d2f2, "-1.0", "-1.207", "x exp(x^2) - sin^2(x) + 3cos(x) + 5"),
        Problem(
            "f3", _f3, _df3, _d2f3, "1.5", "1.404",
            "sin^2(x) - x^2 + 1 (roots +-1.404; the positive root is used)",
        ),
        Problem("f4", _f4, _df4, _d2f4, "0.5", "0", "arctan(x)", exact_root=lambda ctx: ctx.mpf(0)),
        Problem(
            "f5", _f5, _df5, _d2f5, "1.3", "1.41421356", "x^4 + sin(pi/x^2) - 5",
            exact_root=lambda ctx: ctx.mp.sqrt(2),
        ),
        Problem("f6", _f6, _df6, _d2f6, "1.2", "2.0", "exp(-x^2 + x + 2) - 1", exact_root=lambda ctx: ctx.mpf(2)),
    ]
}

# f3 has two simple roots; x0 = 1.5 sits in the basin of the positive one.
ROOT_CHOICE_NOTES = {"f3": "positive root (+1.404...) used as reference; x0 = 1.5 lies in its basin"}


def get_problem(problem_id: str) -> Problem:
    try:
        return PROBLEMS[problem_id.lower()]
    except KeyError:
        raise KeyError(f"unknown problem {problem_id!r}; expected one of {', '.join(PROBLEMS)}") from None


class RootRefinementError(RuntimeError):
    pass


def reference_root(p: Problem, ctx: PrecisionContext):
    """The root of ``p`` accurate to the working precision of ``ctx``.

    Closed-form roots are computed directly. Other roots come from Newton's
    method run at twice the target precision, started from the low-precision
    hint, and are cached per (problem, digits).
    """
    if p.exact_root is not None:
        return p.exact_root(ctx)
    return ctx.mpf(_refined_root(p, ctx.digits))


@lru_cache(maxsize=None)
def _refined_root(p: Problem, digits: int):
    work = PrecisionContext(2 * digits)
    x = work.mpf(p.root_hint)
    stop = work.power_of_ten(-digits - 10)
    for _ in range(200):
        step = p.f(x) / p.df(x)
        x -= step
        if abs(step) < stop:
            return x
    raise RootRefinementError(f"Newton refinement for {p.id} did not converge")


def polynomial_problem(coeffs, problem_id: str = "poly", x0: str = "1", root_hint: str = "0", exact_root=None) -> Problem:
    """Problem for ``sum(c_k * t**k)``; coefficients in increasing degree.

    Used for fixtures with known Taylor data around a root.
    """
    coeffs = tuple(coeffs)

    def horner(cs):
        def fn(x):
            mp = x.context
            acc = mp.mpf(0)
            for c in reversed(cs):
                acc = acc * x + mp.mpf(c)
            return acc
        return fn

    d1 = tuple(k * c for k, c in enumerate(coeffs))[1:]
    d2 = tuple(k * c for k, c in enumerate(d1))[1:]
    return Problem(
        problem_id, horner(coeffs), horner(d1 or (0,)), horner(d2 or (0,)),
        x0, root_hint, f"polynomial {coeffs}", exact_root=exact_root,
    )
