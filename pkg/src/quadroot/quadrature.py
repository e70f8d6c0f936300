"""Derivative estimates from moment-matched quadrature of ``f''``.

Newton's theorem writes a derivative at a new node as

    f'(b) = f'(x) + integral_x^b f''(t) dt

and the integral is replaced by a weighted sum of values already in hand.
The weights follow from requiring exactness on the monomials 1, t, t^2
(and t^3 for the four-weight rule).

The closed forms :func:`approx_dfy` and :func:`approx_dfz` are what the
solvers use. :func:`solve_omega` and :func:`solve_nu` solve the moment
systems directly and serve as an independent check on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath


class DegenerateNodesError(ZeroDivisionError):
    """Two quadrature nodes coincide at the working precision."""


@dataclass(frozen=True)
class OmegaWeights:
    """Weights of ``w1 f(x) + w2 f(y) + w3 f'(x)``."""

    w1: object
    w2: object
    w3: object


@dataclass(frozen=True)
class NuWeights:
    """Weights of ``v1 f(x) + v2 f(y) + v3 f(z) + v4 f'(x)``."""

    v1: object
    v2: object
    v3: object
    v4: object


def _ctx_of(*values):
    for v in values:
        if hasattr(v, "context"):
            return v.context
    return mpmath.mp


def _coincident(a, b, mp) -> bool:
    scale = max(1, abs(a), abs(b))
    return abs(a - b) < mp.mpf(10) ** (8 - mp.dps) * scale


def _check_distinct(mp, *nodes):
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if _coincident(a, b, mp):
                raise DegenerateNodesError(f"coincident quadrature nodes {a} and {b}")


def _solve_moments(mp, rows, rhs):
    a = mp.matrix(rows)
    b = mp.matrix(rhs)
    try:
        sol = mp.lu_solve(a, b)
    except ZeroDivisionError as exc:
        raise DegenerateNodesError("singular moment system") from exc
    # ill-conditioned systems must not hand back unflagged garbage
    resid = mp.norm(a * sol - b, mp.inf)
    scale = max(1, mp.norm(b, mp.inf), mp.mnorm(a, mp.inf) * mp.norm(sol, mp.inf))
    if not mp.isfinite(resid) or resid > mp.mpf(10) ** (16 - mp.dps) * scale:
        raise DegenerateNodesError("moment system too ill-conditioned at this precision")
    return [sol[i] for i in range(len(rhs))]


def solve_omega(x, y) -> OmegaWeights:
    """Weights exact for f in {1, t, t^2} of the three-term rule on [x, y].

    Rows are the moment conditions for f = 1, t, t^2 respectively; the
    right-hand side is ``f'(y) - f'(x)``.
    """
    mp = _ctx_of(x, y)
    x, y = mp.mpf(x), mp.mpf(y)
    _check_distinct(mp, x, y)
    rows = [
        [1, 1, 0],
        [x, y, 1],
        [x**2, y**2, 2 * x],
    ]
    rhs = [0, 0, 2 * (y - x)]
    return OmegaWeights(*_solve_moments(mp, rows, rhs))


def solve_nu(x, y, z) -> NuWeights:
    """Weights exact for f in {1, t, t^2, t^3} of the four-term rule on [x, z]."""
    mp = _ctx_of(x, y, z)
    x, y, z = mp.mpf(x), mp.mpf(y), mp.mpf(z)
    _check_distinct(mp, x, y, z)
    rows = [
        [1, 1, 1, 0],
        [x, y, z, 1],
        [x**2, y**2, z**2, 2 * x],
        [x**3, y**3, z**3, 3 * x**2],
    ]
    rhs = [0, 0, 2 * (z - x), 3 * (z**2 - x**2)]
    return NuWeights(*_solve_moments(mp, rows, rhs))


def approx_dfy(fx, fy, dfx, x, y):
    """f'(y) estimated as ``2 (f(y) - f(x)) / (y - x) - f'(x)``.

    Exact when f is a polynomial of degree <= 2.
    """
    mp = _ctx_of(fx, fy, dfx, x, y)
    _check_distinct(mp, x, y)
    return 2 * (fy - fx) / (y - x) - dfx


def approx_dfz(fx, fy, fz, dfx, x, y, z):
    """f'(z) from f(x), f(y), f(z), f'(x); exact for cubics.

    Equal to ``f'(x) + v1 f(x) + v2 f(y) + v3 f(z) + v4 f'(x)`` with the
    weights of :func:`solve_nu`, written out over the common denominator
    ``(x - y)^2 (y - z) (x - z)``.
    """
    mp = _ctx_of(fx, fy, fz, dfx, x, y, z)
    _check_distinct(mp, x, y, z)
    num = (
        (y - z) ** 2 * (x - z) * (x - y) * dfx
        - (x - y) ** 2 * (x + 2 * y - 3 * z) * fz
        + (x - z) ** 3 * fy
        - (y - z) ** 2 * (3 * x - 2 * y - z) * fx
    )
    return num / ((x - y) ** 2 * (y - z) * (x - z))


def dfz_from_weights(w: NuWeights, fx, fy, fz, dfx):
    return dfx + w.v1 * fx + w.v2 * fy + w.v3 * fz + w.v4 * dfx


def dfy_from_weights(w: OmegaWeights, fx, fy, dfx):
    return dfx + w.w1 * fx + w.w2 * fy + w.w3 * dfx
