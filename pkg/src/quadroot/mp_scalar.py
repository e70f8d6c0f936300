"""Arbitrary-precision scalars with an explicit decimal-digit working precision.

Values are ``mpf`` numbers bound to a private :class:`mpmath.MPContext`, so two
precision contexts never interfere with each other (mpmath's module-level
``mp`` is global state and is deliberately not used here).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

DEFAULT_DIGITS = 2048
MIN_DIGITS = 64

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class FormatError(ValueError):
    """Raised when a non-finite value is formatted."""


class ParseError(ValueError):
    """Raised on malformed numeric text."""


@lru_cache(maxsize=None)
def _make_mp(digits: int) -> mpmath.MPContext:
    mp = mpmath.MPContext()
    mp.dps = digits
    return mp


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in decimal digits.

    All arithmetic on scalars created through :meth:`mpf` is carried out
    at ``digits`` significant decimal digits, including the transcendental
    functions exposed by :attr:`mp` (``sin``, ``exp``, ``atan``, ``pi``...).
    """

    digits: int = DEFAULT_DIGITS
    mp: mpmath.MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < MIN_DIGITS:
            raise ValueError(f"precision must be an integer >= {MIN_DIGITS} digits, got {self.digits!r}")
        object.__setattr__(self, "mp", _make_mp(self.digits))

    def mpf(self, value) -> mpmath.mpf:
        return self.mp.mpf(value)

    @property
    def pi(self) -> mpmath.mpf:
        return +self.mp.pi

    def tiny(self, slack: int = 8) -> mpmath.mpf:
        """``10**(-digits + slack)``: the noise floor used for degeneracy tests."""
        return self.mp.mpf(10) ** (slack - self.digits)

    def power_of_ten(self, exponent: int) -> mpmath.mpf:
        return self.mp.mpf(10) ** exponent


def is_finite(v) -> bool:
    return bool(mpmath.isfinite(v))


def parse_scalar(text: str, ctx: PrecisionContext) -> mpmath.mpf:
    """Parse decimal or scientific notation into a scalar at ``ctx`` precision."""
    if not isinstance(text, str):
        raise ParseError(f"expected text, got {type(text).__name__}")
    s = text.strip()
    if not _NUMBER_RE.match(s):
        raise ParseError(f"malformed number: {text!r}")
    return ctx.mp.mpf(s)


def _to_fraction(v) -> Fraction:
    if not hasattr(v, "_mpf_"):
        v = mpmath.mpf(v)
    sign, man, exp, _ = v._mpf_
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def _decimal_exponent(q: Fraction) -> int:
    """Exact ``floor(log10(q))`` for a positive rational ``q``."""
    n, d = q.numerator, q.denominator
    e = (n.bit_length() - d.bit_length()) * math.log10(2)
    e = math.floor(e)
    # the bit-length estimate is off by at most one in either direction
    while _ge_pow10(q, e + 1):
        e += 1
    while not _ge_pow10(q, e):
        e -= 1
    return e


def _ge_pow10(q: Fraction, e: int) -> bool:
    if e >= 0:
        return q.numerator >= q.denominator * 10**e
    return q.numerator * 10**-e >= q.denominator


def _scaled(q: Fraction, shift: int) -> Fraction:
    return q * 10**shift if shift >= 0 else q / 10**-shift


def format_scientific(v, sig_digits: int) -> str:
    """Normalized scientific notation with ``sig_digits`` digits, round-half-even.

    The conversion is exact: the binary value is turned into a rational
    before rounding, so the decimal exponent is the true one even for
    magnitudes like ``1e-1570``.

    >>> ctx = PrecisionContext(64)
    >>> format_scientific(ctx.mpf("0.16"), 2)
    '1.6e-1'
    """
    if sig_digits < 1:
        raise ValueError("sig_digits must be >= 1")
    if not is_finite(v):
        raise FormatError(f"cannot format non-finite value {v}")
    q = _to_fraction(v)
    if q == 0:
        return "0." + "0" * (sig_digits - 1) + "e0" if sig_digits > 1 else "0e0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    e = _decimal_exponent(q)
    m = round(_scaled(q, sig_digits - 1 - e))  # Fraction.__round__ is half-even
    if m == 10**sig_digits:
        m //= 10
        e += 1
    return sign + _join_mantissa(str(m)) + f"e{e}"


def leading_digits(v, sig_digits: int) -> str:
    """Like :func:`format_scientific` but truncating instead of rounding.

    Useful when comparing against tables that print the first significant
    digits of a value rather than its rounded form.
    """
    if not is_finite(v):
        raise FormatError(f"cannot format non-finite value {v}")
    q = abs(_to_fraction(v))
    if q == 0:
        return "0e0"
    e = _decimal_exponent(q)
    m = math.floor(_scaled(q, sig_digits - 1 - e))
    sign = "-" if v < 0 else ""
    return sign + _join_mantissa(str(m)) + f"e{e}"


def _join_mantissa(digits: str) -> str:
    return digits if len(digits) == 1 else digits[0] + "." + digits[1:]


def decimal_exponent(v) -> int:
    """Exact decimal exponent of a nonzero finite value."""
    if not is_finite(v) or v == 0:
        raise FormatError(f"no decimal exponent for {v}")
    return _decimal_exponent(abs(_to_fraction(v)))
