"""Scalar backend.

Values are ``mpf`` numbers from a private mpmath context, so the exponent
range is unbounded (exponents are Python integers) and the significand
precision is configurable.  Rational mode uses :class:`fractions.Fraction`;
every algorithm in the package only needs ``+ - * /`` and comparisons, so the
two number types are interchangeable wherever no transcendental function is
required.
"""

from __future__ import annotations

import contextlib
import copyreg
import math
from fractions import Fraction
from typing import Iterator, Union

import mpmath

DEFAULT_PRECISION = 256

ctx = mpmath.MPContext()
ctx.prec = DEFAULT_PRECISION

mpf = ctx.mpf


def _rebuild(raw):
    return ctx.make_mpf(raw)


# the context's mpf class is created at runtime, so it needs an explicit reducer
copyreg.pickle(ctx.mpf, lambda x: (_rebuild, (x._mpf_,)))
Scalar = ctx.mpf  # type alias used in signatures
Number = Union["mpmath.mpf", Fraction, int]


def set_precision(bits: int) -> None:
    if not 16 <= bits <= 4000:
        raise ValueError("precision must be between 16 and 4000 bits")
    ctx.prec = int(bits)


def get_precision() -> int:
    return ctx.prec


@contextlib.contextmanager
def precision(bits: int) -> Iterator[None]:
    """Temporarily change the working precision."""
    old = ctx.prec
    set_precision(bits)
    try:
        yield
    finally:
        ctx.prec = old


def scalar(value) -> "mpmath.mpf":
    """Convert ``value`` (int, float, str, Fraction, mpf) to a Scalar."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        value = value.strip()
        if "/" in value:
            return scalar(Fraction(value))
    return ctx.mpf(value)


def is_rational(value) -> bool:
    return isinstance(value, (Fraction, int))


def exp(x):
    if isinstance(x, float):
        return math.exp(x)
    if is_rational(x):
        if x == 0:
            return Fraction(1)
        x = scalar(x)
    return ctx.exp(x)


def log(x):
    if is_rational(x):
        x = scalar(x)
    return ctx.log(x)


def log1p(x):
    if is_rational(x):
        x = scalar(x)
    return ctx.log1p(x)


def expm1(x):
    if is_rational(x):
        x = scalar(x)
    return ctx.expm1(x)


def sin(x):
    return ctx.sin(scalar(x) if is_rational(x) else x)


def cos(x):
    return ctx.cos(scalar(x) if is_rational(x) else x)


def ldexp(x, n: int):
    if is_rational(x):
        return Fraction(x) * Fraction(2) ** n
    return ctx.ldexp(x, n)


def zero_like(x):
    return Fraction(0) if is_rational(x) else ctx.zero


def one_like(x):
    return Fraction(1) if is_rational(x) else ctx.one


def tolerance(x=None, slack_bits: int = 32):
    """Relative tolerance for the number type of ``x``.

    Exact (zero) for rationals, ``2**-(prec - slack_bits)`` for Scalars.
    """
    if x is not None and is_rational(x):
        return Fraction(0)
    return ctx.ldexp(ctx.one, -(ctx.prec - slack_bits))


def to_float(x) -> float:
    """Float conversion that never raises; huge values map to +-inf, tiny to 0."""
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def order_key(x):
    """Exact total-order key for Scalars and rationals.

    ``order_key(a) < order_key(b)`` iff ``a < b``.  Tuple comparisons run in C,
    which makes bulk bisection over node lists much faster than comparing mpf
    objects directly.
    """
    if not isinstance(x, ctx.mpf):
        x = scalar(x)
    sign, man, exp_, bc = x._mpf_
    if not man:
        if exp_:  # inf / nan special values
            raise ValueError("order_key undefined for non-finite values")
        return (0, 0, 0)
    top = exp_ + bc
    # left-align the mantissa to a fixed width so integer comparison is exact
    norm = man << (_KEY_WIDTH - bc) if bc <= _KEY_WIDTH else man >> (bc - _KEY_WIDTH)
    if sign:
        return (-1, -top, -norm)
    return (1, top, norm)


_KEY_WIDTH = 4096
