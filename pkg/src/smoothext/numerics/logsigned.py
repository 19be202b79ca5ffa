"""Signed numbers stored as (sign, natural log of magnitude)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .backend import ctx, scalar, is_rational


@dataclass(frozen=True)
class LogSigned:
    """``sign * exp(logmag)``; ``logmag`` is ``None`` for zero."""

    sign: int
    logmag: Optional[object] = None

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign == 0:
            object.__setattr__(self, "logmag", None)
        elif self.logmag is None:
            raise ValueError("nonzero LogSigned needs a logmag")
        elif is_rational(self.logmag) or isinstance(self.logmag, float):
            object.__setattr__(self, "logmag", scalar(self.logmag))

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "LogSigned":
        return cls(0)

    @classmethod
    def from_log(cls, logmag, sign: int = 1) -> "LogSigned":
        return cls(sign, logmag)

    @classmethod
    def from_value(cls, x) -> "LogSigned":
        x = scalar(x)
        if x == 0:
            return cls(0)
        return cls(1 if x > 0 else -1, ctx.log(abs(x)))

    def to_scalar(self):
        if self.sign == 0:
            return ctx.zero
        return self.sign * ctx.exp(self.logmag)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    # arithmetic ---------------------------------------------------------
    def __neg__(self) -> "LogSigned":
        return LogSigned(-self.sign, self.logmag)

    def __abs__(self) -> "LogSigned":
        return LogSigned(abs(self.sign), self.logmag)

    def __mul__(self, other) -> "LogSigned":
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogSigned(0)
        return LogSigned(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogSigned":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogSigned division by zero")
        if self.sign == 0:
            return LogSigned(0)
        return LogSigned(self.sign * other.sign, self.logmag - other.logmag)

    def __rtruediv__(self, other) -> "LogSigned":
        return _coerce(other) / self

    def __pow__(self, exponent) -> "LogSigned":
        if self.sign == 0:
            if exponent > 0:
                return LogSigned(0)
            raise ZeroDivisionError("zero to a non-positive power")
        if self.sign < 0:
            if not float(exponent).is_integer():
                raise ValueError("negative base needs an integer exponent")
            sign = -1 if int(exponent) % 2 else 1
        else:
            sign = 1
        return LogSigned(sign, self.logmag * exponent)

    def __add__(self, other) -> "LogSigned":
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.logmag >= other.logmag else (other, self)
        delta = lo.logmag - hi.logmag  # <= 0
        if hi.sign == lo.sign:
            return LogSigned(hi.sign, hi.logmag + ctx.log1p(ctx.exp(delta)))
        if delta == 0:
            return LogSigned(0)
        return LogSigned(hi.sign, hi.logmag + ctx.log1p(-ctx.exp(delta)))

    __radd__ = __add__

    def __sub__(self, other) -> "LogSigned":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "LogSigned":
        return _coerce(other) - self

    # ordering -----------------------------------------------------------
    def _key(self):
        if self.sign == 0:
            return (0, 0)
        return (self.sign, self.sign * self.logmag)

    def __lt__(self, other):
        a, b = self._key(), _coerce(other)._key()
        if a[0] != b[0]:
            return a[0] < b[0]
        return a[1] < b[1] if a[0] else False

    def __le__(self, other):
        return self < other or self == other

    def __gt__(self, other):
        return _coerce(other) < self

    def __ge__(self, other):
        return _coerce(other) <= self

    def __eq__(self, other):
        if not isinstance(other, LogSigned):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return self.sign == other.sign and self.logmag == other.logmag

    def __hash__(self):
        return hash((self.sign, self.logmag))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogSigned(0)"
        return f"LogSigned({'+' if self.sign > 0 else '-'}exp({ctx.nstr(self.logmag, 15)}))"


def _coerce(x) -> LogSigned:
    if isinstance(x, LogSigned):
        return x
    if isinstance(x, (int, float)) or is_rational(x) or isinstance(x, ctx.mpf):
        return LogSigned.from_value(x)
    raise TypeError(f"cannot convert {type(x).__name__} to LogSigned")


def log_sum(values) -> LogSigned:
    total = LogSigned(0)
    for v in values:
        total = total + v
    return total
