"""Truncated univariate Taylor arithmetic.

A :class:`Jet` at base point ``x`` of order ``n`` stores the Taylor
coefficients ``c_j = f^(j)(x) / j!`` for ``j = 0..n``.  Products truncate to the
common order.  The coefficient type is whatever the caller supplies (Scalar or
Fraction); only the transcendental methods need Scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

from . import backend as sc


@dataclass(frozen=True)
class Jet:
    x: object
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a jet needs at least one coefficient")
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, x, value, order: int) -> "Jet":
        z = value * 0
        return cls(x, (value,) + (z,) * order)

    @classmethod
    def variable(cls, x, order: int) -> "Jet":
        """The identity function ``t -> t`` expanded at ``x``."""
        one = sc.one_like(x)
        zero = one - one
        if order == 0:
            return cls(x, (x,))
        return cls(x, (x, one) + (zero,) * (order - 1))

    @classmethod
    def zero(cls, x, order: int) -> "Jet":
        z = sc.zero_like(x)
        return cls(x, (z,) * (order + 1))

    @classmethod
    def from_derivatives(cls, x, derivs: Sequence) -> "Jet":
        return cls(x, tuple(d / factorial(j) for j, d in enumerate(derivs)))

    # accessors ----------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, j: int):
        return self.coeffs[j] * factorial(j)

    def derivatives(self) -> list:
        return [c * factorial(j) for j, c in enumerate(self.coeffs)]

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.x, self.coeffs[: order + 1])

    def rebase(self, x) -> "Jet":
        """Same coefficients attached to a different base point (for shifts)."""
        return Jet(x, self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    # ring operations ----------------------------------------------------
    def _match(self, other: "Jet") -> int:
        if other.x != self.x:
            raise ValueError("jets expanded at different points")
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            n = self._match(other)
            return Jet(self.x, tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)))
        return Jet(self.x, (self.coeffs[0] + other,) + self.coeffs[1:])

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.x, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = self._match(other)
            a, b = self.coeffs, other.coeffs
            out = []
            for k in range(n + 1):
                acc = a[0] * b[k]
                for i in range(1, k + 1):
                    acc += a[i] * b[k - i]
                out.append(acc)
            return Jet(self.x, tuple(out))
        return Jet(self.x, tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        c = self.coeffs
        if c[0] == 0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        inv0 = 1 / c[0]
        r = [inv0]
        for k in range(1, len(c)):
            acc = c[1] * r[k - 1]
            for i in range(2, k + 1):
                acc += c[i] * r[k - i]
            r.append(-acc * inv0)
        return Jet(self.x, tuple(r))

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.x, tuple(c / other for c in self.coeffs))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int) -> "Jet":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Jet.constant(self.x, sc.one_like(self.coeffs[0]), self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # transcendental -----------------------------------------------------
    def exp(self) -> "Jet":
        g = self.coeffs
        h = [sc.exp(g[0])]
        for k in range(1, len(g)):
            acc = g[1] * h[k - 1]
            for j in range(2, k + 1):
                acc += j * g[j] * h[k - j]
            h.append(acc / k)
        return Jet(self.x, tuple(h))

    def sincos(self) -> tuple["Jet", "Jet"]:
        g = self.coeffs
        s = [sc.sin(g[0])]
        c = [sc.cos(g[0])]
        for k in range(1, len(g)):
            acc_s = g[1] * c[k - 1]
            acc_c = g[1] * s[k - 1]
            for j in range(2, k + 1):
                acc_s += j * g[j] * c[k - j]
                acc_c += j * g[j] * s[k - j]
            s.append(acc_s / k)
            c.append(-acc_c / k)
        return Jet(self.x, tuple(s)), Jet(self.x, tuple(c))

    def sin(self) -> "Jet":
        return self.sincos()[0]

    def cos(self) -> "Jet":
        return self.sincos()[1]

    def compose(self, outer: "Jet") -> "Jet":
        """Jet of ``F o self`` where ``outer`` is the jet of ``F`` at ``self.value``."""
        if outer.x != self.coeffs[0]:
            raise ValueError("outer jet must be expanded at the inner value")
        n = min(self.order, outer.order)
        delta = Jet(self.x, (self.coeffs[0] * 0,) + self.coeffs[1 : n + 1])
        result = Jet.constant(self.x, outer.coeffs[n], n)
        for k in range(n - 1, -1, -1):  # Horner in powers of delta
            result = result * delta + outer.coeffs[k]
        return result
