"""Parametric catalog of null sequences ``a_1 > a_2 > ... > 0``.

Every family produces ``log a_l`` in closed form; linear values are only
built on request (and refused for factorial decay beyond index 30).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Optional, Sequence

from ..interpolation import PointSet
from ..numerics import backend as sc

FAMILIES = (
    "power-log",
    "exp-power",
    "inv-log",
    "exp-factorial",
    "exp-geometric",
    "almost-accumulation",
    "custom",
)

# expected verdict for each catalog family (custom has none)
EXPECTED = {
    "power-log": "positive",
    "exp-power": "positive",
    "inv-log": "positive",
    "exp-factorial": "negative",
    "exp-geometric": "negative",
    "almost-accumulation": "negative",
}

LINEAR_FACTORIAL_CAP = 30


@dataclass(frozen=True)
class SequenceSpec:
    family: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    p: Optional[float] = None
    length: Optional[int] = None
    custom_logs: Optional[tuple] = None  # log a_1, log a_2, ... for "custom"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.family == "custom" and not self.custom_logs:
            raise ValueError("custom sequences need explicit log values")
        if self.family == "exp-geometric" and (self.p is None or not self.p > 1):
            raise ValueError("exp-geometric needs p > 1")
        if self.family in ("exp-power", "inv-log") and self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"{self.family} needs alpha > 0")
        if self.family == "power-log" and self.beta is not None and not self.beta > 0:
            raise ValueError("power-log needs beta > 0")
        if self.length is not None and self.length < 2:
            raise ValueError("length must be at least 2")

    # parameters with defaults ------------------------------------------
    @property
    def a(self):
        return self.alpha if self.alpha is not None else 1

    @property
    def b(self):
        return self.beta if self.beta is not None else 1

    @property
    def super_exponential(self) -> bool:
        return self.family in ("exp-factorial", "exp-geometric") or (
            self.family == "exp-power" and self.a > 1
        )

    @property
    def L(self) -> int:
        """Truncation length (number of points for almost-accumulation: clusters)."""
        if self.length is not None:
            return self.length
        if self.family == "custom":
            return len(self.custom_logs)
        if self.family == "almost-accumulation":
            return 100
        return 60 if self.super_exponential else 5000

    def label(self) -> str:
        parts = [self.family]
        if self.family in ("power-log", "exp-power", "inv-log"):
            parts.append(f"alpha={self.a}")
        if self.family == "power-log":
            parts.append(f"beta={self.b}")
        if self.family == "exp-geometric":
            parts.append(f"p={self.p}")
        parts.append(f"L={self.L}")
        return " ".join(parts)

    # values -------------------------------------------------------------
    def log_term(self, ell: int):
        """``log a_l`` for ``l >= 1`` (sequence families only)."""
        if ell < 1:
            raise ValueError("indices start at 1")
        ctx = sc.ctx
        f = self.family
        if f == "power-log":
            return sc.scalar(self.a) * ctx.log(ctx.log(ell + 1)) - sc.scalar(self.b) * ctx.log(ell)
        if f == "exp-power":
            return -ctx.power(ell, sc.scalar(self.a))
        if f == "inv-log":
            return -sc.scalar(self.a) * ctx.log(ctx.log(ell + 1))
        if f == "exp-factorial":
            return -ctx.mpf(factorial(ell))
        if f == "exp-geometric":
            p = self.p
            if float(p).is_integer():
                return -ctx.mpf(int(p) ** ell)
            return -ctx.power(sc.scalar(p), ell)
        if f == "custom":
            return sc.scalar(self.custom_logs[ell - 1])
        return self.log_values[ell - 1]

    @cached_property
    def log_values(self) -> tuple:
        """``(log a_1, ..., log a_L)``; checked finite and strictly decreasing."""
        if self.family == "almost-accumulation":
            vals = tuple(sc.ctx.log(v) for v in self._cluster_points())
        else:
            vals = tuple(self.log_term(i) for i in range(1, self.L + 1))
        for i in range(1, len(vals)):
            if not vals[i] < vals[i - 1]:
                raise ValueError(
                    f"{self.label()}: sequence not strictly decreasing at index {i + 1}"
                )
        return vals

    def _cluster_points(self) -> list:
        ctx = sc.ctx
        pts = []
        for k in range(1, self.L + 1):
            step = ctx.exp(-k)
            base = ctx.one / k
            pts.extend(base + j * step for j in range(k + 1))
        return sorted(pts, reverse=True)

    def values(self) -> tuple:
        if self.family == "exp-factorial" and self.L > LINEAR_FACTORIAL_CAP:
            raise ValueError("factorial decay is only materialized for l <= 30")
        if self.family == "almost-accumulation":
            return tuple(self._cluster_points())
        return tuple(sc.ctx.exp(v) for v in self.log_values)

    def pointset(self) -> PointSet:
        """``K = {0} u {a_l}``; factorial decay is truncated at index 30."""
        if self.family == "exp-factorial":
            n = min(self.L, LINEAR_FACTORIAL_CAP)
            vals = [sc.ctx.exp(v) for v in self.log_values[:n]]
        else:
            vals = list(self.values())
        return PointSet((sc.ctx.zero,) + tuple(reversed(vals)))

    def halving_violation(self, upto: Optional[int] = None) -> Optional[int]:
        """First index ``l <= upto`` with ``a_l >= a_{l-1}/2``, or ``None``."""
        bad = self._first_halving_violation
        if bad is None or (upto is not None and bad > upto):
            return None
        return bad

    @cached_property
    def _first_halving_violation(self) -> Optional[int]:
        logs = self.log_values
        log2 = sc.ctx.ln2
        for i in range(1, len(logs)):
            if not logs[i] < logs[i - 1] - log2:
                return i + 1
        return None


def custom_sequence(values: Sequence, logs: bool = False) -> SequenceSpec:
    """Wrap user data; ``values`` are ``a_l`` or, with ``logs``, ``log a_l``."""
    if logs:
        data = tuple(sc.scalar(v) for v in values)
    else:
        data = tuple(sc.ctx.log(sc.scalar(v)) for v in values)
    return SequenceSpec("custom", custom_logs=data)
