"""Verdict records and the trend statistics used to read finite grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..numerics import backend as sc

HOLDS = "holds-on-grid"
FAILS = "fails"
HEURISTIC = "heuristic-holds"

SLOPE_TOLERANCE = 0.1


@dataclass
class Fit:
    slope: object
    intercept: object
    residuals: tuple
    count: int


def linear_fit(xs, ys) -> Optional[Fit]:
    """Least-squares line in Scalar arithmetic (values may exceed float range)."""
    pts = [(sc.scalar(x) if not isinstance(x, sc.ctx.mpf) else x,
            sc.scalar(y) if not isinstance(y, sc.ctx.mpf) else y) for x, y in zip(xs, ys)]
    n = len(pts)
    if n < 2:
        return None
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    if sxx == 0:
        return None
    sxy = sum((p[0] - mx) * (p[1] - my) for p in pts)
    slope = sxy / sxx
    intercept = my - slope * mx
    res = tuple(p[1] - (intercept + slope * p[0]) for p in pts)
    return Fit(slope, intercept, res, n)


def diverges(values, tail_fraction: float = 0.5, tolerance: float = SLOPE_TOLERANCE) -> bool:
    """Trajectory ``values[i]`` (index ``i + 1``) eventually strictly increasing
    with a positive trend against the log of the index."""
    n = len(values)
    if n < 3:
        return False
    start = min(n - 3, int(n * (1 - tail_fraction)))
    tail = values[start:]
    if any(not b > a for a, b in zip(tail, tail[1:])):
        return False
    fit = linear_fit([sc.ctx.log(i + 1) for i in range(start, n)], tail)
    return fit is not None and fit.slope > tolerance


@dataclass
class Verdict:
    check: str
    params: dict
    status: str
    witnesses: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)
    series: list = field(default_factory=list)  # (x, y) pairs for plot data
    notes: list = field(default_factory=list)
    parts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (HOLDS, FAILS, HEURISTIC):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == FAILS and not self.witnesses:
            raise ValueError("a failing verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status != FAILS

    @property
    def fails(self) -> bool:
        return self.status == FAILS


def fit_dict(fit: Optional[Fit]) -> dict:
    if fit is None:
        return {}
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "max_abs_residual": max(abs(r) for r in fit.residuals),
        "points": fit.count,
    }
