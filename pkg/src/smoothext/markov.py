"""Local Markov factors on finite point sets.

The best constant ``M`` in ``|P^(j)(y)| <= M sup_S |P|`` over polynomials of
degree ``<= k`` is computed exactly as a linear program, and in the
interpolatory case ``|S| = k + 1`` from the Lagrange basis directly.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Optional

from .interpolation import PointSet
from .numerics import backend as sc
from .numerics.jet import Jet
from .numerics.logsigned import LogSigned
from .simplex import invert, solve_standard_form


@dataclass(frozen=True)
class MarkovQuery:
    points: PointSet
    y: object
    k: int
    j: int

    def __post_init__(self):
        if not 0 <= self.j <= self.k:
            raise ValueError("derivative order must satisfy 0 <= j <= k")
        if len(self.points) < 1:
            raise ValueError("empty point set")


@dataclass(frozen=True)
class MarkovResult:
    value: object
    chebyshev_coeffs: tuple  # extremal polynomial in the Chebyshev basis of [lo, hi]
    interval: tuple
    active: tuple  # indices of S where |P| = 1
    certificate_error: object  # max | |P(t_i)| - 1 | over the active set
    pivots: int


def _chebyshev_rows(tau, k):
    rows = []
    for t in tau:
        row = [t * 0 + 1, t]
        for _ in range(2, k + 1):
            row.append(2 * t * row[-1] - row[-2])
        rows.append(row[: k + 1])
    return rows


def _chebyshev_derivatives(tau_y, k, j):
    """``T_i^(j)(tau_y)`` for ``i = 0..k``."""
    T = Jet.variable(tau_y, j)
    prev, cur = Jet.constant(tau_y, sc.one_like(tau_y), j), T
    vals = [prev, cur]
    for _ in range(2, k + 1):
        prev, cur = cur, 2 * T * cur - prev
        vals.append(cur)
    return [v.derivative(j) for v in vals[: k + 1]]


def _affine_to_unit(nodes, y):
    lo = min(nodes[0], y)
    hi = max(nodes[-1], y)
    if hi == lo:
        return lo, hi, None
    return lo, hi, 2 / (hi - lo)


def _initial_basis(tau, rows, b, k):
    """Feasible dual basis on the points nearest the Chebyshev extrema."""
    keys = [sc.order_key(t) if not sc.is_rational(t) else t for t in tau]
    chosen = []
    for i in range(k + 1):
        target = sc.ctx.cos(sc.ctx.pi * i / k) if k else sc.ctx.zero
        if sc.is_rational(tau[0]):
            target = sc.to_float(target)
            pos = bisect.bisect_left(keys, target)
        else:
            pos = bisect.bisect_left(keys, sc.order_key(target))
        for cand in sorted(
            {max(0, min(len(tau) - 1, pos + d)) for d in range(-k - 1, k + 2)},
            key=lambda c: (abs(tau[c] - target), c),
        ):
            if cand not in chosen:
                chosen.append(cand)
                break
    if len(chosen) < k + 1:
        return None
    B = [[rows[c][i] for c in chosen] for i in range(k + 1)]
    binv = invert(B)
    if binv is None:
        return None
    w = [sum(r[i] * b[i] for i in range(k + 1)) for r in binv]
    return [2 * c if wi >= 0 else 2 * c + 1 for c, wi in zip(chosen, w)]


def markov_extremal(q: MarkovQuery) -> MarkovResult:
    """Solve the extremal problem and report the active set."""
    S, y, k, j = q.points.nodes, q.y, q.k, q.j
    if len(S) < k + 1:
        raise ValueError("unbounded: fewer than k+1 constraint points")
    lo, hi, slope = _affine_to_unit(S, y)
    one = sc.one_like(S[0])
    if slope is None:  # single point and k = 0
        val = one if j == 0 else one - one
        return MarkovResult(val, (one,), (lo, hi), (0,), one - one, 0)
    mid = (lo + hi) / 2
    tau = [(s - mid) * slope for s in S]
    rows = _chebyshev_rows(tau, k)
    g = [d * slope**j for d in _chebyshev_derivatives((y - mid) * slope, k, j)]
    gscale = max(abs(v) for v in g)
    zero = one - one
    if gscale == 0:
        return MarkovResult(zero, tuple([zero] * (k + 1)), (lo, hi), (), zero, 0)
    b = [v / gscale for v in g]
    # dual: min sum(u + v)  s.t.  A^T (u - v) = g,  u, v >= 0
    columns = []
    for row in rows:
        columns.append(row)
        columns.append([-v for v in row])
    cost = [one] * len(columns)
    res = solve_standard_form(columns, b, cost, initial_basis=_initial_basis(tau, rows, b, k))
    coeffs = tuple(res.duals)
    value = sum((bi * ci for bi, ci in zip(b, coeffs)), zero) * gscale
    active = tuple(sorted({idx // 2 for idx in res.basis if idx < len(columns)}))
    err = zero
    for i in active:
        p = sum((c * t for c, t in zip(coeffs, rows[i])), zero)
        err = max(err, abs(abs(p) - 1))
    return MarkovResult(value, coeffs, (lo, hi), active, err, res.pivots)


def markov_factor_lp(q: MarkovQuery):
    return markov_extremal(q).value


def lagrange_derivatives(nodes, y, j: int) -> list:
    """``L_nu^(j)(y)`` for every Lagrange basis polynomial of ``nodes``."""
    out = []
    for nu, a in enumerate(nodes):
        jet = Jet.constant(y, sc.one_like(y), j)
        for i, b in enumerate(nodes):
            if i == nu:
                continue
            jet = jet * ((Jet.variable(y, j) - b) / (a - b))
        out.append(jet.derivative(j))
    return out


def markov_factor_lagrange(points: PointSet, y, j: int):
    """``sum_nu |L_nu^(j)(y)|``: the exact factor when ``|S| = k + 1``."""
    if len(points) < 1:
        raise ValueError("size mismatch: need k+1 >= 1 nodes")
    if j > len(points) - 1:
        raise ValueError("size mismatch: derivative order exceeds k = |S| - 1")
    total = 0
    for v in lagrange_derivatives(points.nodes, y, j):
        total = total + abs(v)
    return total


@dataclass(frozen=True)
class RegularTuple:
    """``k + 1`` distinct points of ``K`` chosen for a Lagrange-basis estimate."""

    nodes: tuple
    m: int
    scheme: str = "given"
    _qlog: Optional[LogSigned] = field(default=None, repr=False, compare=False)

    @property
    def k(self) -> int:
        return len(self.nodes) - 1

    @property
    def quotient_log(self) -> LogSigned:
        if self._qlog is None:
            object.__setattr__(self, "_qlog", lagrange_quotient(self))
        return self._qlog


def lagrange_quotient(t: RegularTuple) -> LogSigned:
    """``max_gap^(k-m) / min_gap^k`` in log form."""
    nodes = sorted(t.nodes)
    k, m = t.k, t.m
    if k == 0:
        return LogSigned(1, sc.ctx.zero)
    gaps = [nodes[i + 1] - nodes[i] for i in range(k)]
    if any(g == 0 for g in gaps):
        raise ValueError("duplicate nodes in regular tuple")
    log_min = sc.log(min(gaps))
    log_max = sc.log(nodes[-1] - nodes[0])
    return LogSigned(1, (k - m) * log_max - k * log_min)
