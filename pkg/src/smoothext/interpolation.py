"""Confluent divided differences, Newton-form Hermite interpolation and
Whitney divided-difference seminorms."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Sequence

from .numerics import backend as sc
from .numerics.jet import Jet


class InsufficientJetOrder(ValueError):
    pass


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def _normalize(v, exact: bool):
    if exact:
        return Fraction(v)
    return v if isinstance(v, sc.ctx.mpf) else sc.scalar(v)


@dataclass(frozen=True)
class PointSet:
    """Sorted finite multiset of nodes with multiplicities.

    Rational nodes stay rational; anything else is converted to a Scalar.
    """

    nodes: tuple
    multiplicities: tuple = ()
    _keys: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        exact = _is_exact(nodes)
        nodes = tuple(_normalize(v, exact) for v in nodes)
        mults = tuple(self.multiplicities) or (1,) * len(nodes)
        if len(mults) != len(nodes):
            raise ValueError("multiplicities must align with nodes")
        if any(int(m) != m or m < 1 for m in mults):
            raise ValueError("multiplicities must be integers >= 1")
        for i in range(1, len(nodes)):
            if not nodes[i - 1] < nodes[i]:
                raise ValueError(f"nodes must be strictly increasing (position {i})")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "multiplicities", tuple(int(m) for m in mults))
        keys = nodes if exact else tuple(sc.order_key(v) for v in nodes)
        object.__setattr__(self, "_keys", keys)

    @classmethod
    def from_values(cls, values, multiplicities=None) -> "PointSet":
        """Sort and deduplicate ``values`` (multiplicities add up on merge)."""
        values = list(values)
        mults = list(multiplicities) if multiplicities is not None else [1] * len(values)
        exact = _is_exact(values)
        merged: dict = {}
        for v, m in zip(values, mults):
            v = _normalize(v, exact)
            merged[v] = merged.get(v, 0) + m
        items = sorted(merged.items(), key=lambda kv: kv[0])
        return cls(tuple(v for v, _ in items), tuple(m for _, m in items))

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    @property
    def exact(self) -> bool:
        return bool(self.nodes) and isinstance(self.nodes[0], Fraction)

    def key(self, x):
        return Fraction(x) if self.exact else sc.order_key(x)

    def index_range(self, lo, hi) -> tuple[int, int]:
        """Indices ``[i, j)`` of nodes in the open interval ``(lo, hi)``."""
        return (
            bisect.bisect_right(self._keys, self.key(lo)),
            bisect.bisect_left(self._keys, self.key(hi)),
        )

    def count_open(self, lo, hi) -> int:
        i, j = self.index_range(lo, hi)
        return max(0, j - i)

    def restrict(self, lo, hi) -> "PointSet":
        i, j = self.index_range(lo, hi)
        return PointSet(self.nodes[i:j], self.multiplicities[i:j])

    def confluent_vector(self) -> list:
        out = []
        for x, m in zip(self.nodes, self.multiplicities):
            out.extend([x] * m)
        return out


@dataclass(frozen=True)
class HermiteData:
    """Prescribed derivatives ``jets[i][j] = f^(j)(nodes[i])`` for ``j < mu``."""

    points: PointSet
    jets: tuple

    def __post_init__(self):
        jets = tuple(tuple(j) for j in self.jets)
        if len(jets) != len(self.points):
            raise ValueError("one jet per node required")
        object.__setattr__(self, "jets", jets)

    @classmethod
    def from_function(cls, points: PointSet, derivs) -> "HermiteData":
        """``derivs(x, count)`` returns the first ``count`` derivatives at ``x``."""
        return cls(points, tuple(tuple(derivs(x, m)) for x, m in zip(points.nodes, points.multiplicities)))


@dataclass(frozen=True)
class SampleFunction:
    points: PointSet
    values: tuple

    def __post_init__(self):
        if any(m != 1 for m in self.points.multiplicities):
            raise ValueError("sample functions live on simple point sets")
        if len(self.values) != len(self.points):
            raise ValueError("one value per node required")
        object.__setattr__(self, "values", tuple(self.values))

    @classmethod
    def from_callable(cls, points: PointSet, f) -> "SampleFunction":
        return cls(points, tuple(f(x) for x in points.nodes))


@dataclass(frozen=True)
class DividedDifferenceTable:
    nodes: tuple
    levels: tuple  # levels[s][i] = f[z_i, ..., z_{i+s}]

    @property
    def coefficients(self) -> tuple:
        return tuple(level[0] for level in self.levels)


def divided_differences(data: HermiteData, center=0, scale=1) -> DividedDifferenceTable:
    """Full confluent divided-difference table in ``t = (x - center) / scale``.

    The default is the plain variable ``x``.  Derivatives are rescaled by
    ``scale**j`` so the table refers to ``t`` throughout.
    """
    pts = data.points
    z, raw = [], []
    for x, mu, jet in zip(pts.nodes, pts.multiplicities, data.jets):
        if len(jet) < mu:
            raise InsufficientJetOrder(
                f"insufficient jet order at node {x}: need {mu} derivatives, got {len(jet)}"
            )
        t = (x - center) / scale
        z.extend([t] * mu)
        factor = 1
        scaled = []
        for j in range(mu):
            c = Fraction(jet[j]) if isinstance(jet[j], int) else jet[j]
            scaled.append(c * factor / factorial(j))
            factor = factor * scale
        raw.extend([scaled] * mu)
    n = len(z)
    if n == 0:
        raise ValueError("no interpolation data")
    level = [raw[i][0] for i in range(n)]
    levels = [tuple(level)]
    for s in range(1, n):
        nxt = []
        for i in range(n - s):
            if z[i] == z[i + s]:
                nxt.append(raw[i][s])  # f^(s)/s! for a repeated node
            else:
                nxt.append((level[i + 1] - level[i]) / (z[i + s] - z[i]))
        level = nxt
        levels.append(tuple(level))
    return DividedDifferenceTable(tuple(z), tuple(levels))


@dataclass(frozen=True)
class NewtonPolynomial:
    """``P(x) = sum_s d_s (t - z_0)...(t - z_{s-1})`` with ``t = (x - center)/scale``."""

    nodes: tuple
    coeffs: tuple
    center: object = 0
    scale: object = 1

    def __post_init__(self):
        if len(self.coeffs) != len(self.nodes) + 1:
            raise ValueError("need exactly one more coefficient than nodes")
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def from_monomial(cls, coeffs: Sequence) -> "NewtonPolynomial":
        zero = coeffs[0] * 0
        return cls((zero,) * (len(coeffs) - 1), tuple(coeffs))

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs) - 1

    def local(self, x):
        return (x - self.center) / self.scale

    def __call__(self, x):
        t = self.local(x)
        d, z = self.coeffs, self.nodes
        acc = d[-1]
        for s in range(len(d) - 2, -1, -1):
            acc = acc * (t - z[s]) + d[s]
        return acc

    def monomial_coefficients(self) -> list:
        """Coefficients of ``P`` as a polynomial in the local variable ``t``."""
        d, z = self.coeffs, self.nodes
        poly = [d[-1]]
        for s in range(len(d) - 2, -1, -1):
            shifted = [poly[0] * 0] + poly
            for i, c in enumerate(poly):
                shifted[i] -= z[s] * c
            shifted[0] += d[s]
            poly = shifted
        return poly

    def power_coefficients(self) -> list:
        """Coefficients of ``P`` in powers of ``x`` itself."""
        local = self.monomial_coefficients()
        if self.center == 0 and self.scale == 1:
            return local
        # Horner in x with t = (x - center) / scale
        inv = 1 if self.scale == 1 else 1 / self.scale
        a, b = inv, -self.center * inv
        poly = [local[-1]]
        for c in reversed(local[:-1]):
            nxt = [p * b for p in poly] + [poly[0] * 0]
            for i, p in enumerate(poly):
                nxt[i + 1] += p * a
            nxt[0] += c
            poly = nxt
        return poly


def hermite_interpolant(data: HermiteData, local: bool = True) -> NewtonPolynomial:
    """Interpolant of degree ``< N`` matching every prescribed derivative.

    With ``local`` the Newton form lives in the variable centred on the node
    hull and scaled to unit half-width, which keeps clustered nodes well
    conditioned.
    """
    nodes = data.points.nodes
    if local and len(nodes) > 1:
        center = (nodes[0] + nodes[-1]) / 2
        scale = (nodes[-1] - nodes[0]) / 2
    elif local:
        center, scale = nodes[0], 1
    else:
        center, scale = 0, 1
    table = divided_differences(data, center, scale)
    return NewtonPolynomial(table.nodes[:-1], table.coefficients, center, scale)


def eval_jet(p: NewtonPolynomial, x, order: int) -> Jet:
    """Jet of ``p`` at ``x`` by nested multiplication on truncated series."""
    if order < 0:
        raise ValueError("order must be >= 0")
    t = p.local(x)
    d, z = p.coeffs, p.nodes
    acc = [d[-1]] + [d[-1] * 0] * order
    for s in range(len(d) - 2, -1, -1):
        shift = t - z[s]
        # multiply the series by (shift + delta) and add the next coefficient
        for j in range(order, 0, -1):
            acc[j] = acc[j] * shift + acc[j - 1]
        acc[0] = acc[0] * shift + d[s]
    inv = 1 / p.scale if p.scale != 1 else 1
    factor = 1
    out = []
    for c in acc:
        out.append(c * factor)
        factor = factor * inv
    return Jet(x, tuple(out))


@dataclass(frozen=True)
class SeminormResult:
    value: object
    level_sups: tuple
    exhaustive: bool

    @property
    def heuristic(self) -> bool:
        return not self.exhaustive


DEFAULT_TUPLE_BUDGET = 5_000_000


def whitney_seminorm(f: SampleFunction, n: int, budget: int = DEFAULT_TUPLE_BUDGET) -> SeminormResult:
    """``sup |f[x_0..x_j]|`` over distinct nodes and ``j <= n``.

    Exhaustive when ``C(|K|, n+1) * (n+1)`` fits in ``budget``; otherwise only
    windows of consecutive nodes are scanned and the result is flagged.
    """
    xs, ys = f.points.nodes, f.values
    size = len(xs)
    if size == 0:
        raise ValueError("empty point set")
    top = min(n, size - 1)
    sups = [max(abs(v) for v in ys)]
    exhaustive = comb(size, top + 1) * (top + 1) <= budget
    if exhaustive:
        prev = {(i,): ys[i] for i in range(size)}
        for j in range(1, top + 1):
            cur = {}
            best = None
            for idx in combinations(range(size), j + 1):
                val = (prev[idx[1:]] - prev[idx[:-1]]) / (xs[idx[-1]] - xs[idx[0]])
                cur[idx] = val
                a = abs(val)
                if best is None or a > best:
                    best = a
            sups.append(best)
            prev = cur
    else:
        level = list(ys)
        for j in range(1, top + 1):
            level = [(level[i + 1] - level[i]) / (xs[i + j] - xs[i]) for i in range(size - j)]
            sups.append(max(abs(v) for v in level))
    return SeminormResult(max(sups), tuple(sups), exhaustive)
