"""Choosing ``k + 1`` well separated points of ``K`` near a given point."""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from ..interpolation import PointSet
from ..numerics import backend as sc


@dataclass(frozen=True)
class Selection:
    nodes: tuple  # y_0, ..., y_k in the order they were chosen
    scheme: str  # "A", "B" or "fallback"
    window_count: int

    def gaps(self):
        s = sorted(self.nodes)
        return [b - a for a, b in zip(s, s[1:])]

    def log_extent(self):
        s = sorted(self.nodes)
        return sc.ctx.log(s[-1] - s[0])

    def log_min_gap(self):
        return sc.ctx.log(min(self.gaps()))


def ladder_exponent(k: int):
    """The ``p > 1`` solving ``k p^(2k+1) = k + 1``."""
    return sc.ctx.power(sc.ctx.mpf(k + 1) / k, sc.ctx.one / (2 * k + 1))


TRUNCATED = "truncated"


class RegularPointSelector:
    """Per-``(K, k)`` cache for :func:`select_regular_points`.

    ``floor`` marks a finite truncation of an infinite set: nodes of the full
    set may be missing in ``(min K, floor)``.  When the gap walk would need
    to look there the selection reports :data:`TRUNCATED` instead of a tuple.
    The ladder reports truncation only when its ratio constant has settled
    away from the cut-off.
    """

    def __init__(self, K: PointSet, k: int, floor=None):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.K = K
        self.k = k
        self.floor = None if floor is None else (floor if isinstance(floor, sc.ctx.mpf) else sc.scalar(floor))
        self._b_cache = {}
        self.nodes = tuple(v if isinstance(v, sc.ctx.mpf) else sc.scalar(v) for v in K.nodes)
        self.keys = [sc.order_key(v) for v in self.nodes]
        self._ladder = None

    # scheme B data: offsets from the smallest node, in log form
    def _ladder_data(self):
        if self._ladder is None:
            ctx = sc.ctx
            z0 = self.nodes[0]
            logs = [ctx.log(v - z0) for v in self.nodes[1:]]
            p = ladder_exponent(self.k)
            terms = [p * hi - lo for lo, hi in zip(logs, logs[1:])]
            worst = max([ctx.ln2] + terms)
            # offsets ascend, so small indices sit next to the floor; a maximum
            # there means the ratio bound is still growing at the cut-off
            peak = max(range(len(terms)), key=lambda i: (terms[i], -i)) if terms else 0
            stable = not terms or worst == ctx.ln2 or peak >= len(terms) // 4
            self._ladder = (p, -worst, logs, [sc.order_key(v) for v in logs], stable)
        return self._ladder

    def window(self, x, eps):
        lo = bisect.bisect_right(self.keys, sc.order_key(x - eps))
        hi = bisect.bisect_left(self.keys, sc.order_key(x + eps))
        return lo, hi

    def select(self, x, eps, schemes=("A", "B", "fallback")):
        """A :class:`Selection`, ``None`` (too few nodes) or :data:`TRUNCATED`."""
        x = x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)
        eps = eps if isinstance(eps, sc.ctx.mpf) else sc.scalar(eps)
        lo, hi = self.window(x, eps)
        count = hi - lo
        if count < self.k + 1:
            return None
        truncated = False
        for name in schemes:
            if name == "A":
                nodes = self._scheme_a(x, eps, lo)
            elif name == "B":
                nodes = self._scheme_b(eps) if lo == 0 else None
            else:
                if truncated:
                    return TRUNCATED
                nodes = self._fallback(lo, hi)
            if nodes is TRUNCATED:
                truncated = True
            elif nodes is not None:
                return Selection(tuple(nodes), name, count)
        return TRUNCATED if truncated else None

    def _scheme_a(self, x, eps, lo):
        """Walk down from ``x`` taking the next node at least ``eps/4k`` lower."""
        k, keys, nodes = self.k, self.keys, self.nodes
        start = bisect.bisect_right(keys, sc.order_key(x)) - 1
        if start < lo or nodes[start] != x:
            return None
        step = eps / (4 * k)
        floor = self.floor
        out = [x]
        cur = x
        for _ in range(k):
            target = cur - step
            # the full set has nodes in (min K, floor) that the truncation lacks
            if floor is not None and nodes[0] < target < floor and target > x - eps:
                return TRUNCATED
            idx = bisect.bisect_right(keys, sc.order_key(target)) - 1
            if idx < lo:
                return None
            cur = nodes[idx]
            out.append(cur)
        return out

    def _scheme_b(self, eps):
        """One node from every second interval of the geometric ladder at ``min K``.

        Only called when the anchor ``min K`` lies in the window; the result
        then depends on ``eps`` alone and is cached.
        """
        key = sc.order_key(eps)
        if key not in self._b_cache:
            self._b_cache[key] = self._ladder_pick(eps)
        return self._b_cache[key]

    def _ladder_pick(self, eps):
        if not eps < 1 or len(self.nodes) < 2:
            return None
        ctx = sc.ctx
        p, log_rho, logs, lkeys, stable = self._ladder_data()
        z0 = self.nodes[0]
        lam = ctx.log(eps)
        bounds = [lam]
        for _ in range(2 * self.k + 1):
            lam = log_rho + p * lam
            bounds.append(lam)
        out = []
        for j in range(self.k + 1):
            top, bottom = bounds[2 * j], bounds[2 * j + 1]
            idx = bisect.bisect_left(lkeys, sc.order_key(top)) - 1  # largest offset < top
            if idx < 0 or logs[idx] < bottom:
                if stable and self.floor is not None and ctx.log(self.floor - z0) > bottom:
                    return TRUNCATED
                return None
            out.append(self.nodes[idx + 1])
        if any(not v - z0 < eps for v in out):
            return None
        return out

    def _fallback(self, lo, hi):
        """Greedy farthest-point sampling inside the window (maximin spacing)."""
        nodes, keys = self.nodes, self.keys
        chosen = [lo, hi - 1]
        while len(chosen) < self.k + 1:
            chosen.sort()
            best = None
            for a, b in zip(chosen, chosen[1:]):
                if b - a < 2:
                    continue
                mid = (nodes[a] + nodes[b]) / 2
                pos = bisect.bisect_left(keys, sc.order_key(mid), a + 1, b)
                for c in (pos - 1, pos):
                    if a < c < b:
                        score = min(nodes[c] - nodes[a], nodes[b] - nodes[c])
                        if best is None or score > best[0]:
                            best = (score, c)
            if best is None:
                return None
            chosen.append(best[1])
        chosen.sort(reverse=True)
        return [nodes[i] for i in chosen]


def select_regular_points(K: PointSet, x, eps, k: int, floor=None):
    """``k + 1`` distinct nodes of ``K`` in ``(x - eps, x + eps)`` or ``None``.

    Tries the gap-threshold walk, then the ladder at ``min K``, then
    farthest-point sampling; the scheme used is recorded on the result.
    """
    return RegularPointSelector(K, k, floor).select(x, eps)
