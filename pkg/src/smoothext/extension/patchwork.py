"""Functions glued from local pieces with the lattice partition of unity.

``F(x) = sum_l phi(x/h - l) g_l(x)``; on the cell ``[l h, (l+1) h)`` only the
patches ``l`` and ``l + 1`` are active.  Grid norms reuse the cached bump jets
at fixed cell offsets, so the sampling pattern is the same at every scale.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Optional

from ..interpolation import NewtonPolynomial, eval_jet
from ..numerics import backend as sc
from ..numerics.bump import bump_jet, lattice_offsets
from ..numerics.jet import Jet

DEFAULT_PER_PATCH = 64
DENSE_CELL_LIMIT = 4096
RUN_CELL_CAP = 4  # constant-source stretches get this many cells worth of samples


class PolySource:
    """A Newton polynomial used as a local piece."""

    def __init__(self, poly: NewtonPolynomial):
        self.poly = poly

    def coeffs(self, x, order: int) -> list:
        return list(eval_jet(self.poly, x, order).coeffs)

    def __repr__(self):
        return f"PolySource(degree<={self.poly.degree_bound})"


class FunctionSource:
    """Any ``f(x, order) -> Jet``; used for caller supplied representatives."""

    def __init__(self, fn: Callable):
        self.fn = fn

    def coeffs(self, x, order: int) -> list:
        return list(self.fn(x, order).coeffs)


def as_source(obj):
    if obj is None or isinstance(obj, (PolySource, FunctionSource)):
        return obj
    if isinstance(obj, NewtonPolynomial):
        return PolySource(obj)
    if callable(obj):
        return FunctionSource(obj)
    raise TypeError(f"cannot use {type(obj).__name__} as a patch source")


@dataclass(frozen=True)
class NormEstimate:
    """Grid sups of ``|F^(j)|`` for ``j = 0..order``."""

    order: int
    level_sups: tuple
    points: int
    per_patch: int
    domain: tuple

    @property
    def value(self):
        return max(self.level_sups)

    def upto(self, j: int):
        if j > self.order:
            raise ValueError("order exceeds the estimate")
        return max(self.level_sups[: j + 1])


def _scale(coeffs, inv_h):
    out, p = [], sc.ctx.one
    for c in coeffs:
        out.append(c * p)
        p *= inv_h
    return out


def _mul_add(acc, a, b):
    n = len(acc)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j in range(n - i):
            acc[i + j] += ai * b[j]


class PatchworkFunction:
    """``sum_l rho_l g_l`` on the lattice of step ``h``.

    ``pieces`` maps lattice indices to sources (``None`` is the zero
    function).  Indices not listed are zero with ``fill="zero"`` or copy
    the nearest listed index (ties to the left) with ``fill="nearest"``.
    """

    def __init__(self, step, pieces: dict, fill: str = "zero"):
        if fill not in ("zero", "nearest"):
            raise ValueError("fill must be 'zero' or 'nearest'")
        self.step = step if isinstance(step, sc.ctx.mpf) else sc.scalar(step)
        if not self.step > 0:
            raise ValueError("step must be positive")
        self.pieces = {int(k): as_source(v) for k, v in pieces.items()}
        self.fill = fill
        self._explicit = sorted(self.pieces)

    # structure ------------------------------------------------------------
    def source(self, ell: int):
        if ell in self.pieces:
            return self.pieces[ell]
        if self.fill == "zero" or not self._explicit:
            return None
        E = self._explicit
        i = bisect.bisect_left(E, ell)
        left = E[i - 1] if i > 0 else None
        right = E[i] if i < len(E) else None
        if right is None or (left is not None and ell - left <= right - ell):
            return self.pieces[left]
        return self.pieces[right]

    def cell_of(self, x) -> int:
        return int(sc.ctx.floor(x / self.step))

    def patch_interval(self, ell: int) -> tuple:
        return ((ell - 1) * self.step, (ell + 1) * self.step)

    # evaluation -----------------------------------------------------------
    def weights(self, x, order: int) -> list:
        """``[(l, coefficients of rho_l at x)]`` for the two active patches."""
        x = x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)
        ell = self.cell_of(x)
        t = x / self.step - ell
        inv = 1 / self.step
        return [
            (ell, _scale(bump_jet(t, order).coeffs, inv)),
            (ell + 1, _scale(bump_jet(t - 1, order).coeffs, inv)),
        ]

    def coeffs(self, x, order: int) -> list:
        x = x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)
        acc = [sc.ctx.zero] * (order + 1)
        for ell, w in self.weights(x, order):
            src = self.source(ell)
            if src is not None and any(w):
                _mul_add(acc, w, src.coeffs(x, order))
        return acc

    def jet(self, x, order: int) -> Jet:
        x = x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)
        return Jet(x, tuple(self.coeffs(x, order)))

    def __call__(self, x):
        return self.coeffs(x, 0)[0]

    # grid norms -----------------------------------------------------------
    def grid_norm(
        self,
        order: int,
        lo,
        hi,
        per_patch: int = DEFAULT_PER_PATCH,
        extra_points=(),
        minus: Optional[Callable] = None,
    ) -> NormEstimate:
        """Sup of ``|(F - minus)^(j)|`` (or ``|F^(j)|``) over a grid of ``[lo, hi]``.

        ``minus(x, order)`` returns a Jet.  Every lattice cell contributes
        ``per_patch`` equispaced points; constant-source stretches of a very
        fine lattice are sampled more sparsely.
        """
        ctx = sc.ctx
        lo = lo if isinstance(lo, ctx.mpf) else sc.scalar(lo)
        hi = hi if isinstance(hi, ctx.mpf) else sc.scalar(hi)
        if hi < lo:
            raise ValueError("empty domain")
        sups = [ctx.zero] * (order + 1)
        count = 0
        inv = 1 / self.step
        fact = [ctx.mpf(1)]
        for j in range(1, order + 1):
            fact.append(fact[-1] * j)

        def record(coeffs):
            nonlocal count
            count += 1
            for j in range(order + 1):
                v = abs(coeffs[j] * fact[j])
                if v > sups[j]:
                    sups[j] = v

        def diff(x, coeffs):
            if minus is None:
                return coeffs
            m = minus(x, order).coeffs
            return [a - b for a, b in zip(coeffs, m)]

        offsets, left, right = lattice_offsets(per_patch, order)
        left = [_scale(c, inv) for c in left]
        right = [_scale(c, inv) for c in right]

        def sample_cell(ell):
            s0, s1 = self.source(ell), self.source(ell + 1)
            if s0 is None and s1 is None and minus is None:
                return
            base = ell * self.step
            for i, t in enumerate(offsets):
                x = base + t * self.step
                if x < lo or x > hi:
                    continue
                if s0 is s1:
                    val = s0.coeffs(x, order) if s0 is not None else [ctx.zero] * (order + 1)
                else:
                    val = [ctx.zero] * (order + 1)
                    if s0 is not None:
                        _mul_add(val, left[i], s0.coeffs(x, order))
                    if s1 is not None:
                        _mul_add(val, right[i], s1.coeffs(x, order))
                record(diff(x, val))

        first, last = self.cell_of(lo), self.cell_of(hi)
        if last - first + 1 <= DENSE_CELL_LIMIT:
            for ell in range(first, last + 1):
                sample_cell(ell)
        else:
            self._sparse_sweep(first, last, sample_cell, lo, hi, per_patch, order, record, diff, minus is not None)
        for x in (lo, hi, *extra_points):
            x = x if isinstance(x, ctx.mpf) else sc.scalar(x)
            if lo <= x <= hi:
                record(diff(x, self.coeffs(x, order)))
        return NormEstimate(order, tuple(sups), count, per_patch, (lo, hi))

    def _sparse_sweep(self, first, last, sample_cell, lo, hi, per_patch, order, record, diff, has_minus):
        """Cells next to listed patches densely, the stretches between them sparsely."""
        ctx = sc.ctx
        dense = set()
        for e in self._explicit:
            for ell in (e - 1, e):
                if first <= ell <= last:
                    dense.add(ell)
        if self.fill == "nearest":
            E = self._explicit
            for a, b in zip(E, E[1:]):
                mid = (a + b) // 2
                for ell in (mid - 1, mid, mid + 1):
                    if first <= ell <= last and self.source(ell) is not self.source(ell + 1):
                        dense.add(ell)
        for ell in sorted(dense):
            sample_cell(ell)
        # stretches of cells whose two patches share one source
        marks = sorted(dense)
        bounds = [first - 1] + marks + [last + 1]
        for a, b in zip(bounds, bounds[1:]):
            if b - a <= 1:
                continue
            start, stop = a + 1, b - 1  # cells start..stop inclusive
            src = self.source(start)
            if src is None and not has_minus:
                continue
            n_cells = stop - start + 1
            if n_cells <= RUN_CELL_CAP:
                for ell in range(start, stop + 1):
                    sample_cell(ell)
                continue
            x0 = max(lo, start * self.step)
            x1 = min(hi, (stop + 1) * self.step)
            total = RUN_CELL_CAP * per_patch
            for i in range(total + 1):
                x = x0 + (x1 - x0) * i / total
                val = src.coeffs(x, order) if src is not None else [ctx.zero] * (order + 1)
                record(diff(x, val))
