"""Smooth extension of sampled data by blending local interpolants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from ..interpolation import (
    HermiteData,
    PointSet,
    SampleFunction,
    hermite_interpolant,
    whitney_seminorm,
)
from ..numerics import backend as sc
from .patchwork import DEFAULT_PER_PATCH, FunctionSource, NormEstimate, PatchworkFunction


class ExtensionError(ValueError):
    pass


@dataclass
class Extension:
    F: PatchworkFunction
    norms: NormEstimate  # sups of |F^(j)|, j <= m, over the hull of K and [-m, m]
    step: object
    interpolated: int  # patches with at most n + 1 nodes
    represented: int  # patches handed to the caller's representative

    @property
    def case_i_only(self) -> bool:
        return self.represented == 0


def _lattice_step(eps, r: int, exact: bool):
    if exact and isinstance(eps, (int, Fraction)):
        return Fraction(eps) ** r
    eps = eps if isinstance(eps, sc.ctx.mpf) else sc.scalar(eps)
    return eps**r


def node_patches(K: PointSet, step) -> dict:
    """Lattice patches ``((l-1) h, (l+1) h)`` that meet ``K``, with their node indices."""
    out: dict = {}
    for x in K.nodes:
        base = int(sc.ctx.floor(x / step)) if not isinstance(step, Fraction) else (Fraction(x) / step).__floor__()
        for ell in (base - 1, base, base + 1):
            if ell in out:
                continue
            i, j = K.index_range((ell - 1) * step, (ell + 1) * step)
            if j > i:
                out[ell] = (i, j)
    return dict(sorted(out.items()))


def separating_step(K: PointSet):
    """Half the smallest gap: every patch of that step holds at most one node."""
    if len(K) < 2:
        return Fraction(1) if K.exact else sc.ctx.one
    gaps = [b - a for a, b in zip(K.nodes, K.nodes[1:])]
    return min(gaps) / 2


def construct_extension(
    f: SampleFunction,
    n: int,
    m: int,
    eps,
    r: int = 1,
    representative: Optional[Callable] = None,
    per_patch: int = DEFAULT_PER_PATCH,
) -> Extension:
    """Extend ``f`` from ``K`` by ``F = sum_l rho_l g_l`` on the lattice of step ``eps**r``.

    A patch with at most ``n + 1`` nodes gets the interpolating polynomial of
    degree ``N_l - 1``.  Crowded patches need ``representative``, a smooth
    ``G(x, order) -> Jet`` agreeing with ``f`` on ``K``.  Patches without
    nodes copy the nearest patch that has some, so ``F`` is a single
    polynomial between the clusters of ``K``.
    """
    if n < 0 or m < 0 or r < 1:
        raise ValueError("need n, m >= 0 and r >= 1")
    K = f.points
    if len(K) == 0:
        raise ValueError("empty point set")
    step = _lattice_step(eps, r, K.exact)
    if not step > 0:
        raise ValueError("eps must be positive")
    pieces, represented = {}, 0
    rep = FunctionSource(representative) if representative is not None else None
    for ell, (i, j) in node_patches(K, step).items():
        if j - i <= n + 1:
            pts = PointSet(K.nodes[i:j])
            data = HermiteData(pts, tuple((v,) for v in f.values[i:j]))
            pieces[ell] = hermite_interpolant(data)
        elif rep is None:
            raise ExtensionError(
                f"case (ii) requires representative: patch {ell} holds {j - i} nodes, more than n + 1 = {n + 1}"
            )
        else:
            pieces[ell] = rep
            represented += 1
    F = PatchworkFunction(step, pieces, fill="nearest")
    lo, hi = min(-m, K.nodes[0]), max(m, K.nodes[-1])
    norms = F.grid_norm(m, lo, hi, per_patch, K.nodes)
    return Extension(F, norms, step, len(pieces) - represented, represented)


@dataclass(frozen=True)
class Sandwich:
    lower: object  # Whitney seminorm of the data
    upper: object  # smallest grid norm among the representatives at hand
    exhaustive: bool  # whether the seminorm scanned every node tuple
    extension: Extension
    representative_norm: object = None  # grid norm of the caller's G, if given

    @property
    def ordered(self) -> bool:
        lower = sc.scalar(self.lower) if isinstance(self.lower, (int, Fraction)) else self.lower
        return lower <= self.upper


def quotient_norm_sandwich(
    f: SampleFunction,
    n: int,
    eps=None,
    r: int = 1,
    representative: Optional[Callable] = None,
    per_patch: int = DEFAULT_PER_PATCH,
) -> Sandwich:
    """Lower and upper bounds for ``inf ||F||_n`` over smooth ``F`` with ``F|_K = f``.

    Without ``eps`` the lattice separates the nodes (one node per patch).
    A caller-supplied ``representative`` is itself an extension, so its
    norm on the same domain also bounds the quotient norm from above.
    """
    if eps is None:
        eps, r = separating_step(f.points), 1
    ext = construct_extension(f, n, n, eps, r, representative, per_patch)
    semi = whitney_seminorm(f, n)
    upper, rep_norm = ext.norms.value, None
    if representative is not None:
        lo, hi = ext.norms.domain
        G = PatchworkFunction(ext.step, {0: FunctionSource(representative)}, fill="nearest")
        rep_norm = G.grid_norm(n, lo, hi, per_patch, f.points.nodes).value
        upper = min(upper, rep_norm)
    return Sandwich(semi.value, upper, semi.exhaustive, ext, rep_norm)
