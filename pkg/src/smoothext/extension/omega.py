"""Decomposition ``f = (f - g) + g`` inside a closed ideal of smooth functions.

``g`` is glued from Hermite interpolants of degree ``m = 2n + 1`` on the
lattice patches ``((l-1) eps, (l+1) eps)``.  Each interpolant matches every
prescribed zero of the ideal in its patch, so ``g`` stays in the ideal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..interpolation import HermiteData, PointSet, hermite_interpolant
from ..numerics import backend as sc
from ..numerics.jet import Jet
from .patchwork import DEFAULT_PER_PATCH, NormEstimate, PatchworkFunction

MEMBERSHIP_BITS = 150


class NotInIdeal(ValueError):
    def __init__(self, node, order, value):
        super().__init__(f"function is not in the ideal: derivative {order} at node {node} is {sc.ctx.nstr(value, 8)}")
        self.node = node
        self.order = order


@dataclass(frozen=True)
class IdealSpec:
    """Closed ideal given by its (truncated) zero set with multiplicities."""

    zeros: PointSet

    def offending(self, fn: Callable, bits: int = MEMBERSHIP_BITS):
        """First ``(node, j, value)`` with ``|fn^(j)(node)|`` above tolerance, else None.

        ``fn(x, order)`` returns a Jet.  The tolerance is ``2**-bits`` relative
        to the largest coefficient of the jet (and at least absolute).
        """
        for x, mu in zip(self.zeros.nodes, self.zeros.multiplicities):
            x = x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)
            jet = fn(x, mu - 1)
            scale = max([sc.ctx.one] + [abs(c) for c in jet.coeffs])
            tol = sc.ctx.ldexp(scale, -bits)
            for j, c in enumerate(jet.coeffs[:mu]):
                if abs(c) > tol:
                    return x, j, c
        return None

    def contains(self, fn: Callable, bits: int = MEMBERSHIP_BITS) -> bool:
        return self.offending(fn, bits) is None

    def require(self, fn: Callable, bits: int = MEMBERSHIP_BITS) -> None:
        bad = self.offending(fn, bits)
        if bad is not None:
            raise NotInIdeal(*bad)


@dataclass
class OmegaResult:
    g: PatchworkFunction
    diff_norm: NormEstimate  # ||f - g||_n over [-n, n]
    g_norm: NormEstimate  # ||g||_k over [-k, k]
    eps: object
    m: int
    zeroed: int  # patches forced to zero (crowded or far out)


def patch_data(ideal: IdealSpec, ell: int, eps, m: int):
    """Hermite nodes for patch ``l``: the ideal's zeros raised to total ``m + 1``.

    Returns None when the patch holds more than ``m + 1`` prescribed zeros.
    """
    Z = ideal.zeros
    lo, hi = (ell - 1) * eps, (ell + 1) * eps
    i, j = Z.index_range(lo, hi)
    i, j = max(i, 0), max(i, j)
    nodes = [sc.scalar(v) if not isinstance(v, sc.ctx.mpf) else v for v in Z.nodes[i:j]]
    mults = list(Z.multiplicities[i:j])
    total = sum(mults)
    if total > m + 1:
        return None
    mid = ell * eps
    if not nodes:
        return [mid], [m + 1]
    # nearest node to the midpoint, the smaller one on ties
    best = min(range(len(nodes)), key=lambda q: (abs(nodes[q] - mid), q))
    mults[best] += m + 1 - total
    return nodes, mults


def omega_decompose(
    f: Callable,
    ideal: IdealSpec,
    n: int,
    k: int,
    eps,
    per_patch: int = DEFAULT_PER_PATCH,
    check: bool = True,
) -> OmegaResult:
    """Split ``f`` into ``(f - g) + g`` with ``g`` in the ideal.

    ``f(x, order)`` returns a Jet and must have jets to order ``2n + 1``.
    Norms are grid estimates: ``||f - g||_n`` on ``[-n, n]`` and ``||g||_k``
    on ``[-k, k]`` (plus every zero-set node in those ranges).
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    eps = sc.scalar(eps) if not isinstance(eps, sc.ctx.mpf) else eps
    if not eps > 0:
        raise ValueError("eps must be positive")
    if ideal.zeros.exact:
        Z = ideal.zeros
        ideal = IdealSpec(PointSet(tuple(sc.scalar(v) for v in Z.nodes), Z.multiplicities))
    if check:
        ideal.require(f)
    m = 2 * n + 1
    reach = int(sc.ctx.floor((n + 1) / eps))
    pieces, zeroed = {}, 0
    for ell in range(-reach, reach + 1):
        data = patch_data(ideal, ell, eps, m)
        if data is None:
            pieces[ell] = None
            zeroed += 1
            continue
        nodes, mults = data
        jets = tuple(tuple(f(x, mu - 1).derivatives()) for x, mu in zip(nodes, mults))
        if all(not c for jet in jets for c in jet):
            pieces[ell] = None  # f vanishes to full order there
            continue
        pieces[ell] = hermite_interpolant(HermiteData(PointSet(tuple(nodes), tuple(mults)), jets))
    g = PatchworkFunction(eps, pieces, fill="zero")

    def in_range(bound):
        return [x for x in ideal.zeros.nodes if -bound <= x <= bound]

    # grid_norm measures g - f; the absolute values are the same
    diff_norm = g.grid_norm(n, -n, n, per_patch, in_range(n), minus=f)
    g_norm = g.grid_norm(k, -k, k, per_patch, in_range(k))
    return OmegaResult(g, diff_norm, g_norm, eps, m, zeroed)


def flat_oscillation(x, order: int) -> Jet:
    """``sin(pi/x) exp(-1/x)`` for ``x > 0`` and 0 otherwise.

    Smooth, flat at 0 and zero at every ``1/j``: a member of the ideal of
    ``{0} U {1/j}`` with simple zeros.
    """
    x = x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)
    if x <= 0:
        return Jet.zero(x, order)
    inv = Jet.variable(x, order).reciprocal()
    return (inv * sc.ctx.pi).sin() * (-inv).exp()
