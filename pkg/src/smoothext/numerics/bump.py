"""Smooth bump and the induced partition of unity on the integer lattice.

``psi(t) = exp(-1/(1 - t^2))`` on ``|t| < 1``; ``phi = psi / (psi(t-1) + psi(t) + psi(t+1))``.
The denominator equals ``sum_l psi(t - l)`` on the support of ``psi``, so the
integer translates of ``phi`` sum to one.
"""

from __future__ import annotations

from functools import lru_cache

from . import backend as sc
from .jet import Jet


def psi_jet(t, order: int) -> Jet:
    t = sc.scalar(t) if not isinstance(t, sc.ctx.mpf) else t
    if not -1 < t < 1:
        return Jet.zero(t, order)
    T = Jet.variable(t, order)
    u = 1 - T * T
    return (-u.reciprocal()).exp()


def bump_jet(x, order: int) -> Jet:
    """Jet of the normalized bump ``phi`` at ``x``; zero jet outside ``(-1, 1)``."""
    if order < 0:
        raise ValueError("order must be >= 0")
    x = sc.scalar(x) if not isinstance(x, sc.ctx.mpf) else x
    if not -1 < x < 1:
        return Jet.zero(x, order)
    num = psi_jet(x, order)
    den = num
    for shift in (-1, 1):
        den = den + psi_jet(x + shift, order).rebase(x)
    return num * den.reciprocal()


def scaled_patch_jet(x, eps, ell: int, order: int) -> Jet:
    """Jet of ``rho_{eps,ell}(x) = phi(x/eps - ell)`` at ``x``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = sc.scalar(x) if not isinstance(x, sc.ctx.mpf) else x
    eps = sc.scalar(eps) if not isinstance(eps, sc.ctx.mpf) else eps
    inner = bump_jet(x / eps - ell, order)
    inv = 1 / eps
    out, p = [], sc.ctx.one
    for c in inner.coeffs:
        out.append(c * p)
        p *= inv
    return Jet(x, tuple(out))


@lru_cache(maxsize=64)
def _offset_table(count: int, order: int, prec: int):
    offsets = [sc.ctx.mpf(i) / count for i in range(count)]
    left = tuple(bump_jet(t, order).coeffs for t in offsets)  # phi(t), cell's left patch
    right = tuple(bump_jet(t - 1, order).coeffs for t in offsets)  # phi(t - 1)
    return tuple(offsets), left, right


def lattice_offsets(count: int, order: int):
    """Cached bump jets at ``count`` equispaced offsets ``t`` in ``[0, 1)``.

    Returns ``(offsets, left, right)`` where ``left[i]`` holds the Taylor
    coefficients of ``phi`` at ``offsets[i]`` and ``right[i]`` those of
    ``phi(. - 1)``.  Grid evaluation of lattice partitions of unity reuses them
    for every cell.
    """
    return _offset_table(count, order, sc.get_precision())
