"""Grid checks of the sufficient and necessary conditions."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..interpolation import PointSet
from ..numerics import backend as sc
from ..numerics.logsigned import LogSigned
from .selection import TRUNCATED, RegularPointSelector
from .sequences import SequenceSpec
from .verdict import (
    FAILS,
    HEURISTIC,
    HOLDS,
    SLOPE_TOLERANCE,
    Verdict,
    diverges,
    fit_dict,
    linear_fit,
)

MAX_WITNESSES = 10
DN_DEFAULT_D_MAX = 40


def eps_grid(min_exp: int = 2, max_exp: int = 40, per_octave: int = 1) -> list:
    """Geometric grid ``2^-i`` for ``i`` from ``min_exp`` to ``max_exp``."""
    if min_exp < 1 or max_exp < min_exp:
        raise ValueError("need 1 <= min_exp <= max_exp")
    ctx = sc.ctx
    out = []
    for i in range(min_exp * per_octave, max_exp * per_octave + 1):
        out.append(ctx.power(2, -ctx.mpf(i) / per_octave))
    return out


def _as_scalar(x):
    return x if isinstance(x, sc.ctx.mpf) else sc.scalar(x)


class _Neighbours:
    """Order keys and j-th nearest-neighbour distances of a point set."""

    def __init__(self, K: PointSet):
        self.nodes = tuple(_as_scalar(v) for v in K.nodes)
        self.keys = [sc.order_key(v) for v in self.nodes]
        self._dist = {}

    def count_open(self, lo, hi) -> int:
        i = bisect.bisect_right(self.keys, sc.order_key(lo))
        j = bisect.bisect_left(self.keys, sc.order_key(hi))
        return max(0, j - i)

    def jth_distances(self, j: int):
        """Sorted ``(key, index)`` of the distance to the ``j``-th nearest other node."""
        if j not in self._dist:
            nodes, N = self.nodes, len(self.nodes)
            rows = []
            for i, x in enumerate(nodes):
                left, right = i - 1, i + 1
                d = None
                for _ in range(j):
                    dl = x - nodes[left] if left >= 0 else None
                    dr = nodes[right] - x if right < N else None
                    if dl is None and dr is None:
                        d = None
                        break
                    if dr is None or (dl is not None and dl <= dr):
                        d, left = dl, left - 1
                    else:
                        d, right = dr, right + 1
                if d is not None:
                    rows.append((sc.order_key(d), i))
            rows.sort()
            self._dist[j] = rows
        return self._dist[j]

    def closer_than(self, j: int, radius) -> list:
        """Indices whose ``j``-th nearest neighbour is strictly closer than ``radius``."""
        rows = self.jth_distances(j)
        cut = bisect.bisect_left(rows, (sc.order_key(radius),))
        return sorted(i for _, i in rows[:cut])


# ---------------------------------------------------------------------------
# sufficient condition via regular tuples


@dataclass
class _Cell:
    x_index: int
    eps_index: int
    log_extent: object
    log_min_gap: object
    scheme: str
    nodes: tuple


def _excess(cell: _Cell, k: int, m: int, gamma, log_inv_eps):
    return (k - m) * cell.log_extent - k * cell.log_min_gap - gamma * m * log_inv_eps


@dataclass
class CellSweep:
    cells: list
    missing: list  # (x_index, eps_index) with fewer than k + 1 nodes in the eps window
    truncated: int  # cells skipped because they reach below the truncation floor


def sufficient_cells(
    K: PointSet, n: int, r, k: int, grid: Sequence, floor=None, eps_indices=None
) -> CellSweep:
    """Regular tuples for every grid cell whose ``eps^r`` window is crowded."""
    nb = _Neighbours(K)
    sel = RegularPointSelector(K, k, floor)
    cells, missing, truncated = [], [], 0
    memo = {}
    indices = range(len(grid)) if eps_indices is None else eps_indices
    for e in indices:
        eps = _as_scalar(grid[e])
        radius = sc.ctx.power(eps, r)
        for i in nb.closer_than(n + 1, radius):
            choice = sel.select(nb.nodes[i], eps)
            if choice is None:
                missing.append((i, e))
                continue
            if choice is TRUNCATED:
                truncated += 1
                continue
            # a scheme B tuple depends on eps alone
            stats = memo.get(e) if choice.scheme == "B" else None
            if stats is None:
                stats = (choice.log_extent(), choice.log_min_gap())
                if choice.scheme == "B":
                    memo[e] = stats
            cells.append(_Cell(i, e, stats[0], stats[1], choice.scheme, choice.nodes))
    return CellSweep(cells, missing, truncated)


def sufficient_verdicts(
    K: PointSet,
    n: int,
    r,
    gamma,
    ms: Iterable[int],
    k: int,
    grid: Optional[Sequence] = None,
    cells: Optional[CellSweep] = None,
    floor=None,
) -> list:
    """One verdict per ``m`` sharing a single cell sweep."""
    grid = list(grid) if grid is not None else eps_grid()
    if cells is None:
        cells = sufficient_cells(K, n, r, k, grid, floor)
    found, missing = cells.cells, cells.missing
    ctx = sc.ctx
    log_inv = [-ctx.log(_as_scalar(e)) for e in grid]
    nodes = [_as_scalar(v) for v in K.nodes]
    eps_limit = ctx.one / (4 * k)
    out = []
    for m in ms:
        params = {"n": n, "r": r, "gamma": gamma, "m": m, "k": k, "grid_size": len(grid)}
        best = {}
        for c in found:
            val = _excess(c, k, m, gamma, log_inv[c.eps_index])
            cur = best.get(c.eps_index)
            if cur is None or val > cur[0]:
                best[c.eps_index] = (val, c)
        used = [e for e in sorted(best) if _as_scalar(grid[e]) < eps_limit]
        fit = linear_fit([log_inv[e] for e in used], [best[e][0] for e in used])
        series = [(log_inv[e], best[e][0]) for e in sorted(best)]
        schemes = sorted({c.scheme for c in found})
        witnesses = []
        for i, e in missing[:MAX_WITNESSES]:
            witnesses.append({"kind": "no-tuple", "x": nodes[i], "eps": grid[e], "x_index": i})
        trend_bad = fit is not None and fit.slope > SLOPE_TOLERANCE
        if trend_bad:
            baseline = best[used[0]][0]
            worst_e = max(used, key=lambda e: (best[e][0], e))
            val, c = best[worst_e]
            witnesses.append(
                {
                    "kind": "excess-trend",
                    "x": nodes[c.x_index],
                    "eps": grid[worst_e],
                    "x_index": c.x_index,
                    "tuple": c.nodes,
                    "scheme": c.scheme,
                    "excess": val,
                    "baseline": baseline,
                }
            )
        if missing or trend_bad:
            status = FAILS
        elif "fallback" in schemes:
            status = HEURISTIC
        else:
            status = HOLDS
        notes = [
            f"cells={len(found)}",
            f"missing={len(missing)}",
            f"truncated={cells.truncated}",
            "schemes=" + ",".join(schemes),
        ]
        if not found and not missing:
            notes.append("vacuous: no crowded window on the grid")
        out.append(
            Verdict("sufficient", params, status, witnesses, {"excess_vs_log_inv_eps": fit_dict(fit)}, series, notes)
        )
    return out


def check_sufficient(
    K: PointSet, n: int, r, gamma, m: int, k: int, grid: Optional[Sequence] = None, floor=None
) -> Verdict:
    """Regular-tuple condition: ``log q - gamma m log(1/eps)`` must not trend upward."""
    return sufficient_verdicts(K, n, r, gamma, [m], k, grid, floor=floor)[0]


def recheck_sufficient_cell(K: PointSet, x, eps, n: int, r, gamma, m: int, k: int, floor=None):
    """Re-run one cell; returns the excess, ``None`` if no tuple, or ``False``
    if the cell's ``eps^r`` window is not crowded (or reaches the floor)."""
    nb = _Neighbours(K)
    x, eps = _as_scalar(x), _as_scalar(eps)
    radius = sc.ctx.power(eps, r)
    if nb.count_open(x - radius, x + radius) <= n + 1:
        return False
    choice = RegularPointSelector(K, k, floor).select(x, eps)
    if choice is TRUNCATED:
        return False
    if choice is None:
        return None
    cell = _Cell(0, 0, choice.log_extent(), choice.log_min_gap(), choice.scheme, choice.nodes)
    return _excess(cell, k, m, gamma, -sc.ctx.log(eps))


# ---------------------------------------------------------------------------
# geometric necessary condition


def necessary_violation(nb: _Neighbours, z, eps, n: int, s: int, inner_r=None) -> bool:
    if inner_r is None:
        inner_r = sc.ctx.power(eps, s)
    inner = nb.count_open(z - inner_r, z + inner_r)
    if inner < n + 2:
        return False
    return nb.count_open(z - eps, z + eps) == inner


def check_necessary_point(
    K: PointSet, n: int, s: int, grid: Optional[Sequence] = None, neighbours=None
) -> Verdict:
    """Crowded ``eps^s`` windows must leave a node in the annulus out to ``eps``."""
    if s < 2:
        raise ValueError("s must be >= 2")
    grid = [_as_scalar(e) for e in (grid if grid is not None else eps_grid())]
    grid = [e for e in grid if 0 < e < sc.ctx.mpf(1) / 2]
    nb = neighbours or _Neighbours(K)
    witnesses, total = [], 0
    for e, eps in enumerate(grid):
        inner_r = sc.ctx.power(eps, s)
        for i in nb.closer_than(n + 1, inner_r):
            z = nb.nodes[i]
            if necessary_violation(nb, z, eps, n, s, inner_r):
                total += 1
                if len(witnesses) < MAX_WITNESSES:
                    witnesses.append({"kind": "empty-annulus", "z": z, "eps": eps, "z_index": i})
    params = {"n": n, "s": s, "grid_size": len(grid)}
    status = FAILS if witnesses else HOLDS
    return Verdict("necessary-point", params, status, witnesses, {}, [], [f"violations={total}"])


# ---------------------------------------------------------------------------
# sequence checks (log values only)


def check_ratio(seq: SequenceSpec, p) -> Verdict:
    """Trajectory ``p log a_l - log a_{l+1}``; fails when it diverges upward."""
    logs = seq.log_values
    p = _as_scalar(p)
    traj = [p * logs[i] - logs[i + 1] for i in range(len(logs) - 1)]
    bad = diverges(traj)
    top = max(range(len(traj)), key=lambda i: (traj[i], i))
    params = {"p": p, "length": len(logs)}
    witnesses = []
    if bad:
        witnesses.append({"kind": "diverging-ratio", "index": len(traj), "value": traj[-1], "sup_index": top + 1})
    fit = linear_fit([sc.ctx.log(i + 1) for i in range(len(traj))], traj)
    v = Verdict(
        "ratio",
        params,
        FAILS if bad else HOLDS,
        witnesses,
        {"log_ratio_vs_log_index": fit_dict(fit)},
        [(i + 1, t) for i, t in enumerate(traj)],
        [f"sup={sc.ctx.nstr(traj[top], 12)} at l={top + 1}"],
    )
    v.params["sup"] = traj[top]
    return v


def ratio_term(seq: SequenceSpec, p, ell: int):
    """``log(a_l^p / a_{l+1})``, the quantity a ratio witness refers to."""
    return _as_scalar(p) * seq.log_term(ell) - seq.log_term(ell + 1)


def _log_differences(logs):
    """``log(a_l - a_{l+1})`` from log values."""
    ctx = sc.ctx
    return [logs[i] + ctx.log(-ctx.expm1(logs[i + 1] - logs[i])) for i in range(len(logs) - 1)]


def check_vogt(seq: SequenceSpec, q_max: int = 10) -> Verdict:
    """Convexity, bounded consecutive ratios, and ``a^q/(a_l - a_{l+1})`` bounded."""
    logs = seq.log_values
    logd = _log_differences(logs)
    parts = {}

    bad = next((i for i in range(len(logd) - 1) if logd[i + 1] > logd[i]), None)
    parts["a"] = Verdict(
        "vogt-a-convex",
        {},
        HOLDS if bad is None else FAILS,
        [] if bad is None else [{"kind": "difference-increases", "index": bad + 2}],
    )

    ratio = [logs[i] - logs[i + 1] for i in range(len(logs) - 1)]
    div = diverges(ratio)
    parts["b"] = Verdict(
        "vogt-b-ratio",
        {},
        FAILS if div else HOLDS,
        [{"kind": "diverging-ratio", "index": len(ratio), "value": ratio[-1]}] if div else [],
        {},
        [(i + 1, v) for i, v in enumerate(ratio)],
    )

    q_found = None
    for q in range(1, q_max + 1):
        traj = [q * logs[i] - logd[i] for i in range(len(logd))]
        if not diverges(traj):
            q_found = q
            break
    parts["c"] = Verdict(
        "vogt-c-power",
        {"q": q_found if q_found is not None else f"none <= {q_max}"},
        HOLDS if q_found is not None else FAILS,
        [] if q_found is not None else [{"kind": "no-q", "q_max": q_max}],
    )

    failing = [name for name, v in parts.items() if v.fails]
    witnesses = [{"kind": "sub-condition", "part": name} for name in failing]
    return Verdict("vogt", {"q": q_found}, FAILS if failing else HOLDS, witnesses, parts=parts)


def _check_halving(seq: SequenceSpec, upto: int):
    bad = seq.halving_violation(upto)
    if bad is not None:
        raise ValueError(f"halving condition |a_l| < |a_(l-1)|/2 violated at index {bad}")


def dn_exponents(n: int, s: int, r, k: int):
    """Weights of ``log a_d``, ``log a_(d+k)`` and each ``log a_(d+j)``."""
    M = 2 * n + 2
    return r - 2 * k * M, -(3 * n + 4), 4 * M


def dn_sequence_q(seq: SequenceSpec, n: int, s: int, r, k: int, d: int) -> LogSigned:
    """``log q_d`` for the test-polynomial necessary condition."""
    if not k >= s >= 1:
        raise ValueError("need k >= s >= 1")
    if d < 1 or d + k > len(seq.log_values):
        raise ValueError("index d + k outside the truncation")
    _check_halving(seq, len(seq.log_values))
    w0, wk, wj = dn_exponents(n, s, r, k)
    logs = seq.log_values
    total = w0 * logs[d - 1] + wk * logs[d + k - 1]
    for j in range(1, k - s + 1):
        total += wj * logs[d + j - 1]
    return LogSigned(1, total)


def dn_sequence_q_direct(seq: SequenceSpec, n: int, s: int, r, k: int, d: int) -> LogSigned:
    """Same quantity from linear Scalar values of ``a_l`` (cross-check)."""
    if not k >= s >= 1:
        raise ValueError("need k >= s >= 1")
    _check_halving(seq, len(seq.log_values))
    if seq.family == "exp-factorial" and d + k > 30:
        raise ValueError("factorial decay is only materialized for l <= 30")
    a = [sc.ctx.exp(v) for v in seq.log_values[: d + k]]
    w0, wk, wj = dn_exponents(n, s, r, k)
    q = a[d - 1] ** w0 * a[d + k - 1] ** wk
    for j in range(1, k - s + 1):
        q *= a[d + j - 1] ** wj
    return LogSigned.from_value(q)


def dn_q_trajectory(seq: SequenceSpec, n: int, s: int, r, k: int, ds: Iterable[int]) -> list:
    return [dn_sequence_q(seq, n, s, r, k, d).logmag for d in ds]


def dn_divergence(seq: SequenceSpec, n: int, s: int, r_max: int = 200, k_max: int = 12, ds=None) -> dict:
    """For each ``k`` the largest ``r <= r_max`` with a diverging ``log q_d``.

    Raising ``r`` only lowers ``log q_d`` by ``r log(1/a_d)``, so divergence is
    monotone in ``r`` and a bisection per ``k`` suffices.
    """
    logs = seq.log_values
    _check_halving(seq, len(logs))
    if ds is None:
        ds = range(1, min(DN_DEFAULT_D_MAX, len(logs) - k_max) + 1)
    ds = list(ds)
    r_star = {}
    for k in range(s, k_max + 1):
        base = dn_q_trajectory(seq, n, s, 0, k, ds)
        la = [logs[d - 1] for d in ds]

        def div(r):
            return diverges([b + r * x for b, x in zip(base, la)])

        if not div(1):
            r_star[k] = 0
            continue
        lo, hi = 1, r_max
        if div(hi):
            r_star[k] = r_max
            continue
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if div(mid):
                lo = mid
            else:
                hi = mid
        r_star[k] = lo
    covered = max(r_star.values(), default=0) >= r_max
    return {"n": n, "s": s, "r_max": r_max, "k_max": k_max, "r_star": r_star, "all_r_diverge": covered}
