"""Run every checker on a catalog sequence and combine the results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..interpolation import PointSet
from ..parallel import chunked, ordered_map
from .checks import (
    CellSweep,
    check_necessary_point,
    check_ratio,
    check_vogt,
    dn_divergence,
    eps_grid,
    sufficient_cells,
    sufficient_verdicts,
)
from .sequences import EXPECTED, SequenceSpec
from .verdict import FAILS, HOLDS, Verdict

POSITIVE, NEGATIVE, UNKNOWN = "positive", "negative", "unknown"


@dataclass(frozen=True)
class ClassifyParams:
    n: int = 0
    r: int = 2
    gamma: int = 2
    pairs: tuple = ((1, 1), (1, 2), (2, 2), (2, 3))  # (m, k) for the sufficient check
    p_grid: tuple = (1, 1.5, 2, 3, 5, 10, 20)
    necessary_n: tuple = (0, 1, 2, 3)
    necessary_s: tuple = (2, 3, 4, 5, 6)
    dn_n: tuple = (0, 1, 2, 3)
    dn_s: tuple = (1, 2, 3, 4, 5, 6)
    r_max: int = 200
    k_max: int = 12
    eps_min_exp: int = 2
    eps_max_exp: int = 40
    per_octave: int = 1
    workers: int = 1

    def grid(self) -> list:
        return eps_grid(self.eps_min_exp, self.eps_max_exp, self.per_octave)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "gamma": self.gamma,
            "pairs": [list(p) for p in self.pairs],
            "p_grid": list(self.p_grid),
            "necessary_n": list(self.necessary_n),
            "necessary_s": list(self.necessary_s),
            "dn_n": list(self.dn_n),
            "dn_s": list(self.dn_s),
            "r_max": self.r_max,
            "k_max": self.k_max,
            "eps_min_exp": self.eps_min_exp,
            "eps_max_exp": self.eps_max_exp,
            "per_octave": self.per_octave,
        }


@dataclass
class Classification:
    label: str
    family: str
    params: ClassifyParams
    sufficient: list = field(default_factory=list)
    necessary: list = field(default_factory=list)
    ratio: list = field(default_factory=list)
    vogt: Optional[Verdict] = None
    dn: list = field(default_factory=list)
    overall: str = UNKNOWN
    reasons: list = field(default_factory=list)
    consistent_with_paper: str = "unknown"

    def verdicts(self) -> list:
        out = list(self.sufficient) + list(self.necessary)
        if self.vogt is not None:
            out.append(self.vogt)
        return out + list(self.ratio) + list(self.dn)


# worker entry points (module level so they pickle)


def _sweep_chunk(K, n, r, k, grid, floor, indices):
    return sufficient_cells(K, n, r, k, grid, floor, indices)


def _necessary_job(K, n, s, grid):
    return check_necessary_point(K, n, s, grid)


def _dn_job(seq, n, s, r_max, k_max):
    return dn_verdict(seq, n, s, r_max, k_max)


def dn_verdict(seq: SequenceSpec, n: int, s: int, r_max: int = 200, k_max: int = 12) -> Verdict:
    """Wrap :func:`dn_divergence` as a verdict; fails when every ``r`` diverges."""
    res = dn_divergence(seq, n, s, r_max, k_max)
    r_star = res["r_star"]
    params = {"n": n, "s": s, "r_max": r_max, "k_max": k_max}
    witnesses = []
    if res["all_r_diverge"]:
        k = min(k for k, r in r_star.items() if r >= r_max)
        witnesses.append({"kind": "diverging-q", "k": k, "r": r_max})
    series = sorted(r_star.items())
    notes = ["r_star " + " ".join(f"k={k}:{r}" for k, r in series)]
    return Verdict("dn-sequence", params, FAILS if witnesses else HOLDS, witnesses, {}, series, notes)


def _merge_sweeps(parts: list) -> CellSweep:
    cells, missing, truncated = [], [], 0
    for p in parts:
        cells.extend(p.cells)
        missing.extend(p.missing)
        truncated += p.truncated
    return CellSweep(cells, missing, truncated)


def sufficient_bundle(K: PointSet, params: ClassifyParams, floor=None) -> list:
    grid = params.grid()
    by_k: dict = {}
    for m, k in params.pairs:
        by_k.setdefault(k, []).append(m)
    out = []
    for k in sorted(by_k):
        chunks = chunked(list(range(len(grid))), params.workers)
        jobs = [(K, params.n, params.r, k, grid, floor, c) for c in chunks]
        sweep = _merge_sweeps(ordered_map(_sweep_chunk, jobs, params.workers))
        out.extend(sufficient_verdicts(K, params.n, params.r, params.gamma, by_k[k], k, grid, sweep, floor))
    order = {pair: i for i, pair in enumerate(params.pairs)}
    out.sort(key=lambda v: order[(v.params["m"], v.params["k"])])
    return out


def necessary_bundle(K: PointSet, params: ClassifyParams) -> list:
    grid = params.grid()
    jobs = [(K, n, s, grid) for n in params.necessary_n for s in params.necessary_s]
    return ordered_map(_necessary_job, jobs, params.workers)


def truncation_floor(K: PointSet):
    """Smallest positive node: below it a truncated sequence is incomplete."""
    positive = [v for v in K.nodes if v > 0]
    return positive[0] if positive else None


def classify_pointset(K: PointSet, params: ClassifyParams = ClassifyParams(), floor=None, label="pointset") -> Classification:
    """Geometric checks only, for sets not given by a sequence."""
    out = Classification(label, "pointset", params)
    out.sufficient = sufficient_bundle(K, params, floor)
    out.necessary = necessary_bundle(K, params)
    _decide(out, halving_ok=False)
    return out


def classify(seq: SequenceSpec, params: ClassifyParams = ClassifyParams()) -> Classification:
    K = seq.pointset()
    out = Classification(seq.label(), seq.family, params)
    out.sufficient = sufficient_bundle(K, params, truncation_floor(K))
    out.necessary = necessary_bundle(K, params)

    halving_bad = seq.halving_violation()
    if seq.family != "almost-accumulation":
        out.vogt = check_vogt(seq)
        out.ratio = [check_ratio(seq, p) for p in params.p_grid]
        if halving_bad is None:
            jobs = [(seq, n, s, params.r_max, params.k_max) for n in params.dn_n for s in params.dn_s]
            out.dn = ordered_map(_dn_job, jobs, params.workers)
    if halving_bad is not None:
        out.reasons.append(f"halving fails at index {halving_bad}: ratio and dn tests not conclusive")
    _decide(out, halving_ok=halving_bad is None and seq.family != "almost-accumulation")
    expected = EXPECTED.get(seq.family)
    if expected is None or out.overall == UNKNOWN:
        out.consistent_with_paper = "unknown"
    else:
        out.consistent_with_paper = "yes" if out.overall == expected else "no"
    return out


def _decide(out: Classification, halving_ok: bool) -> None:
    negative = []
    if out.necessary and all(v.fails for v in out.necessary):
        negative.append("necessary-point fails for every tested (n, s)")
    if halving_ok and out.ratio and all(v.fails for v in out.ratio):
        negative.append("ratio a_l^p / a_(l+1) diverges for every tested p")
    if halving_ok and out.dn:
        ns = sorted({v.params["n"] for v in out.dn})
        if all(any(v.fails for v in out.dn if v.params["n"] == n) for n in ns):
            negative.append("dn-sequence: for every n some s diverges for all r <= r_max")
    positive = bool(out.sufficient) and all(v.status == HOLDS for v in out.sufficient)
    if negative:
        out.overall = NEGATIVE
        out.reasons.extend(negative)
        if positive:
            out.reasons.append("sufficient check also holds on the grid; necessary failures take precedence")
    elif positive:
        out.overall = POSITIVE
        out.reasons.append("sufficient check holds on the grid for every (m, k)")
    else:
        out.overall = UNKNOWN
        out.reasons.append("no criterion is conclusive on the grid")


__all__ = [
    "ClassifyParams",
    "Classification",
    "classify",
    "classify_pointset",
    "dn_verdict",
    "truncation_floor",
    "POSITIVE",
    "NEGATIVE",
    "UNKNOWN",
]
