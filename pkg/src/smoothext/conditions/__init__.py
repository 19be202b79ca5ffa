"""Sufficient and necessary conditions evaluated on finite grids."""

from .checks import (
    CellSweep,
    check_necessary_point,
    check_ratio,
    check_sufficient,
    check_vogt,
    dn_divergence,
    dn_q_trajectory,
    dn_sequence_q,
    dn_sequence_q_direct,
    eps_grid,
    ratio_term,
    recheck_sufficient_cell,
    sufficient_cells,
    sufficient_verdicts,
)
from .classify import (
    NEGATIVE,
    POSITIVE,
    UNKNOWN,
    Classification,
    ClassifyParams,
    classify,
    classify_pointset,
    dn_verdict,
    truncation_floor,
)
from .selection import TRUNCATED, RegularPointSelector, Selection, select_regular_points
from .sequences import EXPECTED, FAMILIES, SequenceSpec, custom_sequence
from .verdict import FAILS, HEURISTIC, HOLDS, Verdict, diverges, linear_fit

__all__ = [
    "CellSweep",
    "Classification",
    "ClassifyParams",
    "EXPECTED",
    "FAILS",
    "FAMILIES",
    "HEURISTIC",
    "HOLDS",
    "NEGATIVE",
    "POSITIVE",
    "RegularPointSelector",
    "Selection",
    "SequenceSpec",
    "TRUNCATED",
    "UNKNOWN",
    "Verdict",
    "check_necessary_point",
    "check_ratio",
    "check_sufficient",
    "check_vogt",
    "classify",
    "classify_pointset",
    "custom_sequence",
    "diverges",
    "dn_divergence",
    "dn_q_trajectory",
    "dn_sequence_q",
    "dn_sequence_q_direct",
    "dn_verdict",
    "eps_grid",
    "linear_fit",
    "ratio_term",
    "recheck_sufficient_cell",
    "select_regular_points",
    "sufficient_cells",
    "sufficient_verdicts",
    "truncation_floor",
]
