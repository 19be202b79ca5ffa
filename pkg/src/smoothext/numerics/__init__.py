"""Scalars, log-domain numbers, Taylor jets and the bump partition of unity."""

from .backend import (
    DEFAULT_PRECISION,
    ctx,
    get_precision,
    order_key,
    precision,
    scalar,
    set_precision,
    tolerance,
)
from .logsigned import LogSigned, log_sum
from .jet import Jet
from .bump import bump_jet, lattice_offsets, psi_jet, scaled_patch_jet

__all__ = [
    "DEFAULT_PRECISION",
    "Jet",
    "LogSigned",
    "bump_jet",
    "ctx",
    "get_precision",
    "lattice_offsets",
    "log_sum",
    "order_key",
    "precision",
    "psi_jet",
    "scalar",
    "scaled_patch_jet",
    "set_precision",
    "tolerance",
]
