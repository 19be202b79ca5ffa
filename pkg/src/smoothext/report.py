"""JSON reports and CSV plot data.

Reports carry no timing or host information, so identical inputs give
byte-identical files.  Numbers whose decimal exponent exceeds 300 in
absolute value are written as ``{"sign": s, "log": l}`` with ``l`` the
natural log of the magnitude.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import sys
from fractions import Fraction

from . import __version__
from .conditions.verdict import Verdict
from .numerics import backend as sc
from .numerics.logsigned import LogSigned

SCHEMA = 1
LOG_LIMIT = 300 * math.log(10)


def _log_object(sign: int, logmag) -> dict:
    return {"sign": sign, "log": float(logmag)}


def encode_number(x):
    """JSON-safe form of an int, float, Fraction, Scalar or LogSigned."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int) and abs(x) < 2**53:
        return x
    if isinstance(x, LogSigned):
        if x.is_zero:
            return 0.0
        if abs(x.logmag) > LOG_LIMIT:
            return _log_object(x.sign, x.logmag)
        return float(x.to_scalar())
    if isinstance(x, float):
        if math.isfinite(x):
            return x
        if math.isnan(x):
            return None
        return {"sign": 1 if x > 0 else -1, "log": "inf"}
    if isinstance(x, (int, Fraction)):
        x = sc.scalar(x)
    if isinstance(x, sc.ctx.mpf):
        if not x:
            return 0.0
        if not sc.ctx.isfinite(x):
            return {"sign": 1 if x > 0 else -1, "log": "inf"}
        logmag = sc.ctx.log(abs(x))
        if abs(logmag) > LOG_LIMIT:
            return _log_object(1 if x > 0 else -1, logmag)
        return float(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def to_jsonable(obj):
    if isinstance(obj, str) or obj is None or isinstance(obj, bool):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Verdict):
        return verdict_dict(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return encode_number(obj)


def verdict_dict(v) -> dict:
    return {
        "check": v.check,
        "params": to_jsonable(v.params),
        "status": v.status,
        "witnesses": to_jsonable(v.witnesses),
        "slopes": to_jsonable(v.slopes),
        "parts": to_jsonable(v.parts),
        "notes": list(v.notes),
        "series": to_jsonable([list(p) for p in v.series]),
    }


def build_report(command: str, inputs: dict, body: dict) -> dict:
    return {
        "schema": SCHEMA,
        "tool": "smoothext",
        "version": __version__,
        "command": command,
        "input": to_jsonable(inputs),
        **to_jsonable(body),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def write_report(report: dict, out=None) -> str:
    text = dumps(report)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _csv_number(x) -> str:
    if isinstance(x, LogSigned):
        x = sc.ctx.zero if x.is_zero else x.to_scalar()
    if isinstance(x, (int, Fraction, float)):
        x = sc.scalar(x)
    return sc.ctx.nstr(x, 17, min_fixed=-30, max_fixed=30)


def plot_series(name: str, series) -> str:
    """CSV text: a comment naming the check, then ``x,y`` rows."""
    lines = [f"# {name}", "x,y"]
    lines.extend(f"{_csv_number(x)},{_csv_number(y)}" for x, y in series)
    return "\n".join(lines) + "\n"


def write_plot_data(directory: str, named_series: list) -> list:
    """One CSV per ``(name, series)`` entry, numbered in report order."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for i, (name, series) in enumerate(named_series):
        slug = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in name)
        path = os.path.join(directory, f"{i:03d}-{slug}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(plot_series(name, series))
        paths.append(path)
    return paths
