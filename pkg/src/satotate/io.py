"""Curve parsing, trace-table cache files and report serialisation.

Cache file layout::

    # satotate-trace-table v1 ainvs=0,-1,1,-10,-20 cutoff=10000 checksum=<sha256>
    p,reduction,a_p
    2,good,-2
    ...
    11,bad,

Only ``(p, reduction, a_p)`` is stored; angles are recomputed on load.  The
checksum is taken over the minimal a-invariants and guards against reusing a
cache for the wrong curve.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import re
import tempfile
from importlib import resources
from pathlib import Path
from typing import Optional

from .curves import CurveQ, TraceRecord, TraceTable, build_trace_table, minimal_model

CACHE_MAGIC = "# satotate-trace-table v1"

# a-invariants and conductors of a few curves from Cremona's tables
KNOWN_CURVES = {
    "11a1": ((0, -1, 1, -10, -20), 11),
    "11a2": ((0, -1, 1, -7820, -263580), 11),
    "11a3": ((0, -1, 1, 0, 0), 11),
    "37a1": ((0, 0, 1, -1, 0), 37),
    "37b1": ((0, 1, 1, -23, -50), 37),
    "389a1": ((0, 1, 1, -2, 0), 389),
    "5077a1": ((0, 0, 1, -7, 6), 5077),
}


class InputError(ValueError):
    """Malformed user input (exit status 2)."""


class CacheMismatch(InputError):
    """A cache file belongs to another curve or is corrupt."""


def parse_curve(text: str, conductor: Optional[int] = None, label: str = "") -> CurveQ:
    """Curve from ``a1,a2,a3,a4,a6``, the short form ``a4,a6``, or a known label."""
    text = text.strip()
    if text in KNOWN_CURVES:
        ainvs, N = KNOWN_CURVES[text]
        return minimal_model(ainvs, label=label or text,
                             conductor=N if conductor is None else conductor)
    parts = [s for s in re.split(r"[,\s]+", text.strip("[]()")) if s]
    try:
        coeffs = [int(s) for s in parts]
    except ValueError:
        raise InputError(f"cannot parse curve {text!r}: expected integers") from None
    if len(coeffs) == 2:
        coeffs = [0, 0, 0, *coeffs]
    elif len(coeffs) != 5:
        raise InputError(f"cannot parse curve {text!r}: need 2 or 5 coefficients")
    try:
        return minimal_model(coeffs, label=label, conductor=conductor)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def parse_interval(text: str) -> tuple[float, float]:
    """``lo:hi`` in units of pi, e.g. ``0.25:0.5`` for [pi/4, pi/2]."""
    try:
        lo, hi = (float(s) for s in text.split(":"))
    except ValueError:
        raise InputError(f"interval {text!r} must look like lo:hi (units of pi)") from None
    if not 0.0 <= lo <= hi <= 1.0:
        raise InputError(f"interval {text!r} must satisfy 0 <= lo <= hi <= 1 (units of pi)")
    return lo, hi


def curve_checksum(curve: CurveQ) -> str:
    return hashlib.sha256(",".join(map(str, curve.ainvs)).encode()).hexdigest()


def atomic_write(path, data) -> None:
    """Write text or bytes to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt_cutoff(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def table_to_csv(table: TraceTable) -> str:
    buf = io.StringIO()
    buf.write(f"{CACHE_MAGIC} ainvs={','.join(map(str, table.curve.ainvs))} "
              f"cutoff={_fmt_cutoff(table.cutoff)} checksum={curve_checksum(table.curve)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "reduction", "a_p"])
    for r in table.records:
        w.writerow([r.p, r.reduction, "" if r.a_p is None else r.a_p])
    return buf.getvalue()


def write_trace_table(table: TraceTable, path) -> None:
    atomic_write(path, table_to_csv(table))


def read_trace_table(path, curve: CurveQ) -> TraceTable:
    """Load a cache file, refusing it unless its checksum matches ``curve``."""
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(CACHE_MAGIC):
            raise CacheMismatch(f"{path}: not a trace-table cache")
        meta = dict(kv.split("=", 1) for kv in header[len(CACHE_MAGIC):].split())
        if meta.get("checksum") != curve_checksum(curve):
            raise CacheMismatch(f"{path}: checksum does not match curve {curve.name}")
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["p", "reduction", "a_p"]:
        raise CacheMismatch(f"{path}: missing column header")
    records = []
    for p, red, a in rows[1:]:
        if red not in ("good", "bad") or (red == "good") != (a != ""):
            raise CacheMismatch(f"{path}: malformed row {p},{red},{a}")
        records.append(TraceRecord(int(p), red, int(a) if a else None))
    return TraceTable(curve, float(meta["cutoff"]), tuple(records))


def cache_path(cache_dir, curve: CurveQ) -> Path:
    return Path(cache_dir) / f"traces-{curve_checksum(curve)[:16]}.csv"


def load_or_build(curve: CurveQ, x: float, cache_dir=None, threads: int = 1) -> TraceTable:
    """Trace table covering x, reusing and extending a cache file when one exists."""
    from .curves import extend_trace_table

    x = float(math.floor(x))
    if cache_dir is None:
        return build_trace_table(curve, x, threads=threads)
    path = cache_path(cache_dir, curve)
    if path.exists():
        table = read_trace_table(path, curve)
        if table.cutoff >= x:
            return table
        table = extend_trace_table(table, x, threads=threads)
    else:
        table = build_trace_table(curve, x, threads=threads)
    write_trace_table(table, path)
    return table


def report_schema() -> dict:
    text = resources.files("satotate").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
