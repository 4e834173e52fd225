"""Canonical JSON and CSV output.

Reports are serialized with sorted keys, fixed separators, and no
environment-dependent fields, so rerunning the same configuration produces
byte-identical files.  Non-finite floats are encoded as the strings "inf",
"-inf", "nan" since JSON has no tokens for them.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "json_safe",
    "report_bytes",
    "write_json",
    "write_convergence_csv",
    "render_summary",
]

SCHEMA_VERSION = 1

CSV_FIELDS = ("quantity", "h", "ndof", "value", "eigenvalue", "residual", "method")


def json_safe(obj):
    """Recursively convert a report object into JSON-encodable primitives."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return json_safe(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, frozenset):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def report_bytes(report: dict) -> bytes:
    payload = json.dumps(
        json_safe(report), sort_keys=True, indent=2, separators=(",", ": "), allow_nan=False
    )
    return (payload + "\n").encode("utf-8")


def write_json(path, report: dict) -> None:
    with open(path, "wb") as fh:
        fh.write(report_bytes(report))


def write_convergence_csv(path, rows) -> None:
    """rows: iterables of dicts with the CSV_FIELDS keys."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        for key, v in out.items():
            if isinstance(v, float):
                out[key] = repr(v)
        writer.writerow(out)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return "-"
    return f"{v:.6g}"


def render_summary(report: dict) -> str:
    """Human-readable run summary for the terminal."""
    lines = []
    geo = report.get("geometry", {})
    wts = report.get("weights", {})
    lines.append(
        f"{geo.get('kind', '?')}(param={_fmt(geo.get('param'))})  "
        f"A={_fmt(wts.get('A'))}  B={_fmt(wts.get('B'))}"
    )
    bounds = report.get("bounds", {})
    for name in sorted(bounds):
        e = bounds[name]
        if e.get("status") == "ok":
            lines.append(f"  {name:28s} {_fmt(e.get('value'))}")
        else:
            lines.append(f"  {name:28s} {e.get('status')}: {e.get('reason', '')}")
    verify = report.get("verify")
    if verify:
        dom = verify.get("dominance", {})
        pairs = dom.get("pairs", [])
        lines.append(f"verify: {len(pairs)} dominance pairs, {dom.get('failures', 0)} failures")
        for p in pairs:
            mark = "ok " if p["pass"] else "FAIL"
            lines.append(
                f"  [{mark}] {p['bound']:26s} {_fmt(p['bound_value'])} "
                f"{'>=' if p['direction'] == 'upper' else '<='} "
                f"{_fmt(p['target_value'])} ({p['target']}, margin {_fmt(p['margin'])})"
            )
        if dom.get("skipped"):
            lines.append(f"  skipped: {', '.join(dom['skipped'])}")
    conv = report.get("convergence")
    if conv:
        for name in sorted(conv):
            rich = conv[name].get("richardson", {})
            lines.append(
                f"  {name:20s} extrapolated {_fmt(rich.get('value'))} "
                f"order {_fmt(rich.get('order'))} monotone {rich.get('monotone')}"
            )
    return "\n".join(lines)
