"""Curve CSV, JSON reports and SVG rendering.

Writes are atomic (temporary file in the target directory, then rename) and
deterministic: floats are printed with 17 significant digits so that a CSV
round trip is bit-exact, and nothing time-dependent is ever emitted.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .geometry import PlaneCurve, curve_from_points, edge_lengths, vertex_frames

CSV_HEADER = ("s", "x", "y", "kappa")


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def curve_to_csv(curve: PlaneCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in zip(curve.arc, curve.x, curve.y, curve.kappas):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_curve_csv(path, curve: PlaneCurve) -> Path:
    return atomic_write(path, curve_to_csv(curve))


def read_curve_table(path) -> dict[str, np.ndarray]:
    """Columns of a curve CSV as float arrays; ``kappa`` may be absent."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    missing = {"x", "y"} - set(header)
    if missing:
        raise ValueError(f"{path}: missing column(s) {sorted(missing)}")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header) or len(data) < 3:
        raise ValueError(f"{path}: need at least 3 complete rows")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite entries")
    return {name: data[:, j].copy() for j, name in enumerate(header)}


def looks_closed(points: np.ndarray) -> bool:
    """Heuristic: the gap from the last sample to the first is a typical edge."""
    ell = edge_lengths(points, False)
    return bool(np.hypot(*(points[0] - points[-1])) <= 2.0 * np.median(ell))


def read_curve_csv(path, closed: bool | None = None) -> PlaneCurve:
    """PlaneCurve with the file's ``s`` and ``kappa`` columns when present.

    Frames are the edge bisectors; missing curvature is estimated from turning angles.
    """
    cols = read_curve_table(path)
    pts = np.stack([cols["x"], cols["y"]], axis=1)
    closed = looks_closed(pts) if closed is None else closed
    base = curve_from_points(pts, closed, kappas=cols.get("kappa"))
    if "s" not in cols:
        return base
    T, N = vertex_frames(pts, closed)
    return PlaneCurve(pts, T, N, base.kappas, cols["s"], closed)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def json_safe(x):
    """``inf`` has no JSON literal; report it as null."""
    x = float(x)
    return x if math.isfinite(x) else None


def write_json(path, obj) -> Path:
    return atomic_write(path, dump_json(obj))


def render_svg(curves, metadata: dict | None = None, arrow: bool = True, width: int = 480,
               title: str | None = None, max_vertices: int = 2000) -> str:
    """Standalone SVG of one or more curves, y axis pointing up.

    The viewBox is the bounding box of the curves plus a 5% margin.  With
    ``arrow`` set, an upward arrow at the right edge marks the translation
    direction V = (0, 1) of the canonical frame.  Long curves are thinned to
    at most ``max_vertices`` path vertices (end points kept).
    """
    if isinstance(curves, PlaneCurve):
        curves = [curves]
    pts = np.vstack([c.points for c in curves])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    size = np.maximum(hi - lo, 1e-9)
    margin = 0.05 * size
    x0, y0 = lo - margin
    w, h = size + 2 * margin
    height = max(1, int(round(width * h / w)))
    stroke = 0.004 * max(w, h)

    def num(v):
        return f"{v:.6f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{num(x0)} {num(-(y0 + h))} {num(w)} {num(h)}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    if metadata is not None:
        out.append("<metadata>" + _escape(json.dumps(metadata, sort_keys=True)) + "</metadata>")
    for c in curves:
        stride = max(1, -(-len(c) // max_vertices))
        seq = c.points[::stride]
        if c.closed:
            seq = np.vstack([seq, c.points[:1]])
        elif len(c) % stride != 1 and stride > 1:
            seq = np.vstack([seq, c.points[-1:]])
        d = "M " + " L ".join(f"{num(x)} {num(-y)}" for x, y in seq)
        out.append(f'<path d="{d}" fill="none" stroke="black" stroke-width="{num(stroke)}"/>')
    if arrow:
        ax = x0 + w - 0.5 * margin[0]
        tail, head = y0 + 0.3 * h, y0 + 0.7 * h
        tip = 0.04 * h
        out.append(f'<path d="M {num(ax)} {num(-tail)} L {num(ax)} {num(-head)}" '
                   f'stroke="gray" stroke-width="{num(stroke)}"/>')
        out.append(f'<path d="M {num(ax - 0.5 * tip)} {num(-(head - tip))} L {num(ax)} '
                   f'{num(-head)} L {num(ax + 0.5 * tip)} {num(-(head - tip))} Z" fill="gray"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(path, curves, **kwargs) -> Path:
    return atomic_write(path, render_svg(curves, **kwargs))
