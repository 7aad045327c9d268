"""Writing reports: JSON as the source of truth, CSV and SVG derived from it."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def scatter_svg(points, xlabel: str, ylabel: str, title: str = "", size: int = 400) -> str:
    """A bare scatter plot with axis labels and the data range on each axis."""
    pad = 40
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (size - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (size - 2 * pad) / ((y1 - y0) or 1.0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{size - pad}" stroke="black"/>',
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="12">{xlabel} [{x0:.3g}, {x1:.3g}]</text>',
        f'<text x="12" y="{size / 2}" font-size="12" transform="rotate(-90 12 {size / 2})" text-anchor="middle">{ylabel} [{y0:.3g}, {y1:.3g}]</text>',
    ]
    if title:
        out.append(f'<text x="{size / 2}" y="20" text-anchor="middle" font-size="13">{title}</text>')
    for x, y in zip(xs, ys):
        if not (math.isfinite(x) and math.isfinite(y)):
            continue
        cx = pad + (x - x0) * sx
        cy = size - pad - (y - y0) * sy
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2.5" fill="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_outputs(out_dir, report: dict, csvs: dict | None = None, svgs: dict | None = None) -> list[Path]:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    written = [d / "report.json"]
    written[0].write_text(dumps(report))
    for name, text in sorted((csvs or {}).items()):
        p = d / name
        p.write_text(text)
        written.append(p)
    for name, text in sorted((svgs or {}).items()):
        p = d / name
        p.write_text(text)
        written.append(p)
    return written
