"""Dependency-free SVG renderers: spy plots, log-log scatter with fit
line, and iteration-count scatter. Output is byte-stable for identical
inputs (fixed viewbox, fixed decimal formatting, no timestamps)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .regression import FitReport
from .sparsekit import SparseMatrix


class PlotKind(Enum):
    ScatterFit = "scatter"
    Spy = "spy"
    IterationsScatter = "iterations"


@dataclass
class PlotSpec:
    kind: PlotKind
    output_path: str
    title: str = ""
    series_label: str = ""
    fit: FitReport | None = None
    width: int = 480
    height: int = 400
    margin: int = 56
    extra_series: list = field(default_factory=list)


def _svg_open(w, h):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
    ]


def _text(x, y, s, size=12, anchor="middle", rotate=None):
    tr = f' transform="rotate(-90 {x:.1f} {y:.1f})"' if rotate else ""
    return (f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" '
            f'font-size="{size}" text-anchor="{anchor}"{tr}>{s}</text>')


def spy_svg(m: SparseMatrix, path, title: str = "", size: int = 420) -> None:
    """One filled square per stored entry, row index downward."""
    n_r, n_c = m.nrows, m.ncols
    margin = 24
    w = size + 2 * margin
    h = size + 2 * margin + (16 if title else 0)
    top = margin + (16 if title else 0)
    sx = size / max(n_c, 1)
    sy = size / max(n_r, 1)
    cell_w = max(sx, 0.75)
    cell_h = max(sy, 0.75)
    out = _svg_open(w, h)
    if title:
        out.append(_text(w / 2, 16, title))
    out.append(
        f'<rect x="{margin}" y="{top}" width="{size}" height="{size}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    rows, cols, _ = m.to_triplets()
    for r, c in zip(rows, cols):
        x = margin + c * sx
        y = top + r * sy
        out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w:.2f}" '
                   f'height="{cell_h:.2f}" fill="#1f3d7a"/>')
    out.append(_text(w / 2, h - 4, f"n = {n_c}, nnz = {m.nnz}", size=11))
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def _decade_ticks(lo, hi):
    first = math.floor(lo)
    last = math.ceil(hi)
    return [d for d in range(first, last + 1) if lo - 1e-9 <= d <= hi + 1e-9]


def _fmt_pow10(d: int) -> str:
    return f"1e{d}" if d not in (0, 1) else ("1" if d == 0 else "10")


def scatter_fit_svg(points, fit: FitReport | None, path, title: str = "",
                    xlabel: str = "n", ylabel: str = "t [s]",
                    width: int = 480, height: int = 400) -> None:
    """Log-log scatter of (n, t) with the fitted line dashed across it."""
    pts = [(math.log10(n), math.log10(t)) for n, t in points if n > 0 and t > 0]
    if not pts:
        raise ValueError("nothing to plot")
    margin = 56
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    xpad = max((xhi - xlo) * 0.05, 0.05)
    ypad = max((yhi - ylo) * 0.05, 0.05)
    xlo, xhi = xlo - xpad, xhi + xpad
    ylo, yhi = ylo - ypad, yhi + ypad

    def px(x):
        return margin + (x - xlo) / (xhi - xlo) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - ylo) / (yhi - ylo) * (height - 2 * margin)

    out = _svg_open(width, height)
    if title:
        out.append(_text(width / 2, 18, title, size=13))
    out.append(f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
               f'height="{height - 2 * margin}" fill="none" stroke="black"/>')
    for d in _decade_ticks(xlo, xhi):
        x = px(d)
        out.append(f'<line x1="{x:.1f}" y1="{height - margin}" x2="{x:.1f}" '
                   f'y2="{height - margin + 5}" stroke="black"/>')
        out.append(_text(x, height - margin + 18, _fmt_pow10(d), size=11))
    for d in _decade_ticks(ylo, yhi):
        y = py(d)
        out.append(f'<line x1="{margin - 5}" y1="{y:.1f}" x2="{margin}" '
                   f'y2="{y:.1f}" stroke="black"/>')
        out.append(_text(margin - 8, y + 4, _fmt_pow10(d), size=11, anchor="end"))
    out.append(_text(width / 2, height - 12, xlabel, size=12))
    out.append(_text(16, height / 2, ylabel, size=12, rotate=True))
    if fit is not None:
        y1 = fit.alpha * xlo + fit.intercept
        y2 = fit.alpha * xhi + fit.intercept
        out.append(f'<line x1="{px(xlo):.1f}" y1="{py(y1):.1f}" '
                   f'x2="{px(xhi):.1f}" y2="{py(y2):.1f}" stroke="#c0392b" '
                   'stroke-width="1.5" stroke-dasharray="6,4"/>')
        out.append(_text(width - margin - 4, margin + 14,
                         f"alpha = {fit.alpha:.3f}", size=11, anchor="end"))
    for x, y in pts:
        out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3.2" '
                   'fill="none" stroke="#1f3d7a" stroke-width="1.3"/>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def iterations_scatter_svg(points, path, title: str = "",
                           xlabel: str = "n", ylabel: str = "iterations",
                           width: int = 480, height: int = 320) -> None:
    """Semilog-x scatter of iteration counts against problem size."""
    pts = [(math.log10(n), float(it)) for n, it in points if n > 0]
    if not pts:
        raise ValueError("nothing to plot")
    margin = 56
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xlo, xhi = min(xs) - 0.05, max(xs) + 0.05
    yhi = max(max(ys) * 1.2, 1.0)

    def px(x):
        return margin + (x - xlo) / (xhi - xlo) * (width - 2 * margin)

    def py(y):
        return height - margin - y / yhi * (height - 2 * margin)

    out = _svg_open(width, height)
    if title:
        out.append(_text(width / 2, 18, title, size=13))
    out.append(f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
               f'height="{height - 2 * margin}" fill="none" stroke="black"/>')
    for d in _decade_ticks(xlo, xhi):
        x = px(d)
        out.append(f'<line x1="{x:.1f}" y1="{height - margin}" x2="{x:.1f}" '
                   f'y2="{height - margin + 5}" stroke="black"/>')
        out.append(_text(x, height - margin + 18, _fmt_pow10(d), size=11))
    step = max(1, int(math.ceil(yhi / 6)))
    tick = 0
    while tick <= yhi:
        y = py(tick)
        out.append(f'<line x1="{margin - 5}" y1="{y:.1f}" x2="{margin}" '
                   f'y2="{y:.1f}" stroke="black"/>')
        out.append(_text(margin - 8, y + 4, str(tick), size=11, anchor="end"))
        tick += step
    out.append(_text(width / 2, height - 12, xlabel, size=12))
    out.append(_text(16, height / 2, ylabel, size=12, rotate=True))
    for x, y in pts:
        out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3.2" '
                   'fill="#1f3d7a"/>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def render(spec: PlotSpec, data) -> None:
    if spec.kind == PlotKind.Spy:
        spy_svg(data, spec.output_path, title=spec.title)
    elif spec.kind == PlotKind.ScatterFit:
        scatter_fit_svg(data, spec.fit, spec.output_path, title=spec.title)
    elif spec.kind == PlotKind.IterationsScatter:
        iterations_scatter_svg(data, spec.output_path, title=spec.title)
    else:
        raise ValueError(f"unknown plot kind {spec.kind!r}")
