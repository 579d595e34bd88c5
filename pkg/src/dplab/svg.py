"""Minimal SVG 1.1 writers for line plots and nodal heatmaps."""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = (60, 20, 30, 50)  # left, right, top, bottom

_HEADER = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
           '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
           '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n')


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _open(width, height):
    return [_HEADER, f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                     f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        return np.array([lo])
    step = 10 ** np.floor(np.log10(span / n))
    for m in (1, 2, 5, 10):
        if span / (m * step) <= n:
            step *= m
            break
    return np.arange(np.ceil(lo / step) * step, hi + 0.5 * step, step)


class _Frame:
    def __init__(self, xlim, ylim, width=WIDTH, height=HEIGHT):
        self.xlim, self.ylim = xlim, ylim
        left, right, top, bottom = MARGIN
        self.x0, self.x1 = left, width - right
        self.y0, self.y1 = height - bottom, top

    def px(self, x):
        a, b = self.xlim
        return self.x0 + (np.asarray(x, dtype=float) - a) / (b - a) * (self.x1 - self.x0)

    def py(self, y):
        a, b = self.ylim
        return self.y0 + (np.asarray(y, dtype=float) - a) / (b - a) * (self.y1 - self.y0)

    def axes(self, xlabel, ylabel, title) -> List[str]:
        out = [f'<g stroke="black" stroke-width="1" fill="none">'
               f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y1)}" width="{_fmt(self.x1 - self.x0)}" '
               f'height="{_fmt(self.y0 - self.y1)}"/></g>',
               '<g font-family="sans-serif" font-size="11" fill="black">']
        for t in _ticks(*self.xlim):
            x = float(self.px(t))
            out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(self.y0)}" x2="{_fmt(x)}" y2="{_fmt(self.y0 + 4)}" stroke="black"/>')
            out.append(f'<text x="{_fmt(x)}" y="{_fmt(self.y0 + 16)}" text-anchor="middle">{t:.4g}</text>')
        for t in _ticks(*self.ylim):
            y = float(self.py(t))
            out.append(f'<line x1="{_fmt(self.x0 - 4)}" y1="{_fmt(y)}" x2="{_fmt(self.x0)}" y2="{_fmt(y)}" stroke="black"/>')
            out.append(f'<text x="{_fmt(self.x0 - 6)}" y="{_fmt(y + 4)}" text-anchor="end">{t:.4g}</text>')
        xm = 0.5 * (self.x0 + self.x1)
        out.append(f'<text x="{_fmt(xm)}" y="{_fmt(self.y0 + 36)}" text-anchor="middle">{escape(xlabel)}</text>')
        ym = 0.5 * (self.y0 + self.y1)
        out.append(f'<text x="14" y="{_fmt(ym)}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {_fmt(ym)})">{escape(ylabel)}</text>')
        out.append(f'<text x="{_fmt(xm)}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
        out.append('</g>')
        return out


def line_plot(series: Sequence[Tuple[np.ndarray, np.ndarray, str]], *, title: str = "",
              xlabel: str = "", ylabel: str = "", hlines: Iterable[Tuple[float, str]] = (),
              markers: Iterable[Tuple[float, float, str]] = ()) -> str:
    """Polylines ``(x, y, colour)`` with optional horizontal guides and point markers."""
    hlines, markers = list(hlines), list(markers)
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[1], dtype=float) for s in series]
                        + [np.array([v for v, _ in hlines])] + [np.array([m[1] for m in markers])])
    ys = ys[np.isfinite(ys)]
    ylo, yhi = float(ys.min()), float(ys.max())
    pad = 0.05 * (yhi - ylo or 1.0)
    frame = _Frame((float(xs.min()), float(xs.max())), (ylo - pad, yhi + pad))
    out = _open(WIDTH, HEIGHT)
    for v, colour in hlines:
        y = _fmt(float(frame.py(v)))
        out.append(f'<line x1="{_fmt(frame.x0)}" y1="{y}" x2="{_fmt(frame.x1)}" y2="{y}" '
                   f'stroke="{colour}" stroke-dasharray="5,4"/>')
    for x, y, colour in series:
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(frame.px(x), frame.py(y)))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
    for x, y, colour in markers:
        out.append(f'<circle cx="{_fmt(float(frame.px(x)))}" cy="{_fmt(float(frame.py(y)))}" r="4" '
                   f'fill="{colour}"/>')
    out += frame.axes(xlabel, ylabel, title)
    out.append("</svg>\n")
    return "\n".join(out)


def _diverging(v: np.ndarray) -> List[str]:
    # blue (-1) -> white (0) -> red (+1)
    v = np.clip(v, -1.0, 1.0)
    r = np.where(v < 0, 1.0 + v, 1.0)
    g = 1.0 - np.abs(v)
    b = np.where(v > 0, 1.0 - v, 1.0)
    rgb = np.round(255 * np.stack([r, g, b], axis=-1)).astype(int).reshape(-1, 3)
    return [f"#{a:02x}{c:02x}{d:02x}" for a, c, d in rgb]


def grid_heatmap(values: np.ndarray, box: Tuple[float, float, float, float], *,
                 segment: Optional[Tuple[float, float, float]] = None, title: str = "",
                 max_cells: int = 140) -> str:
    """Heatmap of values on a uniform ``(ny+1, nx+1)`` node grid, subsampled to ``max_cells``."""
    values = np.asarray(values, dtype=float)
    stride = max(1, int(np.ceil(max(values.shape) / max_cells)))
    sub = values[::stride, ::stride]
    x_min, x_max, y_min, y_max = box
    aspect = (y_max - y_min) / (x_max - x_min)
    width = WIDTH
    height = int(round(MARGIN[2] + MARGIN[3] + (width - MARGIN[0] - MARGIN[1]) * aspect))
    frame = _Frame((x_min, x_max), (y_min, y_max), width, height)
    ny, nx = sub.shape
    scale = float(np.max(np.abs(sub))) or 1.0
    colours = _diverging(sub / scale)
    xs = np.linspace(x_min, x_max, nx + 1)
    ys = np.linspace(y_min, y_max, ny + 1)
    px, py = frame.px(xs), frame.py(ys)
    out = _open(width, height)
    out.append('<g shape-rendering="crispEdges">')
    for j in range(ny):
        for i in range(nx):
            out.append(f'<rect x="{_fmt(px[i])}" y="{_fmt(py[j + 1])}" width="{_fmt(px[i + 1] - px[i] + 0.3)}" '
                       f'height="{_fmt(py[j] - py[j + 1] + 0.3)}" fill="{colours[j * nx + i]}"/>')
    out.append("</g>")
    if segment is not None:
        xa, xb, y0 = segment
        out.append(f'<line x1="{_fmt(float(frame.px(xa)))}" y1="{_fmt(float(frame.py(y0)))}" '
                   f'x2="{_fmt(float(frame.px(xb)))}" y2="{_fmt(float(frame.py(y0)))}" '
                   f'stroke="black" stroke-width="2.5"/>')
    out += frame.axes("x", "y", title)
    out.append("</svg>\n")
    return "\n".join(out)
