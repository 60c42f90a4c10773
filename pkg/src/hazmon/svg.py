"""Static SVG figures written as plain text: route maps, bar charts, posterior heatmaps."""

from __future__ import annotations

from html import escape
from typing import Mapping, Sequence

import numpy as np

PALETTE = ("#1b6ca8", "#e07b39", "#3a9d5d", "#b8426b", "#7d5ba6", "#8c8c8c")


def _f(x: float) -> str:
    return f"{x:.2f}"


class Canvas:
    """Maps domain coordinates (y up) onto an SVG viewport (y down)."""

    def __init__(self, width: int, height: int, bounds, margin: int = 40):
        self.width, self.height, self.margin = width, height, margin
        self.x0, self.x1, self.y0, self.y1 = (float(b) for b in bounds)
        self.parts: list[str] = []

    def px(self, x, y):
        sx = (self.width - 2 * self.margin) / (self.x1 - self.x0)
        sy = (self.height - 2 * self.margin) / (self.y1 - self.y0)
        return (self.margin + (np.asarray(x) - self.x0) * sx,
                self.height - self.margin - (np.asarray(y) - self.y0) * sy)

    def add(self, s: str):
        self.parts.append(s)

    def polyline(self, pts, color: str, width: float = 1.5, dash: str | None = None):
        pts = np.asarray(pts, float)
        xs, ys = self.px(pts[:, 0], pts[:, 1])
        coords = " ".join(f"{_f(a)},{_f(b)}" for a, b in zip(xs, ys))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                 f'stroke-width="{width}"{extra}/>')

    def circles(self, pts, color: str, r: float = 4.0, stroke: str = "none"):
        pts = np.asarray(pts, float).reshape(-1, 2)
        for x, y in zip(*self.px(pts[:, 0], pts[:, 1])):
            self.add(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{color}" stroke="{stroke}"/>')

    def text(self, x_px: float, y_px: float, s: str, size: int = 12, anchor: str = "start"):
        self.add(f'<text x="{_f(x_px)}" y="{_f(y_px)}" font-size="{size}" '
                 f'font-family="sans-serif" text-anchor="{anchor}">{escape(s)}</text>')

    def frame(self):
        x0, y0 = self.px(self.x0, self.y1)
        x1, y1 = self.px(self.x1, self.y0)
        self.add(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}" '
                 f'fill="none" stroke="#333"/>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *self.parts,
                          "</svg>"]) + "\n"


def legend(c: Canvas, entries: Sequence[tuple[str, str]], x: float, y: float):
    for i, (label, color) in enumerate(entries):
        yy = y + 16 * i
        c.add(f'<rect x="{_f(x)}" y="{_f(yy - 9)}" width="10" height="10" fill="{color}"/>')
        c.text(x + 14, yy, label, size=11)


def route_figure(domain, depot, known, pseudo, routes: Mapping[str, Sequence[np.ndarray]],
                 title: str = "") -> str:
    """Known nodes, pseudo-nodes and one or more routes (each a list of tours)."""
    c = Canvas(560, 580, (domain.x_min, domain.x_max, domain.y_min, domain.y_max))
    c.frame()
    entries = []
    for i, (name, tours) in enumerate(routes.items()):
        color = PALETTE[i % len(PALETTE)]
        for tour in tours:
            c.polyline(tour, color, 2.0 if i == 0 else 1.5, None if i == 0 else "6,4")
        entries.append((name, color))
    c.circles(known, "#c0392b", 4.5)
    if len(np.asarray(pseudo).reshape(-1, 2)):
        c.circles(pseudo, "white", 4.5, stroke="#1b6ca8")
    c.circles(depot, "black", 6.0)
    entries += [("known hazard", "#c0392b"), ("pseudo-node", "#1b6ca8"), ("depot", "black")]
    legend(c, entries, c.width - 150, 20)
    if title:
        c.text(c.margin, 24, title, size=14)
    return c.render()


def bar_chart(groups: Sequence[str], series: Mapping[str, Sequence[float]],
              errors: Mapping[str, Sequence[float]] | None = None,
              ylabel: str = "", title: str = "") -> str:
    """Grouped bars: one group per entry of ``groups``, one bar per series."""
    names = list(series)
    top = max([float(np.nanmax(v)) for v in series.values() if len(v)] + [1e-12])
    if errors:
        top = max(top, max(float(np.nanmax(np.add(series[k], errors[k]))) for k in errors))
    top *= 1.1
    width = max(480, 70 * len(groups) * max(1, len(names)) // 2 + 120)
    c = Canvas(width, 380, (0.0, float(len(groups)), 0.0, top), margin=50)
    c.frame()
    bw = 0.8 / max(1, len(names))
    for j, name in enumerate(names):
        color = PALETTE[j % len(PALETTE)]
        for i, val in enumerate(series[name]):
            if not np.isfinite(val):
                continue
            x0, y0 = c.px(i + 0.1 + j * bw, val)
            x1, y1 = c.px(i + 0.1 + (j + 1) * bw, 0.0)
            c.add(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" '
                  f'height="{_f(y1 - y0)}" fill="{color}"/>')
            if errors:
                err = errors[name][i]
                xm = 0.5 * (x0 + x1)
                _, ya = c.px(0, val + err)
                _, yb = c.px(0, max(0.0, val - err))
                c.add(f'<line x1="{_f(xm)}" y1="{_f(ya)}" x2="{_f(xm)}" y2="{_f(yb)}" '
                      f'stroke="#222"/>')
    for i, g in enumerate(groups):
        x, y = c.px(i + 0.5, 0.0)
        c.text(x, y + 16, g, size=10, anchor="middle")
    for frac in (0.0, 0.5, 1.0):
        v = top / 1.1 * frac
        x, y = c.px(0.0, v)
        c.text(x - 6, y + 4, f"{v:.3g}", size=10, anchor="end")
    if ylabel:
        c.text(12, c.height / 2, ylabel, size=11)
    if title:
        c.text(c.margin, 24, title, size=14)
    legend(c, [(n, PALETTE[j % len(PALETTE)]) for j, n in enumerate(names)], c.width - 140, 20)
    return c.render()


def _heat(v: float) -> str:
    v = min(1.0, max(0.0, v))
    r = int(255 - 40 * v)
    g = int(250 - 190 * v)
    b = int(240 - 200 * v)
    return f"#{r:02x}{g:02x}{b:02x}"


def posterior_figure(bounds, values: np.ndarray, paths: Mapping[str, np.ndarray],
                     markers=None, title: str = "") -> str:
    """Heatmap of ``values`` (``(ny, nx)`` over ``bounds``) with path overlays."""
    c = Canvas(560, 580, bounds)
    ny, nx = values.shape
    vmax = float(np.max(values)) if values.size else 1.0
    dx = (c.x1 - c.x0) / nx
    dy = (c.y1 - c.y0) / ny
    for r in range(ny):
        for q in range(nx):
            x0, y0 = c.px(c.x0 + q * dx, c.y0 + (r + 1) * dy)
            x1, y1 = c.px(c.x0 + (q + 1) * dx, c.y0 + r * dy)
            c.add(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0 + 0.3)}" '
                  f'height="{_f(y1 - y0 + 0.3)}" fill="{_heat(values[r, q] / max(vmax, 1e-12))}"/>')
    c.frame()
    entries = []
    for i, (name, pts) in enumerate(paths.items()):
        color = PALETTE[i % len(PALETTE)]
        c.polyline(pts, color, 2.0)
        entries.append((name, color))
    if markers is not None and len(np.asarray(markers).reshape(-1, 2)):
        c.circles(markers, "#c0392b", 4.0)
    legend(c, entries, c.width - 150, 20)
    if title:
        c.text(c.margin, 24, title, size=14)
    return c.render()
