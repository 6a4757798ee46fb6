"""Small dependency-free SVG charts: scatter/line plots and bar charts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=170, top=40, bottom=55)


@dataclass
class Series:
    label: str
    points: list[tuple[float, float]]
    line: bool = False
    marker: bool = True
    color: str | None = None
    annotations: list[str] = field(default_factory=list)


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    x = start
    while x <= hi + 1e-9 * step:
        out.append(round(x, 10))
        x += step
    return out


def _fmt_tick(x: float) -> str:
    return f"{x:g}"


def _bounds(values: list[float], pad: float = 0.05) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    span = hi - lo
    return lo - pad * span, hi + pad * span


class _Canvas:
    def __init__(self, title, xlabel, ylabel, xr, yr):
        self.parts: list[str] = []
        self.xr, self.yr = xr, yr
        self.x0, self.x1 = MARGIN["left"], WIDTH - MARGIN["right"]
        self.y0, self.y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
        self.parts.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
        self.parts.append(f'<text x="{(self.x0 + self.x1) / 2:.1f}" y="22" text-anchor="middle" '
                          f'font-size="15">{escape(title)}</text>')
        self.parts.append(f'<text x="{(self.x0 + self.x1) / 2:.1f}" y="{HEIGHT - 12}" '
                          f'text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
        cy = (self.y0 + self.y1) / 2
        self.parts.append(f'<text x="18" y="{cy:.1f}" text-anchor="middle" font-size="13" '
                          f'transform="rotate(-90 18 {cy:.1f})">{escape(ylabel)}</text>')

    def sx(self, x):
        lo, hi = self.xr
        return self.x0 + (x - lo) / (hi - lo) * (self.x1 - self.x0)

    def sy(self, y):
        lo, hi = self.yr
        return self.y0 - (y - lo) / (hi - lo) * (self.y0 - self.y1)

    def axes(self, xticks, yticks, xtick_labels=None):
        p = self.parts
        p.append(f'<rect x="{self.x0}" y="{self.y1}" width="{self.x1 - self.x0}" '
                 f'height="{self.y0 - self.y1}" fill="none" stroke="black"/>')
        for i, t in enumerate(xticks):
            x = self.sx(t)
            label = xtick_labels[i] if xtick_labels else _fmt_tick(t)
            p.append(f'<line x1="{x:.2f}" y1="{self.y0}" x2="{x:.2f}" y2="{self.y0 + 5}" stroke="black"/>')
            p.append(f'<text x="{x:.2f}" y="{self.y0 + 19}" text-anchor="middle" font-size="11">'
                     f'{escape(label)}</text>')
        for t in yticks:
            y = self.sy(t)
            p.append(f'<line x1="{self.x0 - 5}" y1="{y:.2f}" x2="{self.x0}" y2="{y:.2f}" stroke="black"/>')
            p.append(f'<line x1="{self.x0}" y1="{y:.2f}" x2="{self.x1}" y2="{y:.2f}" stroke="#e5e5e5"/>')
            p.append(f'<text x="{self.x0 - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11">'
                     f'{_fmt_tick(t)}</text>')

    def legend(self, entries: list[tuple[str, str]]):
        x = self.x1 + 15
        for i, (label, color) in enumerate(entries):
            y = self.y1 + 10 + 20 * i
            self.parts.append(f'<rect x="{x}" y="{y - 9}" width="12" height="12" fill="{color}"/>')
            self.parts.append(f'<text x="{x + 18}" y="{y + 1}" font-size="12">{escape(label)}</text>')

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
                f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">\n{body}\n</svg>\n')


def scatter_plot(series: list[Series], title: str, xlabel: str, ylabel: str) -> str:
    """Points and optional polylines for each series, sharing one pair of axes."""
    xs = [x for s in series for x, _ in s.points]
    ys = [y for s in series for _, y in s.points]
    if not xs:
        raise ValueError("nothing to plot")
    cv = _Canvas(title, xlabel, ylabel, _bounds(xs), _bounds(ys))
    cv.axes(_ticks(*cv.xr), _ticks(*cv.yr))
    legend = []
    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        legend.append((s.label, color))
        if s.line and len(s.points) > 1:
            path = " ".join(f"{cv.sx(x):.2f},{cv.sy(y):.2f}" for x, y in s.points)
            cv.parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if s.marker:
            for x, y in s.points:
                cv.parts.append(f'<circle cx="{cv.sx(x):.2f}" cy="{cv.sy(y):.2f}" r="3.5" fill="{color}"/>')
        for (x, y), note in zip(s.points, s.annotations):
            if note:
                cv.parts.append(f'<text x="{cv.sx(x) + 6:.2f}" y="{cv.sy(y) - 6:.2f}" font-size="10" '
                                f'fill="{color}">{escape(note)}</text>')
    cv.legend(legend)
    return cv.render()


def bar_chart(labels: list[str], values: list[float], title: str, xlabel: str, ylabel: str,
              color: str = PALETTE[0]) -> str:
    if not labels:
        raise ValueError("nothing to plot")
    n = len(labels)
    cv = _Canvas(title, xlabel, ylabel, (-0.5, n - 0.5), (0.0, max(max(values), 1) * 1.08))
    cv.axes(list(range(n)), _ticks(*cv.yr), labels)
    width = 0.7 * (cv.x1 - cv.x0) / n
    for i, v in enumerate(values):
        x, y = cv.sx(i) - width / 2, cv.sy(v)
        cv.parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{width:.2f}" height="{cv.y0 - y:.2f}" '
                        f'fill="{color}"/>')
    return cv.render()


def write(path: str | Path, svg: str):
    Path(path).write_text(svg)
