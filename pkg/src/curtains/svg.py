"""Deterministic SVG pictures of charts and curtain filmstrips."""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .chart import BLACK, BOUNDARY, CROSSING, WHITE, Chart
from .curtain import Curtain, slice_at
from .geometry import Q

PALETTE = ("#1f4e99", "#b8332a", "#2d7d3a", "#8a5a00", "#6b3fa0", "#00707a", "#a0306b", "#4d4d4d")


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, rect, width: int, margin: int):
        x0, y0, x1, y1 = (float(v) for v in rect)
        self.x0, self.y1 = x0, y1
        self.scale = (width - 2 * margin) / (x1 - x0)
        self.margin = margin
        self.width = width
        self.height = int(round((y1 - y0) * self.scale)) + 2 * margin

    def xy(self, p) -> tuple[float, float]:
        return (
            self.margin + (float(p[0]) - self.x0) * self.scale,
            self.margin + (self.y1 - float(p[1])) * self.scale,
        )


def _arrow(a, b, color: str) -> str:
    (ax, ay), (bx, by) = a, b
    mx, my = (ax + bx) / 2, (ay + by) / 2
    length = math.hypot(bx - ax, by - ay)
    if length == 0:
        return ""
    ux, uy = (bx - ax) / length, (by - ay) / length
    size = 6.0
    tip = (mx + ux * size / 2, my + uy * size / 2)
    left = (mx - ux * size / 2 - uy * size / 2, my - uy * size / 2 + ux * size / 2)
    right = (mx - ux * size / 2 + uy * size / 2, my - uy * size / 2 - ux * size / 2)
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (tip, left, right))
    return f'<polygon points="{pts}" fill="{color}"/>'


def chart_body(c: Chart, cv: _Canvas) -> list[str]:
    out = []
    fx0, fy0 = cv.xy((c.rect[0], c.rect[3]))
    fx1, fy1 = cv.xy((c.rect[2], c.rect[1]))
    out.append(
        f'<rect x="{_fmt(fx0)}" y="{_fmt(fy0)}" width="{_fmt(fx1 - fx0)}" height="{_fmt(fy1 - fy0)}" '
        'fill="white" stroke="#999" stroke-width="1"/>'
    )
    for e in c.edges:
        color = PALETTE[(e.label - 1) % len(PALETTE)]
        pts = [cv.xy(p) for p in e.directed()]
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        out.append(f'<polyline id="edge-{escape(e.id)}" points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        # arrow and label on the longest piece
        k = max(range(len(pts) - 1), key=lambda i: math.hypot(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]))
        out.append(_arrow(pts[k], pts[k + 1], color))
        lx, ly = (pts[k][0] + pts[k + 1][0]) / 2, (pts[k][1] + pts[k + 1][1]) / 2
        out.append(f'<text x="{_fmt(lx + 4)}" y="{_fmt(ly - 4)}" font-size="9" fill="{color}">{e.label}</text>')
    for v in c.vertices:
        x, y = cv.xy(v.pos)
        if v.kind == BLACK:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="black"/>')
        elif v.kind == WHITE:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.5" fill="white" stroke="black"/>')
        elif v.kind == CROSSING:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" fill="#555"/>')
        elif v.kind == BOUNDARY:
            out.append(f'<rect x="{_fmt(x - 2)}" y="{_fmt(y - 2)}" width="4" height="4" fill="#555"/>')
    bx, by = cv.xy(c.basepoint)
    out.append(f'<circle cx="{_fmt(bx)}" cy="{_fmt(by)}" r="2" fill="#999"/>')
    return out


def render_chart(c: Chart, width: int = 480, margin: int = 16, title: str | None = None) -> str:
    cv = _Canvas(c.rect, width, margin)
    extra = 14 if title else 0
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{cv.width}" height="{cv.height + extra}" '
        f'viewBox="0 0 {cv.width} {cv.height + extra}">',
    ]
    if title:
        parts.append(f'<text x="{margin}" y="12" font-size="11">{escape(title)}</text>')
        parts.append(f'<g transform="translate(0,{extra})">')
    parts.extend(chart_body(c, cv))
    if title:
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def filmstrip_times(cu: Curtain, count: int) -> list[Fraction]:
    """``count`` non-event times spread over the curtain's range."""
    lo, hi = cu.time_range
    events = set(cu.event_times())
    times = []
    for k in range(count):
        t = lo + (hi - lo) * Q(2 * k + 1, 2 * count)
        shift = (hi - lo) / (1000 * count)
        while t in events:
            t += shift
        times.append(t)
    return times


def render_filmstrip(cu: Curtain, times=None, count: int = 9, width: int = 320) -> list[tuple[Fraction, str]]:
    times = filmstrip_times(cu, count) if times is None else [Q(t) for t in times]
    return [(t, render_chart(slice_at(cu, t), width=width, title=f"t = {t}")) for t in times]
