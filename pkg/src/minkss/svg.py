"""Deterministic SVG rendering of an analysis report.

Layers are written in a fixed order: curve, caustic, MSS branches, then
markers (lightcone ticks at lightlike points, circles at A2A1 points,
squares at A3 points).  Coordinates use six decimals and the y axis is
flipped so the picture appears upright.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

STYLE_CURVE = 'fill="none" stroke="#000000" stroke-width="{w}"'
STYLE_CAUSTIC = 'fill="none" stroke="#1f6fb2" stroke-width="{w}" stroke-dasharray="{d}"'
STYLE_MSS = 'fill="none" stroke="#c0392b" stroke-width="{w}"'
STYLE_TICK = 'stroke="#2e8b57" stroke-width="{w}"'
STYLE_A2A1 = 'fill="none" stroke="#6a1b9a" stroke-width="{w}"'
STYLE_A3 = 'fill="#e67e22" stroke="none"'


def fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _pt(p) -> str:
    return f"{fmt(p[0])},{fmt(-p[1])}"


def _path(points: Iterable[Optional[list]], closed: bool = False) -> str:
    """Path data; ``None`` entries lift the pen."""
    parts, pen_down = [], False
    for p in points:
        if p is None:
            pen_down = False
            continue
        parts.append(("L" if pen_down else "M") + _pt(p))
        pen_down = True
    if closed and parts:
        parts.append("Z")
    return " ".join(parts)


def _bbox(points):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), max(xs), min(ys), max(ys)


def render_svg(report: dict) -> str:
    """SVG text for an AnalysisReport dict."""
    curve = report["curve_polyline"]
    x0, x1, y0, y1 = _bbox(curve)
    w, h = x1 - x0, y1 - y0
    pad_x, pad_y = 0.1 * w, 0.1 * h
    vb = (x0 - pad_x, -(y1 + pad_y), w + 2 * pad_x, h + 2 * pad_y)
    diag = math.hypot(w, h)
    lw = diag * 0.003
    tick = diag * 0.02
    glyph = diag * 0.008

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{" ".join(fmt(v) for v in vb)}">',
        f'<title>{_escape(report["curve_name"])} u={fmt(report["u"])}</title>',
        f'<g id="curve"><path d="{_path(curve, closed=True)}" {STYLE_CURVE.format(w=fmt(lw))}/></g>',
    ]
    caus = _path(report["caustic_polyline"])
    style = STYLE_CAUSTIC.format(w=fmt(lw), d=f"{fmt(4 * lw)} {fmt(3 * lw)}")
    out.append(f'<g id="caustic"><path d="{caus}" {style}/></g>' if caus else '<g id="caustic"/>')

    branches = report["mss_branches"]
    if branches:
        out.append('<g id="mss">')
        closed = report.get("mss_closed", [False] * len(branches))
        for k, br in enumerate(branches):
            d = _path([r["center"] for r in br], closed=closed[k])
            out.append(f'<path id="mss-{k}" d="{d}" {STYLE_MSS.format(w=fmt(lw))}/>')
        out.append("</g>")

    markers = []
    s = tick / math.sqrt(2.0)
    for p in report["lightlike_points"]:
        for dx, dy in ((s, s), (s, -s)):
            a = (p[0] - dx, p[1] - dy)
            b = (p[0] + dx, p[1] + dy)
            markers.append(
                f'<line x1="{fmt(a[0])}" y1="{fmt(-a[1])}" x2="{fmt(b[0])}" y2="{fmt(-b[1])}" '
                f'{STYLE_TICK.format(w=fmt(lw))}/>'
            )
    for br in branches:
        for r in br:
            cx, cy = r["center"]
            if r["label"] == "A2A1":
                markers.append(f'<circle cx="{fmt(cx)}" cy="{fmt(-cy)}" r="{fmt(glyph)}" '
                               f'{STYLE_A2A1.format(w=fmt(lw))}/>')
            elif r["label"] == "A3":
                markers.append(f'<rect x="{fmt(cx - glyph)}" y="{fmt(-cy - glyph)}" '
                               f'width="{fmt(2 * glyph)}" height="{fmt(2 * glyph)}" {STYLE_A3}/>')
    if markers:
        out.append('<g id="markers">')
        out.extend(markers)
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
