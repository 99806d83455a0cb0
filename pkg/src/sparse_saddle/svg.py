"""Minimal log-log line chart written as SVG text."""
from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=20, top=30, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def loglog_chart(series, guide_rate=None, title="", xlabel="N", ylabel="tail") -> str:
    """``series``: list of ``(label, xs, ys)``; nonpositive points are dropped.

    ``guide_rate`` adds a dashed ``C N^-r`` line anchored at the first series' first point.
    """
    pts = [(lab, [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]) for lab, xs, ys in series]
    allp = [p for _, ps in pts for p in ps]
    if not allp:
        allp = [(1.0, 1.0), (10.0, 10.0)]
    lx = [math.log10(x) for x, _ in allp]
    ly = [math.log10(y) for _, y in allp]
    x0, x1 = math.floor(min(lx)), math.ceil(max(lx))
    y0, y1 = math.floor(min(ly)), math.ceil(max(ly))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (math.log10(x) - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + (y1 - math.log10(y)) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    for e in range(x0, x1 + 1):
        X = _fmt(sx(10.0**e))
        out.append(f'<line x1="{X}" y1="{MARGIN["top"] + ph}" x2="{X}" y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle">1e{e}</text>')
    ystep = max(1, (y1 - y0 + 7) // 8)
    for e in range(y0, y1 + 1, ystep):
        Y = _fmt(sy(10.0**e))
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y}" x2="{MARGIN["left"]}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">1e{e}</text>')
    for k, (lab, ps) in enumerate(pts):
        if not ps:
            continue
        c = COLORS[k % len(COLORS)]
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in ps)
        out.append(f'<polyline points="{path}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        out.append(
            f'<text x="{MARGIN["left"] + pw - 10}" y="{MARGIN["top"] + 16 + 16 * k}" '
            f'text-anchor="end" fill="{c}">{lab}</text>'
        )
    if guide_rate is not None and pts and pts[0][1]:
        (xa, ya) = pts[0][1][0]
        xb = 10.0**x1
        yb = ya * (xb / xa) ** (-guide_rate)
        # clip the guide to the plot box
        ymin = 10.0**y0
        if yb < ymin:
            xb = xa * (ymin / ya) ** (-1.0 / guide_rate)
            yb = ymin
        out.append(
            f'<line x1="{_fmt(sx(xa))}" y1="{_fmt(sy(ya))}" x2="{_fmt(sx(xb))}" y2="{_fmt(sy(yb))}" '
            'stroke="gray" stroke-dasharray="6,4"/>'
        )
        out.append(
            f'<text x="{MARGIN["left"] + pw - 10}" y="{MARGIN["top"] + 16 + 16 * len(pts)}" '
            f'text-anchor="end" fill="gray">slope -{guide_rate:.3g}</text>'
        )
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{ylabel}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="18" text-anchor="middle">{title}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
