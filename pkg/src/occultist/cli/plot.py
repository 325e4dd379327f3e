"""Chart-local SVG / CSV drawings of RP^2 scenes."""

from __future__ import annotations

import math
import sys
from fractions import Fraction

from ..errors import DimensionMismatch
from ..projgeom import ConePolytope, _neg, body_from_facets
from ..ratlin import primitive, rank

PALETTE = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]
CLIP = 16


def _dot(a, b):
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


class Chart:
    """Affine chart ``{H x != 0}`` with coordinates ``(L1 x, L2 x) / H x``."""

    def __init__(self, h):
        self.h = tuple(Fraction(x) for x in h)
        if len(self.h) != 3:
            raise DimensionMismatch("plotting needs RP^2 (ambient dimension 3)")
        units = [tuple(1 if i == j else 0 for j in range(3)) for i in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                if rank([self.h, units[i], units[j]], 3) == 3:
                    self.l1, self.l2 = units[i], units[j]
                    return
        raise ValueError("chart covector must be nonzero")

    def coords(self, v):
        s = _dot(self.h, v)
        return (_dot(self.l1, v) / s, _dot(self.l2, v) / s)

    def fit(self, body: ConePolytope):
        """Lift of the body inside the chart, clipped if it leaves it.

        Returns
        -------
        (ConePolytope, bool)
            The drawable body and whether clipping happened.
        """
        for s in (1, -1):
            if all(s * _dot(self.h, g) > 0 for g in body.generators):
                return (body if s > 0 else body.negated()), False
        for s in (1, -1):
            facets = [f if s > 0 else _neg(f) for f in body.facets]
            box = [tuple(CLIP * a - b for a, b in zip(self.h, self.l1)), tuple(CLIP * a + b for a, b in zip(self.h, self.l1)),
                   tuple(CLIP * a - b for a, b in zip(self.h, self.l2)), tuple(CLIP * a + b for a, b in zip(self.h, self.l2))]
            try:
                clipped = body_from_facets([primitive(f) for f in facets + box], 3)
            except Exception:  # noqa: BLE001 - this lift has no part in the chart
                continue
            if all(_dot(self.h, g) > 0 for g in clipped.generators):
                return clipped, True
        return None, True

    def polygon(self, body: ConePolytope):
        pts = [tuple(float(c) for c in self.coords(g)) for g in body.generators]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        return pts, (cx, cy)


def _f(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def layout(chart: Chart, named_bodies, links=(), warn=sys.stderr):
    """Polygons, centres and link segments in chart coordinates."""
    polys = []
    for name, body in named_bodies:
        fitted, clipped = chart.fit(body)
        if clipped:
            print(f"warning: body {name} is not contained in the chart; clipped", file=warn)
        if fitted is None:
            continue
        pts, c = chart.polygon(fitted)
        polys.append((name, pts, c))
    centers = {name: c for name, _, c in polys}
    segs = [(a, b, centers[a], centers[b]) for a, b in links if a in centers and b in centers]
    return polys, segs


def to_csv(polys, segs) -> str:
    out = ["name,x,y,kind"]
    for name, pts, c in polys:
        for p in pts:
            out.append(f"{name},{_f(p[0])},{_f(p[1])},vertex")
        out.append(f"{name},{_f(c[0])},{_f(c[1])},center")
    for a, b, p, q in segs:
        out.append(f"{a}-{b},{_f(p[0])},{_f(p[1])},edge")
        out.append(f"{a}-{b},{_f(q[0])},{_f(q[1])},edge")
    return "\n".join(out) + "\n"


def to_svg(polys, segs, size: int = 600) -> str:
    xs = [p[0] for _, pts, _ in polys for p in pts] or [0.0, 1.0]
    ys = [p[1] for _, pts, _ in polys for p in pts] or [0.0, 1.0]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = 0.05 * span
    scale = size / (span + 2 * pad)

    def tx(p):
        return (p[0] - x0 + pad) * scale, (y1 - p[1] + pad) * scale

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    for i, (name, pts, _) in enumerate(polys):
        col = PALETTE[i % len(PALETTE)]
        path = " ".join(f"{_f(a)},{_f(b)}" for a, b in map(tx, pts))
        out.append(f'<polygon id="{name}" points="{path}" fill="{col}" fill-opacity="0.35" '
                   f'stroke="{col}" stroke-width="1"/>')
    for a, b, p, q in segs:
        (ax, ay), (bx, by) = tx(p), tx(q)
        out.append(f'<line class="edge" x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" '
                   f'stroke="black" stroke-width="0.8"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
