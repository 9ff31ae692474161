"""Vertices, area and export of bounded 2-D rate regions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .lp import LPSolver, UNBOUNDED
from .system import IneqSystem, LinIneq, SystemError_, UnboundedRegionError

VERTEX_TOL = 1e-9


@dataclass(frozen=True)
class Region2D:
    vertices: tuple[tuple[float, float], ...]
    area: float
    variables: tuple[str, str] = ("R1", "R2")

    @property
    def empty(self) -> bool:
        return not self.vertices

    def to_csv(self) -> str:
        lines = [",".join(self.variables)]
        lines += [f"{x:.12g},{y:.12g}" for x, y in self.vertices]
        return "\n".join(lines) + "\n"

    def matches(self, other: "Region2D", tol: float = 1e-7) -> bool:
        """Same vertex set within tol (order-insensitive)."""
        if len(self.vertices) != len(other.vertices):
            return False
        used = set()
        for v in self.vertices:
            hit = next(
                (i for i, w in enumerate(other.vertices)
                 if i not in used and abs(v[0] - w[0]) <= tol and abs(v[1] - w[1]) <= tol),
                None,
            )
            if hit is None:
                return False
            used.add(hit)
        return True


def _check_bounded(sys: IneqSystem) -> bool:
    """False when the region is empty; raises when it is unbounded."""
    A = [[r.coeff(v) for v in sys.variables] for r in sys.rows] or [[Fraction(0)] * 2]
    b = [r.rhs for r in sys.rows] or [0.0]
    solver = LPSolver(A, b)
    if not solver.feasible:
        return False
    for c in ([1, 0], [0, 1]):
        if solver.maximize(c).status == UNBOUNDED:
            raise UnboundedRegionError("region is unbounded")
    return True


def _satisfies(rows: Sequence[LinIneq], variables, p, tol) -> bool:
    for r in rows:
        lhs = float(r.coeff(variables[0])) * p[0] + float(r.coeff(variables[1])) * p[1]
        if lhs > r.rhs + tol * max(1.0, abs(r.rhs)):
            return False
    return True


def geometry2d(sys: IneqSystem) -> Region2D:
    """Vertex enumeration by pairwise row intersection; area by shoelace."""
    if sys.symbolic:
        raise SystemError_("geometry needs a numeric system")
    if len(sys.variables) != 2:
        raise SystemError_("geometry needs exactly two variables")
    x, y = sys.variables
    rows = list(sys.rows)
    # the LP solver treats both variables as nonnegative; make that explicit here
    rows += [LinIneq.of({x: -1}, 0.0), LinIneq.of({y: -1}, 0.0)]
    if not _check_bounded(sys):
        return Region2D((), 0.0, (x, y))
    lines = [r for r in rows if not r.is_constant]
    pts: list[tuple[float, float]] = []
    for r, s in itertools.combinations(lines, 2):
        a = np.array([[float(r.coeff(x)), float(r.coeff(y))], [float(s.coeff(x)), float(s.coeff(y))]])
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if abs(det) < 1e-14:
            continue
        p = np.linalg.solve(a, np.array([r.rhs, s.rhs]))
        p = (float(p[0]) + 0.0, float(p[1]) + 0.0)
        if _satisfies(rows, (x, y), p, VERTEX_TOL):
            pts.append(p)
    uniq: list[tuple[float, float]] = []
    for p in pts:
        if not any(abs(p[0] - q[0]) <= VERTEX_TOL and abs(p[1] - q[1]) <= VERTEX_TOL for q in uniq):
            uniq.append(p)
    if not uniq:
        return Region2D((), 0.0, (x, y))
    cx = sum(p[0] for p in uniq) / len(uniq)
    cy = sum(p[1] for p in uniq) / len(uniq)
    uniq.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(uniq, uniq[1:] + uniq[:1]):
        area += x0 * y1 - x1 * y0
    return Region2D(tuple(uniq), abs(area) / 2.0, (x, y))


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def svg_overlay(regions: Sequence[Region2D], labels: Sequence[str], size: int = 480) -> str:
    """Self-contained SVG drawing up to four regions on shared axes."""
    if len(regions) > len(_COLORS):
        raise ValueError(f"at most {len(_COLORS)} regions per plot")
    xmax = max([v[0] for r in regions for v in r.vertices] + [1e-9]) * 1.1
    ymax = max([v[1] for r in regions for v in r.vertices] + [1e-9]) * 1.1
    pad = 50
    span = size - 2 * pad

    def tx(px, py):
        return pad + px / xmax * span, size - pad - py / ymax * span

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{pad}" y2="{pad}" stroke="black"/>',
        f'<text x="{size - pad}" y="{size - pad + 30}" text-anchor="end" font-size="12">R1 (max {xmax:.4g})</text>',
        f'<text x="{pad - 10}" y="{pad - 10}" font-size="12">R2 (max {ymax:.4g})</text>',
    ]
    for k, (reg, label) in enumerate(zip(regions, labels)):
        color = _COLORS[k]
        if reg.vertices:
            pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in (tx(*v) for v in reg.vertices))
            out.append(f'<polygon points="{pts}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>')
            for v in reg.vertices:
                a, b = tx(*v)
                out.append(f'<circle cx="{a:.3f}" cy="{b:.3f}" r="3" fill="{color}"/>')
                out.append(
                    f'<text x="{a + 4:.3f}" y="{b - 4:.3f}" font-size="9" fill="{color}">({v[0]:.3g}, {v[1]:.3g})</text>'
                )
        out.append(
            f'<text x="{size - pad}" y="{pad + 16 * k}" text-anchor="end" font-size="12" fill="{color}">'
            f"{escape(label)} (area {reg.area:.4g})</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def region_svg(region: Region2D, label: str = "region") -> str:
    return svg_overlay([region], [label])
