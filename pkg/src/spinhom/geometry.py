"""Exact rational geometry for boxes, lines and convex polygons.

Everything here works over Fractions.  Polygons are lists of (x, y)
vertices in order (either orientation); all cells produced by cutting a
rectangle with straight lines are convex, which is the only case the
callers need.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple[Fraction, Fraction]


def box_polygon(lo: Sequence[Fraction], hi: Sequence[Fraction]) -> list[Point]:
    (x0, y0), (x1, y1) = tuple(lo), tuple(hi)
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def polygon_area(poly: Sequence[Point]) -> Fraction:
    """Absolute area by the shoelace formula."""
    total = Fraction(0)
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2


def polygon_centroid(poly: Sequence[Point]) -> Point:
    """Vertex average; interior point for any convex polygon."""
    n = len(poly)
    sx = sum(p[0] for p in poly)
    sy = sum(p[1] for p in poly)
    return (Fraction(sx, n), Fraction(sy, n))


def clip_polygon(poly: Sequence[Point], normal: Point, offset: Fraction, keep_sign: int) -> list[Point]:
    """Sutherland-Hodgman clip of ``poly`` against a closed half-plane.

    Keeps  {x : <x, normal> - offset >= 0}  for keep_sign = +1, the
    opposite closed half-plane for keep_sign = -1.
    """
    def side(p: Point) -> Fraction:
        return keep_sign * (p[0] * normal[0] + p[1] * normal[1] - offset)

    out: list[Point] = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        scur, snxt = side(cur), side(nxt)
        if scur >= 0:
            out.append(cur)
        if (scur > 0 and snxt < 0) or (scur < 0 and snxt > 0):
            t = scur / (scur - snxt)
            out.append(
                (cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1]))
            )
    # drop consecutive duplicates introduced by vertices lying on the line
    dedup: list[Point] = []
    for p in out:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def line_segment_in_box(
    normal: Sequence[Fraction],
    offset: Fraction,
    lo: Sequence[Fraction],
    hi: Sequence[Fraction],
) -> tuple[Point, Point] | None:
    """The line  <x, normal> = offset  clipped to the closed box, or None.

    Degenerate (single-point) intersections count as None.
    """
    n0, n1 = Fraction(normal[0]), Fraction(normal[1])
    if n0 == 0 and n1 == 0:
        raise ValueError("normal must be nonzero")
    if n0:
        p0 = (Fraction(offset) / n0, Fraction(0))
    else:
        p0 = (Fraction(0), Fraction(offset) / n1)
    direction = (-n1, n0)
    tmin, tmax = None, None
    for axis in range(2):
        p, v = p0[axis], direction[axis]
        a, b = Fraction(lo[axis]), Fraction(hi[axis])
        if v == 0:
            if not a <= p <= b:
                return None
            continue
        t0, t1 = (a - p) / v, (b - p) / v
        if t0 > t1:
            t0, t1 = t1, t0
        tmin = t0 if tmin is None else max(tmin, t0)
        tmax = t1 if tmax is None else min(tmax, t1)
    if tmin is None or tmax is None or tmin >= tmax:
        return None
    pa = (p0[0] + tmin * direction[0], p0[1] + tmin * direction[1])
    pb = (p0[0] + tmax * direction[0], p0[1] + tmax * direction[1])
    return pa, pb


def distance(p: Point, q: Point) -> Fraction | float:
    """Euclidean distance, exact when the segment is axis-parallel."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    if dx == 0:
        return abs(dy)
    if dy == 0:
        return abs(dx)
    return float(dx * dx + dy * dy) ** 0.5
