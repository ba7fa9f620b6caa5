"""Planar predicates with exact sign decisions.

The orientation test uses a floating-point filter and falls back to an exact
expansion sum of the six coordinate products (Dekker split + Two-Sum). Before
the exact step each axis is rescaled by a power of two, which preserves the
sign, so the result is exact for any finite doubles whose nonzero magnitudes
on each axis lie within a factor of 2**900 of that axis's largest one.
All kernels are numba-compiled and are shared by the tour and search code.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps / 2.0  # unit roundoff, 2**-53
_SPLITTER = 134217729.0  # 2**27 + 1
_CCW_ERRBOUND_A = (3.0 + 16.0 * _EPS) * _EPS
_FILTER_FLOOR = 2.0**-900  # below this the filter's products may have underflowed


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point coordinate: ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"zero-length segment at {self.a}")


class Orientation(enum.IntEnum):
    CLOCKWISE = -1
    COLLINEAR = 0
    COUNTERCLOCKWISE = 1


# --------------------------------------------------------------------------
# error-free transformations


@njit(cache=True, inline="always")
def _two_sum(a, b):
    x = a + b
    bv = x - a
    av = x - bv
    return x, (a - av) + (b - bv)


@njit(cache=True, inline="always")
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_product(a, b):
    x = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = x - ahi * bhi - alo * bhi - ahi * blo
    return x, alo * blo - err


@njit(cache=True)
def _orient_exact(ax, ay, bx, by, cx, cy):
    terms = np.empty(12)
    terms[0], terms[1] = _two_product(bx, cy)
    terms[2], terms[3] = _two_product(-bx, ay)
    terms[4], terms[5] = _two_product(-ax, cy)
    terms[6], terms[7] = _two_product(-by, cx)
    terms[8], terms[9] = _two_product(by, ax)
    terms[10], terms[11] = _two_product(ay, cx)
    # grow a nonoverlapping expansion one term at a time (zero-eliminating)
    e = np.zeros(13)
    m = 0
    for t in range(12):
        q = terms[t]
        k = 0
        for i in range(m):
            q, h = _two_sum(q, e[i])
            if h != 0.0:
                e[k] = h
                k += 1
        if q != 0.0:
            e[k] = q
            k += 1
        m = k
    if m == 0:
        return 0
    return 1 if e[m - 1] > 0.0 else -1


@njit(cache=True, inline="always")
def _axis_shift(a, b, c):
    # exponent shift putting the largest magnitude near 2**500
    m = max(abs(a), abs(b), abs(c))
    if m == 0.0:
        return 0
    return 500 - math.frexp(m)[1]


@njit(cache=True)
def orient_sign(ax, ay, bx, by, cx, cy):
    """Sign of (b - a) x (c - a): +1 left turn, -1 right turn, 0 collinear."""
    detleft = (bx - ax) * (cy - ay)
    detright = (by - ay) * (cx - ax)
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    errbound = _CCW_ERRBOUND_A * detsum
    if detsum > _FILTER_FLOOR:
        if det > errbound:
            return 1
        if -det > errbound:
            return -1
    sx = _axis_shift(ax, bx, cx)
    sy = _axis_shift(ay, by, cy)
    return _orient_exact(
        math.ldexp(ax, sx), math.ldexp(ay, sy),
        math.ldexp(bx, sx), math.ldexp(by, sy),
        math.ldexp(cx, sx), math.ldexp(cy, sy),
    )


@njit(cache=True, inline="always")
def _in_box(ax, ay, bx, by, px, py):
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


@njit(cache=True)
def seg_cross(ax, ay, bx, by, cx, cy, dx, dy):
    """Closed-segment intersection test for [a, b] and [c, d]."""
    if max(ax, bx) < min(cx, dx) or max(cx, dx) < min(ax, bx):
        return False
    if max(ay, by) < min(cy, dy) or max(cy, dy) < min(ay, by):
        return False
    o1 = orient_sign(ax, ay, bx, by, cx, cy)
    o2 = orient_sign(ax, ay, bx, by, dx, dy)
    if o1 * o2 > 0:
        return False
    o3 = orient_sign(cx, cy, dx, dy, ax, ay)
    o4 = orient_sign(cx, cy, dx, dy, bx, by)
    if o3 * o4 > 0:
        return False
    if o1 != 0 and o2 != 0 and o3 != 0 and o4 != 0:
        return True
    # some endpoint lies on the other segment's supporting line
    if o1 == 0 and _in_box(ax, ay, bx, by, cx, cy):
        return True
    if o2 == 0 and _in_box(ax, ay, bx, by, dx, dy):
        return True
    if o3 == 0 and _in_box(cx, cy, dx, dy, ax, ay):
        return True
    if o4 == 0 and _in_box(cx, cy, dx, dy, bx, by):
        return True
    return False


@njit(cache=True)
def seg_cross_proper(ax, ay, bx, by, cx, cy, dx, dy):
    """True only for an interior crossing (all four orientations nonzero)."""
    o1 = orient_sign(ax, ay, bx, by, cx, cy)
    o2 = orient_sign(ax, ay, bx, by, dx, dy)
    o3 = orient_sign(cx, cy, dx, dy, ax, ay)
    o4 = orient_sign(cx, cy, dx, dy, bx, by)
    return o1 * o2 < 0 and o3 * o4 < 0


# --------------------------------------------------------------------------
# public API on value types


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def orientation(a: Point, b: Point, c: Point) -> Orientation:
    return Orientation(int(orient_sign(a.x, a.y, b.x, b.y, c.x, c.y)))


def segments_cross(s: Segment, t: Segment) -> bool:
    """Whether two closed segments share at least one point.

    Proper crossings, an endpoint touching the other segment, and collinear
    overlaps all count. Exempting adjacent tour edges is the caller's job.
    """
    return bool(seg_cross(s.a.x, s.a.y, s.b.x, s.b.y, t.a.x, t.a.y, t.b.x, t.b.y))


def segments_cross_properly(s: Segment, t: Segment) -> bool:
    return bool(seg_cross_proper(s.a.x, s.a.y, s.b.x, s.b.y, t.a.x, t.a.y, t.b.x, t.b.y))
