"""Long noncrossing tours on uniform instances via a strip construction.

The unit square is split into four border regions C1..C5 and a central region
C6 cut into thin vertical strips. Every strip and region carries a
noncrossing Hamiltonian path between designated extreme points; the paths
are chained C1 -> C4 -> S_1 .. S_k -> C5 -> C2 -> C3 -> C1 into one tour.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .generators import Rect, is_nice
from .geometry import orient_sign, seg_cross
from .tour import Instance, Tour, _count_crossings_sweep, _cycle_length


class BudgetExhausted(RuntimeError):
    pass


class CollinearityError(ValueError):
    pass


class FailureReason(str, enum.Enum):
    UNDER_POPULATED_REGION = "UnderPopulatedRegion"
    NOT_NICE = "NotNice"
    CROSSING_DETECTED = "CrossingDetected"


@dataclass(frozen=True)
class RegionPartition:
    n: int
    alpha: float
    c: float
    regions: dict[int, Rect]
    strips: tuple[Rect, ...]

    @property
    def k(self) -> int:
        return len(self.strips)

    @property
    def strip_width(self) -> float:
        return self.strips[0].width

    def region_of(self, pts: np.ndarray) -> np.ndarray:
        """Region label 1..6 per point; boundary points go to the right/upper side."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        c = self.c
        col = np.where(pts[:, 0] < c, 0, np.where(pts[:, 0] >= 1 - c, 2, 1))
        row = (pts[:, 1] >= c).astype(int)
        table = np.array([[1, 4], [3, 6], [2, 5]])
        return table[col, row]

    def strip_of(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        s = np.floor((pts[:, 0] - self.c) / self.strip_width).astype(np.int64)
        return np.clip(s, 0, self.k - 1)


@dataclass(frozen=True)
class PathState:
    vertices: tuple[int, ...]
    exchanges: int = 0

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("path repeats a vertex")

    @property
    def first(self) -> int:
        return self.vertices[0]

    @property
    def last(self) -> int:
        return self.vertices[-1]


@dataclass
class ConstructionResult:
    tour: Tour
    valid: bool
    strip_path_lengths: list[float]
    failure_reason: FailureReason | None = None
    flags: list[FailureReason] = field(default_factory=list)
    initial_length: float = 0.0
    exchanges: int = 0

    @property
    def length(self) -> float:
        return self.tour.length


def build_region_partition(n: int, alpha: float = 10.0, c: float = 0.1) -> RegionPartition:
    """Six regions and k = floor(n / alpha) equal-width strips of C6.

    The strips have width (1 - 2c) / k, so they tile C6 exactly; this equals
    alpha (1 - 2c) / n whenever alpha divides n.
    """
    if not 0 < c < 0.5:
        raise ValueError(f"c must lie in (0, 1/2), got {c}")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if n < alpha:
        raise ValueError(f"n must be >= alpha, got n={n}, alpha={alpha}")
    regions = {
        1: Rect(0.0, 0.0, c, c),
        2: Rect(1 - c, 0.0, 1.0, c),
        3: Rect(c, 0.0, 1 - c, c),
        4: Rect(0.0, c, c, 1.0),
        5: Rect(1 - c, c, 1.0, 1.0),
        6: Rect(c, c, 1 - c, 1.0),
    }
    k = int(math.floor(n / alpha))
    edges = np.linspace(c, 1 - c, k + 1)
    edges[-1] = 1 - c
    strips = tuple(Rect(float(edges[i]), c, float(edges[i + 1]), 1.0) for i in range(k))
    return RegionPartition(n, float(alpha), float(c), regions, strips)


# --------------------------------------------------------------------------
# path uncrossing


@njit(cache=True)
def _path_length(xs, ys, path):
    total = 0.0
    for e in range(len(path) - 1):
        p = path[e]
        q = path[e + 1]
        total += math.hypot(xs[p] - xs[q], ys[p] - ys[q])
    return total


@njit(cache=True)
def _find_path_crossing(xs, ys, path, start):
    m = len(path) - 1  # edge count
    for de in range(m):
        e = (start + de) % m
        p = path[e]
        q = path[e + 1]
        px, py, qx, qy = xs[p], ys[p], xs[q], ys[q]
        lox, hix = min(px, qx), max(px, qx)
        loy, hiy = min(py, qy), max(py, qy)
        for f in range(m):
            if f == e or f == e - 1 or f == e + 1:
                continue
            r = path[f]
            s = path[f + 1]
            rx, ry, sx, sy = xs[r], ys[r], xs[s], ys[s]
            if max(rx, sx) < lox or min(rx, sx) > hix:
                continue
            if max(ry, sy) < loy or min(ry, sy) > hiy:
                continue
            if seg_cross(px, py, qx, qy, rx, ry, sx, sy):
                return min(e, f), max(e, f)
    return -1, -1


@njit(cache=True)
def _uncross_kernel(xs, ys, path, budget):
    """Returns (exchanges, status): status 0 done, 1 budget, 2 collinear."""
    it = 0
    pos = 0
    while len(path) >= 4:
        i, j = _find_path_crossing(xs, ys, path, pos)
        if i < 0:
            break
        a, b, c, d = path[i], path[i + 1], path[j], path[j + 1]
        if (
            orient_sign(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) == 0
            or orient_sign(xs[a], ys[a], xs[b], ys[b], xs[d], ys[d]) == 0
            or orient_sign(xs[c], ys[c], xs[d], ys[d], xs[a], ys[a]) == 0
            or orient_sign(xs[c], ys[c], xs[d], ys[d], xs[b], ys[b]) == 0
        ):
            return it, 2
        if it >= budget:
            return it, 1
        lo = i + 1
        hi = j
        while lo < hi:
            tmp = path[lo]
            path[lo] = path[hi]
            path[hi] = tmp
            lo += 1
            hi -= 1
        it += 1
        pos = i
    return it, 0


def uncross_path(inst: Instance, path: PathState | Sequence[int], budget: int | None = None) -> PathState:
    """Remove crossings from a path by 2-exchanges, keeping both endpoints.

    Each exchange replaces crossing edges (a,b), (c,d) by (a,c), (b,d) and
    reverses the subpath in between, which strictly shortens the path and
    leaves every vertex degree unchanged.
    """
    verts = path.vertices if isinstance(path, PathState) else tuple(int(v) for v in path)
    arr = np.array(verts, dtype=np.int64)
    m = len(arr)
    if budget is None:
        budget = max(1, m**3)
    exchanges, status = _uncross_kernel(inst.xs, inst.ys, arr, budget)
    if status == 1:
        raise BudgetExhausted(f"uncross_path exceeded {budget} exchanges on {m} points")
    if status == 2:
        raise CollinearityError("collinear points met while uncrossing a path")
    return PathState(tuple(int(v) for v in arr), exchanges)


def path_length(inst: Instance, path: PathState | Sequence[int]) -> float:
    verts = path.vertices if isinstance(path, PathState) else path
    return float(_path_length(inst.xs, inst.ys, np.asarray(verts, dtype=np.int64)))


def path_crossings(inst: Instance, path: PathState | Sequence[int]) -> int:
    """Crossing pairs among non-adjacent edges of an open path (brute force)."""
    verts = np.asarray(path.vertices if isinstance(path, PathState) else path, dtype=np.int64)
    count = 0
    xs, ys = inst.xs, inst.ys
    for e in range(len(verts) - 1):
        for f in range(e + 2, len(verts) - 1):
            a, b, c, d = verts[e], verts[e + 1], verts[f], verts[f + 1]
            if seg_cross(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], xs[d], ys[d]):
                count += 1
    return count


# --------------------------------------------------------------------------
# the strip construction

# (start, end) designations per region; keys name the extreme taken
_ENDPOINTS = {
    1: ("right", "top"),
    4: ("bottom", "right"),
    5: ("left", "bottom"),
    2: ("top", "left"),
    3: ("right", "left"),
}
_CYCLE_BEFORE_STRIPS = (1, 4)
_CYCLE_AFTER_STRIPS = (5, 2, 3)


def _extreme_order(pts: np.ndarray, which: str) -> np.ndarray:
    """Local indices sorted from most to least extreme (stable)."""
    key = {
        "left": pts[:, 0],
        "right": -pts[:, 0],
        "bottom": pts[:, 1],
        "top": -pts[:, 1],
    }[which]
    return np.argsort(key, kind="stable")


def _snake_order(pts: np.ndarray, rect: Rect) -> np.ndarray:
    """Boustrophedon order in bands parallel to the rectangle's long side."""
    m = len(pts)
    tall = rect.height >= rect.width
    along, across = (1, 0) if tall else (0, 1)
    lo = rect.x0 if tall else rect.y0
    short, long_ = (rect.width, rect.height) if tall else (rect.height, rect.width)
    bands = max(1, int(math.ceil(math.sqrt(m * short / long_))))
    band = np.clip(((pts[:, across] - lo) / short * bands).astype(np.int64), 0, bands - 1)
    key = np.where(band % 2 == 0, pts[:, along], -pts[:, along])
    return np.lexsort((key, band))


def _region_path(
    inst: Instance, idx: np.ndarray, rect: Rect | None, start: str, end: str, flags: list
) -> tuple[np.ndarray, np.ndarray, int]:
    """Initial and uncrossed path through idx, `start`-most to `end`-most point."""
    if len(idx) <= 1:
        return idx, idx, 0
    pts = inst.coords[idx]
    s = int(_extreme_order(pts, start)[0])
    end_rank = _extreme_order(pts, end)
    t = int(end_rank[0])
    if t == s:
        flags.append(FailureReason.NOT_NICE)
        t = int(end_rank[1])
    rest = np.setdiff1d(np.arange(len(idx)), [s, t])
    if rect is None:
        rest = rest[np.argsort(pts[rest, 1], kind="stable")]
    else:
        rest = rest[_snake_order(pts[rest], rect)]
    local = np.concatenate([[s], rest, [t]]).astype(np.int64)
    initial = idx[local]
    path = uncross_path(inst, initial)
    return initial, np.array(path.vertices, dtype=np.int64), path.exchanges


def _chain(regions: dict[int, np.ndarray], strips: list[np.ndarray]) -> np.ndarray:
    parts = [regions[r] for r in _CYCLE_BEFORE_STRIPS] + strips + [regions[r] for r in _CYCLE_AFTER_STRIPS]
    return np.concatenate([p for p in parts if len(p)]).astype(np.int64)


def construct_long_tour(inst: Instance, alpha: float = 10.0, c: float = 0.1) -> ConstructionResult:
    """Noncrossing tour of length Omega(n) on a uniform instance.

    Never raises on an unlucky sample: precondition violations are collected
    in ``flags`` and the final crossing check decides ``valid``.
    """
    coords = inst.coords
    if np.any(coords < 0) or np.any(coords > 1):
        raise ValueError("construct_long_tour expects points in the unit square")
    part = build_region_partition(inst.n, alpha, c)
    region = part.region_of(coords)
    flags: list[FailureReason] = []
    exchanges = 0
    pieces: dict[int, np.ndarray] = {}
    initial: dict[int, np.ndarray] = {}

    for r, (start, end) in _ENDPOINTS.items():
        idx = np.flatnonzero(region == r)
        if len(idx) < 2:
            flags.append(FailureReason.UNDER_POPULATED_REGION)
        elif not is_nice(coords[idx], part.regions[r]):
            flags.append(FailureReason.NOT_NICE)
        initial[r], pieces[r], ex = _region_path(inst, idx, part.regions[r], start, end, flags)
        exchanges += ex

    # strips of C6, each a path from its leftmost to its rightmost point
    c6 = np.flatnonzero(region == 6)
    strip = part.strip_of(coords[c6])
    c6 = c6[np.lexsort((coords[c6, 1], strip))]
    strip = np.sort(strip, kind="stable")
    bounds = np.searchsorted(strip, np.arange(part.k + 1))
    strip_paths = []
    strip_initial = []
    strip_lengths = []
    for i in range(part.k):
        idx = c6[bounds[i] : bounds[i + 1]]
        start_path, path, ex = _region_path(inst, idx, None, "left", "right", flags)
        exchanges += ex
        strip_initial.append(start_path)
        strip_paths.append(path)
        strip_lengths.append(path_length(inst, path) if len(path) >= 2 else 0.0)

    order = _chain(pieces, strip_paths)
    initial_order = _chain(initial, strip_initial)
    if len(order) != inst.n or len(np.unique(order)) != inst.n:
        raise AssertionError("construction lost or duplicated points")
    tour = Tour.from_order(inst, order)
    crossings = int(_count_crossings_sweep(inst.xs, inst.ys, tour.order))
    valid = crossings == 0
    reason = None
    if not valid:
        reason = flags[0] if flags else FailureReason.CROSSING_DETECTED
    return ConstructionResult(
        tour=tour,
        valid=valid,
        strip_path_lengths=strip_lengths,
        failure_reason=reason,
        flags=sorted(set(flags), key=lambda f: f.value),
        initial_length=float(_cycle_length(inst.xs, inst.ys, initial_order)),
        exchanges=exchanges,
    )


# --------------------------------------------------------------------------
# E|X - Y| for independent uniforms


def expected_abs_uniform_gap(a: float, b: float) -> float:
    """E|X - Y| for X, Y i.i.d. uniform on [a, b]."""
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    return (b - a) / 3


def mc_abs_uniform_gap(a: float, b: float, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo mean of |X - Y| and its standard error."""
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    rng = np.random.default_rng(seed)
    gaps = np.abs(rng.uniform(a, b, samples) - rng.uniform(a, b, samples))
    return float(gaps.mean()), float(gaps.std(ddof=1) / math.sqrt(samples))
