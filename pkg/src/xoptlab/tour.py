"""Instances, tours, crossing detection and the 2-exchange move."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from numba import njit

from .geometry import Point, seg_cross


@dataclass(frozen=True, eq=False)
class Instance:
    """An ordered set of distinct planar points with provenance metadata."""

    coords: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64, copy=True)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError(f"coords must have shape (n, 2), got {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("instance contains non-finite coordinates")
        if len(np.unique(coords, axis=0)) != len(coords):
            raise ValueError("instance contains duplicate points")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_points(cls, points: Iterable[Point | Sequence[float]], meta: dict | None = None) -> Instance:
        return cls(np.array([tuple(p) for p in points], dtype=np.float64).reshape(-1, 2), dict(meta or {}))

    @property
    def n(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def point(self, i: int) -> Point:
        return Point(float(self.coords[i, 0]), float(self.coords[i, 1]))

    @property
    def points(self) -> list[Point]:
        return [self.point(i) for i in range(self.n)]

    @property
    def xs(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.coords[:, 1]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return np.array_equal(self.coords, other.coords) and self.meta == other.meta

    __hash__ = None


class CrossingPair(NamedTuple):
    i: int
    j: int


@dataclass(frozen=True, eq=False)
class Tour:
    """A Hamiltonian cycle, edge i runs from order[i] to order[(i + 1) % n]."""

    order: np.ndarray
    length: float

    def __post_init__(self):
        order = np.array(self.order, dtype=np.int64, copy=True)
        n = len(order)
        if order.ndim != 1 or n < 3:
            raise ValueError("a tour needs at least 3 vertices")
        if not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("tour order is not a permutation of 0..n-1")
        order.flags.writeable = False
        object.__setattr__(self, "order", order)

    @classmethod
    def from_order(cls, inst: Instance, order: Sequence[int]) -> Tour:
        order = np.asarray(order, dtype=np.int64)
        if len(order) != inst.n:
            raise ValueError(f"tour has {len(order)} vertices, instance has {inst.n}")
        return cls(order, float(_cycle_length(inst.xs, inst.ys, order)))

    @property
    def n(self) -> int:
        return len(self.order)

    def canonical(self) -> tuple[int, ...]:
        return canonical_order(self.order)

    def same_cycle(self, other: Tour) -> bool:
        return self.canonical() == other.canonical()

    def to_text(self) -> str:
        return " ".join(str(int(v)) for v in self.order) + "\n"


def canonical_order(order: Sequence[int]) -> tuple[int, ...]:
    """Rotate so vertex 0 leads, then keep the direction whose second vertex is smaller."""
    seq = [int(v) for v in order]
    k = seq.index(0)
    seq = seq[k:] + seq[:k]
    rev = [seq[0]] + seq[:0:-1]
    return tuple(min(seq, rev))


# --------------------------------------------------------------------------
# kernels; `order` may be any cycle of distinct vertex ids, not just a full tour


@njit(cache=True)
def _cycle_length(xs, ys, order):
    m = len(order)
    total = 0.0
    for e in range(m):
        p = order[e]
        q = order[(e + 1) % m]
        total += math.hypot(xs[p] - xs[q], ys[p] - ys[q])
    return total


@njit(cache=True, inline="always")
def _edges_cross(xs, ys, order, e, f):
    m = len(order)
    p = order[e]
    q = order[(e + 1) % m]
    r = order[f]
    s = order[(f + 1) % m]
    return seg_cross(xs[p], ys[p], xs[q], ys[q], xs[r], ys[r], xs[s], ys[s])


@njit(cache=True)
def _find_crossing_from(xs, ys, order, start):
    m = len(order)
    for de in range(m):
        e = (start + de) % m
        p = order[e]
        q = order[(e + 1) % m]
        px, py, qx, qy = xs[p], ys[p], xs[q], ys[q]
        lox, hix = min(px, qx), max(px, qx)
        loy, hiy = min(py, qy), max(py, qy)
        for k in range(2, m - 1):
            f = (e + k) % m
            r = order[f]
            s = order[(f + 1) % m]
            rx, ry, sx, sy = xs[r], ys[r], xs[s], ys[s]
            if max(rx, sx) < lox or min(rx, sx) > hix:
                continue
            if max(ry, sy) < loy or min(ry, sy) > hiy:
                continue
            if seg_cross(px, py, qx, qy, rx, ry, sx, sy):
                return min(e, f), max(e, f)
    return -1, -1


@njit(cache=True)
def _count_crossings_brute(xs, ys, order):
    m = len(order)
    count = 0
    for e in range(m):
        for f in range(e + 2, m):
            if e == 0 and f == m - 1:
                continue
            if _edges_cross(xs, ys, order, e, f):
                count += 1
    return count


@njit(cache=True)
def _count_crossings_sweep(xs, ys, order):
    """Sort-and-sweep on edge x-extents; same result as the brute scan."""
    m = len(order)
    x0 = np.empty(m)
    x1 = np.empty(m)
    y0 = np.empty(m)
    y1 = np.empty(m)
    for e in range(m):
        p = order[e]
        q = order[(e + 1) % m]
        x0[e] = min(xs[p], xs[q])
        x1[e] = max(xs[p], xs[q])
        y0[e] = min(ys[p], ys[q])
        y1[e] = max(ys[p], ys[q])
    idx = np.argsort(x0, kind="mergesort")
    count = 0
    for a in range(m):
        e = idx[a]
        for b in range(a + 1, m):
            f = idx[b]
            if x0[f] > x1[e]:
                break
            if y0[f] > y1[e] or y1[f] < y0[e]:
                continue
            d = abs(e - f)
            if d == 1 or d == m - 1:
                continue
            if _edges_cross(xs, ys, order, e, f):
                count += 1
    return count


@njit(cache=True)
def _gain(xs, ys, order, i, j):
    m = len(order)
    a = order[i]
    b = order[(i + 1) % m]
    c = order[j]
    d = order[(j + 1) % m]
    old = math.hypot(xs[a] - xs[b], ys[a] - ys[b]) + math.hypot(xs[c] - xs[d], ys[c] - ys[d])
    new = math.hypot(xs[a] - xs[c], ys[a] - ys[c]) + math.hypot(xs[b] - xs[d], ys[b] - ys[d])
    return old - new


@njit(cache=True)
def _reverse_shorter(order, i, j):
    """Apply the 2-exchange on edges i < j in place.

    Either reverse order[i+1..j] or the complementary arc order[j+1..i+n];
    both give the same cycle and leave the new edges at positions i and j.
    """
    m = len(order)
    inner = j - i
    if inner <= m - inner:
        lo = i + 1
        hi = j
    else:
        lo = j + 1
        hi = i + m
    while lo < hi:
        a = lo % m
        b = hi % m
        tmp = order[a]
        order[a] = order[b]
        order[b] = tmp
        lo += 1
        hi -= 1


# --------------------------------------------------------------------------
# public operations


def tour_length(inst: Instance, t: Tour) -> float:
    return float(_cycle_length(inst.xs, inst.ys, t.order))


def cycle_length(inst: Instance, cycle: Sequence[int]) -> float:
    """Length of a closed cycle through a subset of the instance's points."""
    return float(_cycle_length(inst.xs, inst.ys, _as_cycle(inst, cycle)))


def _as_cycle(inst: Instance, cycle) -> np.ndarray:
    arr = np.asarray(cycle, dtype=np.int64)
    if arr.ndim != 1 or len(arr) < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    if len(np.unique(arr)) != len(arr) or arr.min() < 0 or arr.max() >= inst.n:
        raise ValueError("cycle vertices must be distinct instance indices")
    return arr


def _normalize_pair(n: int, i: int, j: int) -> tuple[int, int]:
    i, j = int(i), int(j)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"edge index out of range for n={n}: ({i}, {j})")
    if i > j:
        i, j = j, i
    if j - i < 2 or (i == 0 and j == n - 1):
        raise ValueError(f"edges {i} and {j} are equal or adjacent")
    return i, j


def find_crossing_from(inst: Instance, t: Tour, start_edge: int = 0) -> CrossingPair | None:
    """First crossing pair met when scanning edges start_edge, start_edge+1, ...

    For each edge e the other edges are tested in cyclic order e+2, e+3, ...
    Returns None iff the tour is noncrossing.
    """
    i, j = _find_crossing_from(inst.xs, inst.ys, t.order, int(start_edge) % t.n)
    if i < 0:
        return None
    return CrossingPair(int(i), int(j))


def exchange_gain(inst: Instance, t: Tour, i: int, j: int) -> float:
    """Old minus new length for the 2-exchange of edges i and j."""
    i, j = _normalize_pair(t.n, i, j)
    return float(_gain(inst.xs, inst.ys, t.order, i, j))


def two_exchange(inst: Instance, t: Tour, i: int, j: int) -> Tour:
    """Replace edges (a,b), (c,d) by (a,c), (b,d), reversing the shorter arc."""
    i, j = _normalize_pair(t.n, i, j)
    gain = _gain(inst.xs, inst.ys, t.order, i, j)
    order = np.array(t.order)
    _reverse_shorter(order, i, j)
    return Tour(order, t.length - gain)


def count_crossings(inst: Instance, t: Tour | Sequence[int]) -> int:
    """Number of non-adjacent edge pairs whose closed segments intersect."""
    order = t.order if isinstance(t, Tour) else _as_cycle(inst, t)
    return int(_count_crossings_sweep(inst.xs, inst.ys, order))


def count_crossings_brute(inst: Instance, t: Tour | Sequence[int]) -> int:
    order = t.order if isinstance(t, Tour) else _as_cycle(inst, t)
    return int(_count_crossings_brute(inst.xs, inst.ys, order))


def crossing_pairs(inst: Instance, t: Tour) -> list[CrossingPair]:
    n = t.n
    out = []
    for e in range(n):
        for f in range(e + 2, n):
            if e == 0 and f == n - 1:
                continue
            if _edges_cross(inst.xs, inst.ys, t.order, e, f):
                out.append(CrossingPair(e, f))
    return out


# --------------------------------------------------------------------------
# text formats


def read_tour(path: str | Path) -> np.ndarray:
    text = Path(path).read_text()
    tokens = [tok for line in text.splitlines() if not line.startswith("#") for tok in line.split()]
    try:
        return np.array([int(tok) for tok in tokens], dtype=np.int64)
    except ValueError as exc:
        raise ValueError(f"malformed tour file {path}: {exc}") from None


def write_tour(path: str | Path, order: Sequence[int]) -> None:
    Path(path).write_text(" ".join(str(int(v)) for v in order) + "\n")
