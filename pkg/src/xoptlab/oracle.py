"""Brute-force ground truth for small instances."""
from __future__ import annotations

import enum
import itertools
from typing import Iterator

import numpy as np
from numba import njit

from .tour import Instance, Tour, _count_crossings_brute, _cycle_length, canonical_order

MAX_DP_N = 16
MAX_ENUM_N = 10


class TourFilter(str, enum.Enum):
    ALL = "all"
    NONCROSSING = "noncrossing"


@njit(cache=True)
def _held_karp(dmat):
    n = dmat.shape[0]
    m = n - 1  # vertex 0 is the fixed start; bit b stands for vertex b + 1
    full = (1 << m) - 1
    dp = np.full((1 << m, m), np.inf)
    parent = np.full((1 << m, m), -1, dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = dmat[0, j + 1]
    for mask in range(1, full + 1):
        for j in range(m):
            if not (mask >> j) & 1:
                continue
            cur = dp[mask, j]
            if cur == np.inf:
                continue
            for k in range(m):
                if (mask >> k) & 1:
                    continue
                nxt = mask | (1 << k)
                cand = cur + dmat[j + 1, k + 1]
                if cand < dp[nxt, k]:
                    dp[nxt, k] = cand
                    parent[nxt, k] = j
    best = np.inf
    last = -1
    for j in range(m):
        cand = dp[full, j] + dmat[j + 1, 0]
        if cand < best:
            best = cand
            last = j
    order = np.empty(n, dtype=np.int64)
    order[0] = 0
    mask = full
    for pos in range(n - 1, 0, -1):
        order[pos] = last + 1
        prev = parent[mask, last]
        mask ^= 1 << last
        last = prev
    return order


def optimal_tour_exact(inst: Instance) -> tuple[Tour, float]:
    """Held-Karp over vertex subsets; the length is re-summed along the canonical tour."""
    if not 3 <= inst.n <= MAX_DP_N:
        raise ValueError(f"optimal_tour_exact supports 3 <= n <= {MAX_DP_N}, got {inst.n}")
    diff = inst.coords[:, None, :] - inst.coords[None, :, :]
    dmat = np.hypot(diff[..., 0], diff[..., 1])
    order = _held_karp(dmat)
    tour = Tour.from_order(inst, canonical_order(order))
    return tour, tour.length


def canonical_orders(n: int) -> np.ndarray:
    """All (n-1)!/2 canonical tours: 0 first, second vertex below the last."""
    if n == 3:
        return np.array([[0, 1, 2]], dtype=np.int64)
    perms = np.array(list(itertools.permutations(range(1, n))), dtype=np.int64)
    perms = perms[perms[:, 0] < perms[:, -1]]
    return np.hstack([np.zeros((len(perms), 1), dtype=np.int64), perms])


@njit(cache=True)
def _score_orders(xs, ys, orders):
    lengths = np.empty(len(orders))
    crossings = np.empty(len(orders), dtype=np.int64)
    for r in range(len(orders)):
        lengths[r] = _cycle_length(xs, ys, orders[r])
        crossings[r] = _count_crossings_brute(xs, ys, orders[r])
    return lengths, crossings


def _scored(inst: Instance):
    if not 3 <= inst.n <= MAX_ENUM_N:
        raise ValueError(f"enumeration supports 3 <= n <= {MAX_ENUM_N}, got {inst.n}")
    orders = canonical_orders(inst.n)
    lengths, crossings = _score_orders(inst.xs, inst.ys, orders)
    return orders, lengths, crossings


def enumerate_tours(inst: Instance, filter: TourFilter | str = TourFilter.ALL) -> Iterator[tuple[Tour, float]]:
    filter = TourFilter(filter)
    orders, lengths, crossings = _scored(inst)
    for order, length, cr in zip(orders, lengths, crossings):
        if filter is TourFilter.NONCROSSING and cr:
            continue
        yield Tour(order, float(length)), float(length)


def tour_extremes(inst: Instance) -> dict:
    """Min/max tour lengths over all tours and over noncrossing tours, in one pass."""
    orders, lengths, crossings = _scored(inst)
    nc = crossings == 0
    out = {
        "count": len(orders),
        "noncrossing_count": int(nc.sum()),
        "min_all": float(lengths.min()),
        "max_all": float(lengths.max()),
    }
    if nc.any():
        out["min_noncrossing"] = float(lengths[nc].min())
        out["max_noncrossing"] = float(lengths[nc].max())
    return out


def longest_noncrossing_tour(inst: Instance) -> tuple[Tour, float]:
    orders, lengths, crossings = _scored(inst)
    nc = np.flatnonzero(crossings == 0)
    if len(nc) == 0:
        raise ValueError("instance admits no noncrossing tour")
    best = nc[np.argmax(lengths[nc])]
    return Tour(orders[best], float(lengths[best])), float(lengths[best])


def shortest_tour_enumerated(inst: Instance) -> tuple[Tour, float]:
    orders, lengths, _ = _scored(inst)
    best = int(np.argmin(lengths))
    return Tour(orders[best], float(lengths[best])), float(lengths[best])
