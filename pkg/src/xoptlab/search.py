"""X-opt (crossing-removal 2-opt) and first-improvement 2-opt."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

from .tour import (
    Instance,
    Tour,
    _count_crossings_sweep,
    _cycle_length,
    _find_crossing_from,
    _gain,
    _reverse_shorter,
)

_TWOOPT_REL_TOL = 1e-12


class BudgetExhausted(RuntimeError):
    """Raised when a local search exceeds its exchange budget."""


class Heuristic(str, enum.Enum):
    XOPT = "xopt"
    TWOOPT = "twoopt"


@dataclass(frozen=True)
class SearchConfig:
    heuristic: Heuristic = Heuristic.XOPT
    max_iterations: int | None = None  # None means n**3
    seed: int = 0
    record_trace: bool = True

    def __post_init__(self):
        object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def budget(self, n: int) -> int:
        return self.max_iterations if self.max_iterations is not None else n**3


@dataclass(frozen=True)
class SearchReport:
    final_tour: Tour
    iterations: int
    initial_length: float
    final_length: float
    length_trace: np.ndarray | None = None


def random_tour(n: int, seed: int, inst: Instance | None = None) -> Tour:
    """Uniformly random tour; numpy's permutation is a seeded Fisher-Yates shuffle."""
    if n < 3:
        raise ValueError(f"random_tour needs n >= 3, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    if inst is None:
        return Tour(order, float("nan"))
    return Tour.from_order(inst, order)


def identity_tour(inst: Instance) -> Tour:
    return Tour.from_order(inst, np.arange(inst.n))


@njit(cache=True)
def _push(buf, k, value):
    if k == len(buf):
        bigger = np.empty(2 * len(buf))
        bigger[:k] = buf
        buf = bigger
    buf[k] = value
    return buf


@njit(cache=True)
def _xopt_kernel(xs, ys, order, max_iter, length):
    trace = np.empty(64)
    it = 0
    pos = 0
    while True:
        i, j = _find_crossing_from(xs, ys, order, pos)
        if i < 0:
            return it, trace[:it], True
        if it >= max_iter:
            return it, trace[:it], False
        length -= _gain(xs, ys, order, i, j)
        _reverse_shorter(order, i, j)
        trace = _push(trace, it, length)
        it += 1
        pos = i


@njit(cache=True)
def _twoopt_kernel(xs, ys, order, max_iter, length, rel_tol):
    m = len(order)
    trace = np.empty(64)
    it = 0
    pos = 0
    while True:
        found = False
        for de in range(m):
            e = (pos + de) % m
            for k in range(2, m - 1):
                f = (e + k) % m
                i = min(e, f)
                j = max(e, f)
                g = _gain(xs, ys, order, i, j)
                if g > rel_tol * (1.0 + length):
                    if it >= max_iter:
                        return it, trace[:it], False
                    _reverse_shorter(order, i, j)
                    length -= g
                    trace = _push(trace, it, length)
                    it += 1
                    pos = i
                    found = True
                    break
            if found:
                break
        if not found:
            return it, trace[:it], True


def _run(kernel, inst: Instance, start: Tour, cfg: SearchConfig, *extra) -> SearchReport:
    if start.n != inst.n:
        raise ValueError("start tour does not match the instance size")
    order = np.array(start.order, dtype=np.int64)
    initial = float(_cycle_length(inst.xs, inst.ys, order))
    budget = cfg.budget(inst.n)
    iterations, trace, done = kernel(inst.xs, inst.ys, order, budget, initial, *extra)
    if not done:
        raise BudgetExhausted(
            f"{cfg.heuristic.value} exceeded {budget} exchanges on n={inst.n}; "
            "predicate inconsistency suspected"
        )
    final = Tour.from_order(inst, order)
    return SearchReport(
        final_tour=final,
        iterations=int(iterations),
        initial_length=initial,
        final_length=final.length,
        length_trace=np.array(trace) if cfg.record_trace else None,
    )


def run_xopt(inst: Instance, start: Tour, cfg: SearchConfig = SearchConfig()) -> SearchReport:
    """Remove crossings until none remain.

    Each step takes the first crossing found by the cyclic edge scan, applies
    the 2-exchange that uncrosses it, and resumes the scan at the smaller of
    the two exchanged edge indices.
    """
    return _run(_xopt_kernel, inst, start, cfg)


def run_twoopt(inst: Instance, start: Tour, cfg: SearchConfig = SearchConfig(Heuristic.TWOOPT)) -> SearchReport:
    """First-improvement 2-opt with the same scan order as X-opt."""
    return _run(_twoopt_kernel, inst, start, cfg, _TWOOPT_REL_TOL)


def run_search(inst: Instance, start: Tour, cfg: SearchConfig) -> SearchReport:
    if cfg.heuristic is Heuristic.XOPT:
        return run_xopt(inst, start, cfg)
    return run_twoopt(inst, start, cfg)


def final_crossings(inst: Instance, report: SearchReport) -> int:
    return int(_count_crossings_sweep(inst.xs, inst.ys, report.final_tour.order))
