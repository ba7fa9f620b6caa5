"""End-to-end acceptance checks, one test per criterion, each with its runtime limit."""
import math
import time

import numpy as np
import pytest

from xoptlab.adversarial import mc_abs_uniform_gap
from xoptlab.cli import main
from xoptlab.experiment import ExperimentConfig, Mode, records_to_csv, run_experiment
from xoptlab.generators import (
    Rect,
    gen_counterexample,
    gen_uniform,
    is_nice,
    nearest_length_type,
    read_instance,
    tour_type_profile,
)
from xoptlab.oracle import _scored, optimal_tour_exact, shortest_tour_enumerated
from xoptlab.search import random_tour, run_xopt
from xoptlab.tour import Tour, count_crossings_brute, read_tour


def test_criterion_1_worstcase_ratio(tmp_path, capsys, acceptance_line):
    t0 = time.perf_counter()
    out = tmp_path / "w.txt"
    code = main(["gen", "--kind", "worstcase", "--n", "1000", "--eps", "0.01", "--out", str(out)])
    capsys.readouterr()
    inst = read_instance(out)
    bad = Tour.from_order(inst, read_tour(f"{out}.bad.tour"))
    good = Tour.from_order(inst, read_tour(f"{out}.good.tour"))
    crossings = count_crossings_brute(inst, bad)
    ratio = bad.length / good.length
    elapsed = time.perf_counter() - t0
    ok = code == 0 and crossings == 0 and ratio >= 495 and elapsed < 5
    acceptance_line(1, ok, f"worst case n=1000 eps=0.01: ratio={ratio:.3f} (>= 495), bad-tour crossings={crossings}, {elapsed:.2f}s (< 5s)")
    assert ok


def _noncrossing_max_below_T(L: float) -> tuple[bool, float, float, np.ndarray, int]:
    b = gen_counterexample(L, min_L=2)
    orders, lengths, crossings = _scored(b.instance)
    nc = np.flatnonzero(crossings == 0)
    best = nc[np.argmax(lengths[nc])]
    return bool(lengths[best] < b.length_T), float(lengths[best]), b.length_T, orders[best], len(orders)


def test_criterion_2_counterexample_exhaustive(acceptance_line):
    t0 = time.perf_counter()
    L = 100.0
    below, best, t_len, order, count = _noncrossing_max_below_T(L)
    b = gen_counterexample(L)
    profile = tour_type_profile(b, order)
    labels = "xabcuvw"
    by_length = {}
    for i, p in enumerate(order):
        q = order[(i + 1) % len(order)]
        t = nearest_length_type(float(np.linalg.norm(b.instance.coords[p] - b.instance.coords[q])), L)
        by_length[t] = by_length.get(t, 0) + 1
    holds = {Lc: _noncrossing_max_below_T(float(Lc))[0] for Lc in range(10, 201)}
    l0 = min(Lc for Lc, ok in holds.items() if ok)
    from_l0_on = all(holds[Lc] for Lc in range(l0, 201))
    elapsed = time.perf_counter() - t0
    ok = count == 360 and below and profile == {1: 1, 3: 2, 4: 3, 5: 1} and elapsed < 1
    acceptance_line(
        2,
        ok,
        f"L=100: {count} tours, longest noncrossing {best:.4f} < l(T) {t_len:.4f}; maximizer "
        f"{''.join(labels[v] for v in order)} role profile {dict(sorted(profile.items()))} "
        f"(nearest-nominal-length profile {dict(sorted(by_length.items()))}); smallest L in 10..200: {l0} "
        f"(holds for every L >= {l0}: {from_l0_on}); {elapsed:.2f}s (< 1s)",
    )
    assert ok


def test_criterion_3_xopt_contract(acceptance_line):
    t0 = time.perf_counter()
    failures = []
    runs = 0
    for n in (50, 100, 200):
        for seed in range(100):
            inst = gen_uniform(n, seed)
            rep = run_xopt(inst, random_tour(n, 10_000 + seed, inst))
            trace = np.concatenate([[rep.initial_length], rep.length_trace])
            runs += 1
            if not (
                rep.iterations < n**3
                and count_crossings_brute(inst, rep.final_tour) == 0
                and np.all(np.diff(trace) < 0)
            ):
                failures.append((n, seed))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    acceptance_line(3, ok, f"{runs} X-opt runs, {len(failures)} contract violations, {elapsed:.1f}s (< 120s)")
    assert ok


def test_criterion_4_small_n_optimality(acceptance_line):
    t0 = time.perf_counter()
    ratios = []
    hk_equal = True
    for seed in range(50):
        inst = gen_uniform(8, seed)
        _, opt = optimal_tour_exact(inst)
        _, enum_min = shortest_tour_enumerated(inst)
        hk_equal &= opt == enum_min
        rep = run_xopt(inst, random_tour(8, 500 + seed, inst))
        # sum along the canonical order, as the optimum is, so equal cycles give equal floats
        final = Tour.from_order(inst, rep.final_tour.canonical()).length
        ratios.append(final / opt)
    elapsed = time.perf_counter() - t0
    ok = hk_equal and min(ratios) >= 1.0 and max(ratios) <= 4.0 and elapsed < 60
    acceptance_line(
        4,
        ok,
        f"n=8, 50 seeds: X-opt/opt in [{min(ratios):.4f}, {max(ratios):.4f}] (>= 1, <= 4), "
        f"Held-Karp == enumeration: {hk_equal}, {elapsed:.1f}s (< 60s)",
    )
    assert ok


def test_criterion_5_adversarial_growth(acceptance_line):
    t0 = time.perf_counter()
    ns = (5000, 10000, 20000, 40000)
    res = run_experiment(ExperimentConfig(n_values=ns, master_seed=5, samples_per_n=30, mode=Mode.ADVERSARIAL_GROWTH))
    x = np.array(ns, dtype=float)
    y = np.array([res.summary_for(n).mean_length for n in ns])
    beta = float(x @ y / (x @ x))  # least squares through the origin
    r2 = 1 - float(np.sum((y - beta * x) ** 2) / np.sum((y - y.mean()) ** 2))
    proxy = {n: res.summary_for(n).mean for n in ns}
    growth = proxy[40000] / proxy[5000]
    invalid = sum(row.invalid for row in res.summary)
    elapsed = time.perf_counter() - t0
    ok = beta > 0 and r2 > 0.99 and growth >= 2 and elapsed < 600
    acceptance_line(
        5,
        ok,
        f"length = {beta:.5f} n, R^2={r2:.5f} (> 0.99); length/sqrt(n) {proxy[5000]:.3f} -> {proxy[40000]:.3f}, "
        f"x{growth:.3f} (>= 2); invalid constructions {invalid}/{len(res.records)}; {elapsed:.1f}s (< 600s)",
    )
    assert ok


def test_criterion_6_desk_scale_replication(acceptance_line):
    t0 = time.perf_counter()
    base = dict(n_values=(100, 200, 500, 1000), master_seed=12345, samples_per_n=100)
    first = run_experiment(ExperimentConfig(**base))
    csvs = [records_to_csv(first.records)]
    for workers in (1, 4):
        csvs.append(records_to_csv(run_experiment(ExperimentConfig(**base, workers=workers)).records))
    identical = all(c == csvs[0] for c in csvs)
    means = {row.n: row.mean for row in first.summary}
    variation = abs(means[1000] - means[100]) / means[100]
    spread = (max(means.values()) - min(means.values())) / min(means.values())
    all_ok = all(r.final_crossings == 0 for r in first.records) and all(
        math.isfinite(m) and m > 0 for m in means.values()
    )
    elapsed = time.perf_counter() - t0
    ok = variation < 0.25 and identical and all_ok and elapsed < 600
    shown = ", ".join(f"{n}: {m:.4f}" for n, m in means.items())
    acceptance_line(
        6,
        ok,
        f"mean length/sqrt(n) {{{shown}}}; change 100->1000 {variation:.2%} (< 25%), max spread {spread:.2%}; "
        f"CSV identical over reruns and workers 1/1/4: {identical}; {elapsed:.1f}s (< 600s)",
    )
    assert ok


def test_criterion_7_monte_carlo_checks(acceptance_line):
    t0 = time.perf_counter()
    mean, se = mc_abs_uniform_gap(0.0, 1.0, 1_000_000, seed=77)
    gap_ok = abs(mean - 1 / 3) <= 3 * se
    rng = np.random.default_rng(78)
    trials, n = 100_000, 31
    unit = Rect(0.0, 0.0, 1.0, 1.0)
    pts = rng.random((trials, n, 2))
    not_nice = sum(not is_nice(p, unit) for p in pts)
    freq = not_nice / trials
    p = 6 / n
    bound = p + 3 * math.sqrt(p * (1 - p) / trials)
    elapsed = time.perf_counter() - t0
    ok = gap_ok and freq <= bound and elapsed < 30
    acceptance_line(
        7,
        ok,
        f"E|X-Y| = {mean:.6f} +- {se:.2e} vs 1/3 ({abs(mean - 1 / 3) / se:.2f} se, <= 3); "
        f"non-nice frequency {freq:.5f} <= {bound:.5f}; {elapsed:.1f}s (< 30s)",
    )
    assert ok
