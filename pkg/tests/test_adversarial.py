import itertools
import math

import numpy as np
import pytest

from xoptlab.adversarial import (
    BudgetExhausted,
    CollinearityError,
    FailureReason,
    PathState,
    build_region_partition,
    construct_long_tour,
    expected_abs_uniform_gap,
    mc_abs_uniform_gap,
    path_crossings,
    path_length,
    uncross_path,
)
from xoptlab.generators import gen_uniform
from xoptlab.tour import Instance, count_crossings_brute

# ---------------------------------------------------------------- uncross_path


def test_uncross_two_point_path():
    inst = Instance.from_points([(0, 0), (1, 1), (2, 0)])
    res = uncross_path(inst, [0, 2])
    assert res.vertices == (0, 2) and res.exchanges == 0


def test_uncross_convex_four_points_matches_enumeration():
    inst = Instance.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
    # endpoints 0 and 3 share the left side; the zig-zag 0-2-1-3 crosses itself
    paths = [(0, *mid, 3) for mid in itertools.permutations((1, 2))]
    noncrossing = [p for p in paths if path_crossings(inst, p) == 0]
    assert noncrossing == [(0, 1, 2, 3)]
    assert path_crossings(inst, (0, 2, 1, 3)) == 1
    res = uncross_path(inst, (0, 2, 1, 3))
    assert res.vertices == (0, 1, 2, 3) and res.exchanges == 1


def test_uncross_random_strips():
    rng = np.random.default_rng(11)
    for trial in range(1000):
        pts = np.column_stack([rng.uniform(0.3, 0.31, 50), rng.uniform(0.1, 1.0, 50)])
        inst = Instance(pts)
        first, last = int(np.argmin(pts[:, 0])), int(np.argmax(pts[:, 0]))
        mid = [int(v) for v in rng.permutation(50) if v not in (first, last)]
        start = [first, *mid, last]
        res = uncross_path(inst, start)
        assert path_crossings(inst, res) == 0
        assert res.first == first and res.last == last
        assert sorted(res.vertices) == list(range(50))
        assert path_length(inst, res) <= path_length(inst, start) + 1e-12


def test_uncross_budget_and_collinear_errors():
    rng = np.random.default_rng(0)
    inst = gen_uniform(40, 1)
    start = [int(v) for v in rng.permutation(40)]
    with pytest.raises(BudgetExhausted):
        uncross_path(inst, start, budget=1)
    line = Instance.from_points([(0, 0), (2, 0), (1, 0), (3, 0)])
    with pytest.raises(CollinearityError):
        uncross_path(line, [0, 1, 2, 3])


def test_path_state_endpoints():
    p = PathState((4, 2, 7), 0)
    assert p.first == 4 and p.last == 7


# ---------------------------------------------------------------- build_region_partition


def test_partition_example():
    part = build_region_partition(100, 10, 0.1)
    assert part.k == 10
    assert part.strip_width == pytest.approx(0.08)
    assert part.strips[0].x0 == pytest.approx(0.1) and part.strips[-1].x1 == pytest.approx(0.9)
    assert all(s.y0 == pytest.approx(0.1) and s.y1 == 1.0 for s in part.strips)
    c3 = part.regions[3]
    assert (c3.x0, c3.y0, c3.x1, c3.y1) == pytest.approx((0.1, 0.0, 0.9, 0.1))


def test_partition_tiles_unit_square():
    for n, alpha, c in [(100, 10, 0.1), (12345, 7, 0.2), (50, 50, 0.05)]:
        part = build_region_partition(n, alpha, c)
        assert sum(r.area for r in part.regions.values()) == pytest.approx(1.0)
        assert sum(s.area for s in part.strips) == pytest.approx(part.regions[6].area)
        pts = gen_uniform(5000, n).coords
        region = part.region_of(pts)
        assert set(np.unique(region)) <= set(range(1, 7))
        for r, rect in part.regions.items():
            assert np.all(rect.contains(pts[region == r]))
        strips = part.strip_of(pts[region == 6])
        assert strips.min() >= 0 and strips.max() < part.k


@pytest.mark.parametrize("n, alpha, c", [(100, 10, 0.0), (100, 10, 0.5), (100, 0.5, 0.1), (5, 10, 0.1)])
def test_partition_validation(n, alpha, c):
    with pytest.raises(ValueError):
        build_region_partition(n, alpha, c)


# ---------------------------------------------------------------- construct_long_tour


def test_construct_n10000_seed1():
    inst = gen_uniform(10_000, 1)
    res = construct_long_tour(inst, 10, 0.1)
    assert res.valid and res.failure_reason is None
    assert sorted(res.tour.order.tolist()) == list(range(10_000))
    assert count_crossings_brute(inst, res.tour) == 0
    assert res.length == pytest.approx(res.tour.length)
    assert len(res.strip_path_lengths) == 1000


def test_construct_small_instances_report_flags():
    # n = 20 leaves corner regions nearly empty; the result must still be well formed
    res = construct_long_tour(gen_uniform(20, 3), alpha=10, c=0.1)
    assert sorted(res.tour.order.tolist()) == list(range(20))
    assert FailureReason.UNDER_POPULATED_REGION in res.flags
    if not res.valid:
        assert res.failure_reason is not None


def test_construct_rejects_points_outside_unit_square():
    with pytest.raises(ValueError):
        construct_long_tour(Instance.from_points([(0, 0), (2, 0), (0, 1)] + [(i / 50, 0.5) for i in range(1, 30)]))


def test_mean_strip_path_length():
    lengths = []
    for seed in range(5):
        res = construct_long_tour(gen_uniform(10_000, seed))
        lengths += [x for x in res.strip_path_lengths if x > 0]
    assert np.mean(lengths) >= (1 - 0.1) / 3


def test_invalid_construction_frequency():
    results = [construct_long_tour(gen_uniform(10_000, seed)) for seed in range(200)]
    invalid = [r for r in results if not r.valid]
    flagged = [r for r in results if r.flags]
    print(f"\ninvalid constructions: {len(invalid)}/200, flagged: {len(flagged)}/200")
    # every failure is explained by a violated precondition
    assert all(r.flags and r.failure_reason in r.flags for r in invalid)
    assert len(invalid) / 200 <= 0.05


# ---------------------------------------------------------------- E|X - Y|


def test_expected_abs_uniform_gap_examples():
    assert expected_abs_uniform_gap(0, 1) == pytest.approx(1 / 3)
    assert expected_abs_uniform_gap(0.1, 1) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        expected_abs_uniform_gap(1, 1)


def test_mc_abs_uniform_gap():
    mean, se = mc_abs_uniform_gap(0, 1, 1_000_000, seed=5)
    assert se == pytest.approx(math.sqrt(1 / 18 / 1_000_000), rel=0.02)
    assert abs(mean - 1 / 3) < 3 * se
    mean, se = mc_abs_uniform_gap(0.1, 1, 200_000, seed=6)
    assert abs(mean - 0.3) < 3 * se
