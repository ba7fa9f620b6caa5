"""Instance factories and the instance text format."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .geometry import orient_sign
from .tour import Instance, Tour, count_crossings, cycle_length

EPS_MAX = 0.3
COUNTEREXAMPLE_LABELS = ("x", "a", "b", "c", "u", "v", "w")
# smallest integer scale from which on every noncrossing 7-point tour is
# shorter than T (exhaustive enumeration, L = 2..200; L = 10 still fails)
COUNTEREXAMPLE_L_MIN = 11.0


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= self.x0) & (pts[:, 0] <= self.x1) & (pts[:, 1] >= self.y0) & (pts[:, 1] <= self.y1)
        )


@dataclass(frozen=True)
class WorstCaseBundle:
    instance: Instance
    bad_tour: Tour
    good_tour: Tour
    epsilon: float
    n: int

    @property
    def ratio(self) -> float:
        return self.bad_tour.length / self.good_tour.length


@dataclass(frozen=True)
class CounterexampleBundle:
    instance: Instance
    tour_T: tuple[int, ...]  # cycle over the six points other than x
    scale_L: float

    def index(self, label: str) -> int:
        return COUNTEREXAMPLE_LABELS.index(label)

    @property
    def length_T(self) -> float:
        return cycle_length(self.instance, self.tour_T)


def gen_uniform(n: int, seed: int) -> Instance:
    """n i.i.d. uniform points in the unit square."""
    if n < 3:
        raise ValueError(f"gen_uniform needs n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    while True:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == n:
            break
        dup = np.setdiff1d(np.arange(n), first)
        pts[dup] = rng.random((len(dup), 2))
    return Instance(pts, {"kind": "uniform", "n": n, "seed": int(seed)})


def _worstcase_points(n: int, eps: float):
    k = n // 2
    s = np.zeros((1, 2))
    t = np.linspace(0.0, 1.0, k)[:, None]
    y = np.array([1 - eps / 2, 1.0]) + t * np.array([eps / 2, -eps / 2])
    # chord of the cone spanned by y_1, y_k on the line x + y = eps/2, i.e. at
    # height eps/sqrt(8) along the cone axis; interior points only
    p1 = y[0] * (eps / 2) / y[0].sum()
    p2 = y[-1] * (eps / 2) / y[-1].sum()
    u = (np.arange(1, k) / k)[:, None]
    x = p1 + u * (p2 - p1)
    return s, y, x


def gen_worstcase(n: int, epsilon: float) -> WorstCaseBundle:
    """Even-n instance with a noncrossing tour about n/2 times the optimum.

    Index layout: 0 is s, 1..k are y_1..y_k, k+1..2k-1 are x_1..x_{k-1}.
    """
    if n % 2 or n < 4:
        raise ValueError(f"gen_worstcase needs an even n >= 4, got {n}")
    if not (0.0 < epsilon < EPS_MAX):
        raise ValueError(f"epsilon must lie in (0, {EPS_MAX}), got {epsilon}")
    k = n // 2
    s, y, x = _worstcase_points(n, epsilon)
    inst = Instance(np.vstack([s, y, x]), {"kind": "worstcase", "n": n, "eps": epsilon})
    yi = lambda i: i  # noqa: E731 -- 1-based y index
    xi = lambda i: k + i  # noqa: E731 -- 1-based x index

    bad = [0, yi(1)]
    for i in range(1, k):
        bad += [xi(i), yi(i + 1)]
    # s -> left half of the x-chain -> y_1 ... y_k -> right half of the x-chain -> s
    mid = max(1, (k - 1) // 2)
    good = [0] + [xi(i) for i in range(1, mid + 1)] + [yi(i) for i in range(1, k + 1)]
    good += [xi(i) for i in range(mid + 1, k)]

    bundle = WorstCaseBundle(inst, Tour.from_order(inst, bad), Tour.from_order(inst, good), epsilon, n)
    _check_worstcase(bundle)
    return bundle


def _check_worstcase(b: WorstCaseBundle) -> None:
    eps, n = b.epsilon, b.n
    if not np.all((b.instance.coords >= 0) & (b.instance.coords <= 1)):
        raise AssertionError("worst-case points left the unit square")
    if count_crossings(b.instance, b.bad_tour) != 0:
        raise AssertionError("worst-case bad tour is crossing")
    if b.bad_tour.length < math.sqrt(2) * n * (1 - eps / 2):
        raise AssertionError("worst-case bad tour is shorter than its lower bound")
    if b.good_tour.length > 2 * math.sqrt(2) * (1 + eps / 2):
        raise AssertionError("worst-case good tour exceeds its upper bound")


def _rotate(v: np.ndarray, theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def gen_counterexample(L: float, min_L: float = COUNTEREXAMPLE_L_MIN) -> CounterexampleBundle:
    """Seven points x, a, b, c, u, v, w and the 6-point tour T = a v c u b w.

    a, b, c form a unit equilateral triangle centred on x; each far point sits
    at distance L from one near point, along the next triangle side turned
    clockwise by 1/L so that it lands outside the triangle.
    """
    if not L >= min_L:
        raise ValueError(f"L must be >= {min_L}, got {L}")
    r = 1 / math.sqrt(3)
    ang = np.radians([90.0, 210.0, 330.0])
    a, b, c = (np.array([r * math.cos(t), r * math.sin(t)]) for t in ang)

    def far(p, q):
        d = (q - p) / np.linalg.norm(q - p)
        return p + L * _rotate(d, -1.0 / L)

    u, v, w = far(b, c), far(c, a), far(a, b)
    x = np.zeros(2)
    inst = Instance(np.vstack([x, a, b, c, u, v, w]), {"kind": "counterexample", "L": L})
    tour_T = tuple(COUNTEREXAMPLE_LABELS.index(ch) for ch in "avcubw")
    # the centre must lie strictly inside triangle u v w
    signs = {
        int(orient_sign(p[0], p[1], q[0], q[1], 0.0, 0.0)) for p, q in ((u, v), (v, w), (w, u))
    }
    if len(signs) != 1 or 0 in signs:
        raise AssertionError("far points do not surround the centre")
    if count_crossings(inst, tour_T) != 0:
        raise AssertionError("tour T is crossing")
    return CounterexampleBundle(inst, tour_T, float(L))


# far point attached to each near point at distance exactly L
_ANCHOR = {"a": "w", "b": "u", "c": "v"}
# far point at distance about L - 1 from each near point
_NEXT_FAR = {"a": "v", "b": "w", "c": "u"}


def counterexample_type_lengths(L: float, exact_limits: bool = True) -> dict[int, float]:
    """Length of each edge type of the 7-point counterexample, up to O(1/L).

    With ``exact_limits`` the centre-to-far and far-to-far lengths are the
    true limits of this construction, L - 1/2 and sqrt(3) (L - 1/2). Without
    it they are the nominal values L - 1/(4 sqrt 3) and sqrt(3) L.
    """
    return {
        1: 1 / math.sqrt(3),
        2: 1.0,
        3: L - 1,
        4: L - 0.5,
        5: L - 0.5 if exact_limits else L - 1 / (4 * math.sqrt(3)),
        6: L,
        7: math.sqrt(3) * (L - 0.5) if exact_limits else math.sqrt(3) * L,
    }


def edge_type(p: str, q: str) -> int:
    """Type (1..7) of the counterexample edge between two labelled points."""
    if p == q or p not in COUNTEREXAMPLE_LABELS or q not in COUNTEREXAMPLE_LABELS:
        raise ValueError(f"not a counterexample edge: {p}{q}")
    near, far = set("abc"), set("uvw")
    if "x" in (p, q):
        other = q if p == "x" else p
        return 1 if other in near else 5
    if p in near and q in near:
        return 2
    if p in far and q in far:
        return 7
    n, f = (p, q) if p in near else (q, p)
    if _ANCHOR[n] == f:
        return 6
    if _NEXT_FAR[n] == f:
        return 3
    return 4


def nearest_length_type(length: float, L: float) -> int:
    """Type whose nominal length is closest to ``length``."""
    table = counterexample_type_lengths(L, exact_limits=False)
    return min(table, key=lambda t: abs(table[t] - length))


def tour_type_profile(bundle: CounterexampleBundle, order) -> dict[int, int]:
    labels = [COUNTEREXAMPLE_LABELS[int(i)] for i in order]
    profile: dict[int, int] = {}
    for i, p in enumerate(labels):
        t = edge_type(p, labels[(i + 1) % len(labels)])
        profile[t] = profile.get(t, 0) + 1
    return dict(sorted(profile.items()))


def is_nice(points: np.ndarray, rect: Rect) -> bool:
    """Whether the closest points to the four sides of rect are pairwise distinct.

    Ties go to the lowest point index.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("is_nice needs a nonempty point set")
    if not np.all(rect.contains(pts)):
        raise ValueError("points must lie inside the rectangle")
    minimizers = {
        int(np.argmin(pts[:, 1] - rect.y0)),
        int(np.argmin(rect.y1 - pts[:, 1])),
        int(np.argmin(pts[:, 0] - rect.x0)),
        int(np.argmin(rect.x1 - pts[:, 0])),
    }
    return len(minimizers) == 4


# --------------------------------------------------------------------------
# instance text format: '# key=value' header lines, then n, then n lines "x y"


def _fmt_meta(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def write_instance(path: str | Path, inst: Instance) -> None:
    lines = [f"# {k}={_fmt_meta(v)}" for k, v in inst.meta.items()]
    lines.append(str(inst.n))
    lines += [f"{x!r} {y!r}" for x, y in inst.coords.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_meta(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def read_instance(path: str | Path) -> Instance:
    meta = {}
    body = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = _parse_meta(value.strip())
        elif line.strip():
            body.append(line)
    if not body:
        raise ValueError(f"{path}: empty instance file")
    try:
        n = int(body[0])
        coords = [tuple(float(tok) for tok in line.split()) for line in body[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: malformed instance file ({exc})") from None
    if len(coords) != n or any(len(c) != 2 for c in coords):
        raise ValueError(f"{path}: expected {n} lines of 'x y'")
    return Instance(np.array(coords).reshape(-1, 2), meta)


def sub_instance(inst: Instance, indices: Sequence[int]) -> Instance:
    return Instance(inst.coords[list(indices)], dict(inst.meta))
