"""Batch experiments: sampling, CSV records, per-n statistics and plots."""
from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .adversarial import construct_long_tour
from .generators import gen_uniform
from .oracle import optimal_tour_exact
from .search import Heuristic, SearchConfig, random_tour, run_search
from .tour import count_crossings

log = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "sample_seed", "initial_length", "final_length", "iterations", "ratio_proxy", "wall_time_ms")


class Mode(str, enum.Enum):
    XOPT_RATIO = "XOptRatio"
    ADVERSARIAL_GROWTH = "AdversarialGrowth"
    TWOOPT_COMPARISON = "TwoOptComparison"


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...]
    master_seed: int
    samples_per_n: int = 100
    mode: Mode = Mode.XOPT_RATIO
    output_path: str | None = None
    workers: int = 1
    # wall_time_ms is written as 0 unless timing is on, keeping CSVs reproducible
    timing: bool = False
    alpha: float = 10.0
    c: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if any(n < 3 for n in self.n_values):
            raise ValueError("every n must be >= 3")
        if self.samples_per_n < 1:
            raise ValueError("samples_per_n must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> ExperimentConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    sample_index: int
    sample_seed: int
    initial_length: float
    final_length: float
    iterations: int
    ratio_proxy: float
    wall_time_ms: float
    final_crossings: int = 0
    valid: bool = True

    def csv_row(self) -> list[str]:
        return [
            str(self.n),
            str(self.sample_seed),
            _fmt(self.initial_length),
            _fmt(self.final_length),
            str(self.iterations),
            _fmt(self.ratio_proxy),
            _fmt(self.wall_time_ms),
        ]


@dataclass(frozen=True)
class SummaryRow:
    n: int
    count: int
    mean: float
    sd: float
    se: float
    mean_length: float
    invalid: int = 0


@dataclass
class ExperimentResult:
    records: list[ExperimentRecord]
    summary: list[SummaryRow] = field(default_factory=list)

    def summary_for(self, n: int) -> SummaryRow:
        return next(row for row in self.summary if row.n == n)


def _fmt(v: float) -> str:
    return format(float(v), ".9g")


def derive_seed(*keys: int) -> int:
    """64-bit child seed mixed from the keys (numpy SeedSequence hashing)."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, dtype=np.uint64)[0])


def run_sample(cfg: ExperimentConfig, n: int, index: int) -> ExperimentRecord:
    seed = derive_seed(cfg.master_seed, n, index)
    inst = gen_uniform(n, seed)
    t0 = time.perf_counter()
    crossings = 0
    valid = True
    if cfg.mode is Mode.ADVERSARIAL_GROWTH:
        res = construct_long_tour(inst, cfg.alpha, cfg.c)
        initial, final, iterations, valid = res.initial_length, res.length, res.exchanges, res.valid
        crossings = 0 if res.valid else count_crossings(inst, res.tour)
    else:
        heuristic = Heuristic.XOPT if cfg.mode is Mode.XOPT_RATIO else Heuristic.TWOOPT
        start = random_tour(n, derive_seed(seed, 1), inst)
        rep = run_search(inst, start, SearchConfig(heuristic, record_trace=False))
        initial, final, iterations = rep.initial_length, rep.final_length, rep.iterations
        crossings = count_crossings(inst, rep.final_tour)
    elapsed = (time.perf_counter() - t0) * 1000 if cfg.timing else 0.0
    return ExperimentRecord(
        n=n,
        sample_index=index,
        sample_seed=seed,
        initial_length=initial,
        final_length=final,
        iterations=int(iterations),
        ratio_proxy=final / math.sqrt(n),
        wall_time_ms=elapsed,
        final_crossings=int(crossings),
        valid=bool(valid),
    )


def _run_task(args):
    return run_sample(*args)


def summarize(records: Sequence[ExperimentRecord]) -> list[SummaryRow]:
    if not records:
        raise ValueError("cannot summarize an empty record set")
    rows = []
    for n in sorted({r.n for r in records}):
        group = [r for r in records if r.n == n]
        ratios = np.array([r.ratio_proxy for r in group])
        sd = float(ratios.std(ddof=1)) if len(ratios) > 1 else 0.0
        rows.append(
            SummaryRow(
                n=n,
                count=len(group),
                mean=float(ratios.mean()),
                sd=sd,
                se=sd / math.sqrt(len(group)),
                mean_length=float(np.mean([r.final_length for r in group])),
                invalid=sum(not r.valid for r in group),
            )
        )
    return rows


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every (n, sample index) task and aggregate per n.

    Records are sorted by (n, sample index), so output does not depend on
    the worker count or completion order.
    """
    tasks = [(cfg, n, i) for n in cfg.n_values for i in range(cfg.samples_per_n)]
    log.info("running %d samples in mode %s with %d worker(s)", len(tasks), cfg.mode.value, cfg.workers)
    if cfg.workers == 1:
        records = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    records.sort(key=lambda r: (r.n, r.sample_index))
    result = ExperimentResult(records, summarize(records))
    if cfg.output_path:
        write_csv(cfg.output_path, records)
    invalid = sum(row.invalid for row in result.summary)
    if invalid:
        log.warning("%d of %d samples produced an invalid construction", invalid, len(records))
    return result


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def write_csv(path: str | Path, records: Sequence[ExperimentRecord]) -> None:
    Path(path).write_bytes(records_to_csv(records).encode("ascii"))


def read_csv(path: str | Path) -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: header must be {','.join(CSV_COLUMNS)}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        try:
            n, seed, init, final, iters, ratio, wall = row
            rec = ExperimentRecord(
                n=int(n),
                sample_index=lineno - 2,
                sample_seed=int(seed),
                initial_length=float(init),
                final_length=float(final),
                iterations=int(iters),
                ratio_proxy=float(ratio),
                wall_time_ms=float(wall),
            )
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        if not (math.isfinite(rec.ratio_proxy) and rec.ratio_proxy > 0):
            raise ValueError(f"{path}:{lineno}: ratio_proxy must be positive")
        records.append(rec)
    return records


def summarize_csv(path: str | Path) -> list[SummaryRow]:
    return summarize(read_csv(path))


def summary_table(summary: Sequence[SummaryRow]) -> str:
    lines = ["n,count,mean_ratio_proxy,sd,se,mean_length,invalid"]
    for row in summary:
        lines.append(
            f"{row.n},{row.count},{_fmt(row.mean)},{_fmt(row.sd)},{_fmt(row.se)},{_fmt(row.mean_length)},{row.invalid}"
        )
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# plotting


def plot_limits(summary: Sequence[SummaryRow], margin: float = 0.05) -> tuple[tuple[float, float], tuple[float, float]]:
    """Axis ranges covering every point and error bar plus a relative margin."""
    if not summary:
        raise ValueError("cannot plot an empty summary")
    ns = np.array([row.n for row in summary], dtype=float)
    lo = np.array([row.mean - row.se for row in summary])
    hi = np.array([row.mean + row.se for row in summary])
    xspan = max(ns.max() - ns.min(), 1.0)
    yspan = max(hi.max() - lo.min(), 1e-3 * max(abs(hi.max()), 1.0))
    return (
        (float(ns.min() - margin * xspan), float(ns.max() + margin * xspan)),
        (float(lo.min() - margin * yspan), float(hi.max() + margin * yspan)),
    )


def render_plot(summary: Sequence[SummaryRow], path: str | Path, title: str = "X-opt average-case tour length") -> None:
    """Mean length / sqrt(n) against n with standard-error bars, as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xlim, ylim = plot_limits(summary)
    with matplotlib.rc_context({"svg.hashsalt": "xoptlab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.errorbar(
            [row.n for row in summary],
            [row.mean for row in summary],
            yerr=[row.se for row in summary],
            marker="o",
            capsize=3,
        )
        ax.set_xlim(*xlim)
        ax.set_ylim(*ylim)
        ax.set_xlabel("n")
        ax.set_ylabel("mean tour length / sqrt(n)")
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# --------------------------------------------------------------------------
# small-n checks against the exact optimum


def exact_ratios(n: int, samples: int, master_seed: int) -> list[dict]:
    """X-opt final length over the Held-Karp optimum on uniform instances."""
    out = []
    for i in range(samples):
        seed = derive_seed(master_seed, n, i)
        inst = gen_uniform(n, seed)
        rep = run_search(inst, random_tour(n, derive_seed(seed, 1), inst), SearchConfig(Heuristic.XOPT))
        _, opt = optimal_tour_exact(inst)
        out.append({"seed": seed, "xopt": rep.final_length, "optimum": opt, "ratio": rep.final_length / opt})
    return out


def config_as_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["mode"] = cfg.mode.value
    d["n_values"] = list(cfg.n_values)
    return d
