"""Command-line entry point: ``xoptlab <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import experiment as exp
from .adversarial import construct_long_tour
from .generators import (
    gen_counterexample,
    gen_uniform,
    gen_worstcase,
    read_instance,
    write_instance,
)
from .oracle import longest_noncrossing_tour, optimal_tour_exact, tour_extremes
from .search import Heuristic, SearchConfig, identity_tour, random_tour, run_search
from .tour import Tour, count_crossings, cycle_length, read_tour, write_tour

log = logging.getLogger("xoptlab")


class CliError(Exception):
    pass


def _require_seed(args) -> int:
    if args.seed is None:
        raise CliError("--seed is required (no implicit randomness)")
    return args.seed


def _sidecar(out: Path, name: str) -> Path:
    return out.with_name(f"{out.name}.{name}.tour")


def cmd_gen(args) -> None:
    if args.kind == "uniform":
        if args.n is None:
            raise CliError("--n is required for uniform instances")
        inst = gen_uniform(args.n, _require_seed(args))
        tours = {}
    elif args.kind == "worstcase":
        if args.n is None or args.eps is None:
            raise CliError("--n and --eps are required for worstcase instances")
        bundle = gen_worstcase(args.n, args.eps)
        inst = bundle.instance
        tours = {"bad": bundle.bad_tour.order, "good": bundle.good_tour.order}
        print(f"bad_length={bundle.bad_tour.length!r} good_length={bundle.good_tour.length!r} ratio={bundle.ratio!r}")
    else:
        if args.bigl is None:
            raise CliError("--bigl is required for counterexample instances")
        bundle = gen_counterexample(args.bigl)
        inst = bundle.instance
        tours = {"T": bundle.tour_T}
        print(f"T_length={bundle.length_T!r}")
    if args.out is None:
        raise CliError("--out is required")
    out = Path(args.out)
    write_instance(out, inst)
    print(f"wrote {out}")
    for name, order in tours.items():
        write_tour(_sidecar(out, name), order)
        print(f"wrote {_sidecar(out, name)}")


def cmd_solve(args) -> None:
    inst = read_instance(args.instance)
    if args.tour:
        start = Tour.from_order(inst, read_tour(args.tour))
    elif args.start == "identity":
        start = identity_tour(inst)
    else:
        start = random_tour(inst.n, _require_seed(args), inst)
    cfg = SearchConfig(Heuristic(args.heuristic), args.max_iters, args.seed or 0, record_trace=False)
    rep = run_search(inst, start, cfg)
    crossings = count_crossings(inst, rep.final_tour)
    print(
        f"{args.heuristic}: {rep.iterations} iterations, length {rep.initial_length!r} -> "
        f"{rep.final_length!r}, crossings={crossings}"
    )
    if args.tour_out:
        write_tour(args.tour_out, rep.final_tour.order)


def cmd_construct(args) -> None:
    inst = gen_uniform(args.n, _require_seed(args))
    res = construct_long_tour(inst, args.alpha, args.c)
    flags = ",".join(f.value for f in res.flags) or "none"
    reason = res.failure_reason.value if res.failure_reason else "none"
    print(f"length={res.length!r} valid={res.valid} failure={reason} flags={flags} exchanges={res.exchanges}")
    if args.tour_out:
        write_tour(args.tour_out, res.tour.order)


def cmd_verify(args) -> None:
    inst = read_instance(args.instance)
    order = read_tour(args.tour)
    print(f"length={cycle_length(inst, order)!r} crossings={count_crossings(inst, order)}")


def cmd_oracle(args) -> None:
    inst = read_instance(args.instance)
    if args.mode == "optimal":
        tour, length = optimal_tour_exact(inst)
    elif args.mode == "longest-noncrossing":
        tour, length = longest_noncrossing_tour(inst)
    else:
        ext = tour_extremes(inst)
        print(" ".join(f"{k}={v!r}" for k, v in ext.items()))
        return
    print(f"length={length!r} tour={' '.join(map(str, tour.order))}")
    if args.tour_out:
        write_tour(args.tour_out, tour.order)


def cmd_experiment(args) -> None:
    cfg = exp.ExperimentConfig.from_json(args.config)
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output_path"] = args.out
    if overrides:
        cfg = exp.ExperimentConfig.from_dict({**exp.config_as_dict(cfg), **overrides})
    result = exp.run_experiment(cfg)
    sys.stdout.write(exp.summary_table(result.summary))


def cmd_plot(args) -> None:
    summary = exp.summarize_csv(args.csv)
    exp.render_plot(summary, args.out)
    print(f"wrote {args.out}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xoptlab", description="X-opt local-search laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--kind", choices=["uniform", "worstcase", "counterexample"], required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--bigl", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run X-opt or 2-opt on an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--heuristic", choices=[h.value for h in Heuristic], default="xopt")
    s.add_argument("--start", choices=["random", "identity"], default="random")
    s.add_argument("--tour", help="start from this tour file instead")
    s.add_argument("--seed", type=int)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--tour-out")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("construct", help="strip construction on a uniform instance")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--alpha", type=float, default=10.0)
    c.add_argument("--c", type=float, default=0.1)
    c.add_argument("--seed", type=int)
    c.add_argument("--tour-out")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="length and crossing count of a tour")
    v.add_argument("--instance", required=True)
    v.add_argument("--tour", required=True)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force ground truth (small n)")
    o.add_argument("--instance", required=True)
    o.add_argument("--mode", choices=["optimal", "enumerate", "longest-noncrossing"], required=True)
    o.add_argument("--tour-out")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", help="batch experiment from a JSON config")
    e.add_argument("--config", required=True)
    e.add_argument("--workers", type=int)
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    pl = sub.add_parser("plot", help="render an SVG from an experiment CSV")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("XOPTLAB_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, OSError, RuntimeError, AssertionError) as exc:
        print(f"xoptlab {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
