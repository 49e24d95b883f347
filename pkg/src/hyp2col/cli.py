"""Command-line surface: generate / count / cycles / formulas / wsample / experiment.

Successful runs print JSON to stdout (unless --out redirects to files) and
exit 0; domain or resource errors exit 1; usage errors exit 2.  Every
randomised output is fully determined by --seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core import (
    Flavour,
    ModelParams,
    sample_hypergraph_with_replacement,
    sample_planted_pair,
    sample_simple_hypergraph,
)
from .counting import DensityGrid, count_colourings
from .cycles import count_cycles
from .errors import Hyp2ColError
from .experiments import EXPERIMENTS, ExperimentConfig
from .fluctuation import fluctuation_moments, make_fluctuation_law, fluctuation_samples
from .formulas import (
    balanced_pair_moment_rate,
    cycle_conditioned_ratio,
    cycle_law,
    expected_count_at_density,
    expected_count_total,
    expected_pair_count,
    first_moment_rate,
    quadratic_constants,
    regime_check,
    second_moment_ratio,
)
from .hgio import load_hypergraph, save_colouring, save_hypergraph
from . import hgio

_FLAVOURS = {
    "hnm": Flavour.WITH_REPLACEMENT,
    "with_replacement": Flavour.WITH_REPLACEMENT,
    "simple": Flavour.SIMPLE,
    "planted": Flavour.PLANTED,
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    common.add_argument("--k", type=int, help="edge size")
    common.add_argument("--n", type=int, help="number of vertices")
    group = common.add_mutually_exclusive_group()
    group.add_argument("--m", type=int, help="number of edges")
    group.add_argument("--dprime", type=float, help="requested density; m = ceil(dprime*n/k)")
    common.add_argument("--L", type=int, dest="big_l",
                        help="cycle-length / truncation level")
    common.add_argument("--trials", type=int, help="number of trials / samples")
    common.add_argument("--out", type=str, help="output file or directory")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="hyp2col",
        description="Random k-uniform hypergraph 2-colouring toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="draw a random hypergraph")
    g.add_argument("--flavour", choices=sorted(_FLAVOURS), default="hnm")
    g.add_argument("--planted-with-replacement", action="store_true",
                   help="planted model draws edges with replacement")

    c = sub.add_parser("count", parents=[common], help="exact colouring counts")
    c.add_argument("--in", dest="infile", required=True, help="hypergraph file")
    c.add_argument("--omega", type=int, help="balanced-window width parameter")
    c.add_argument("--nu", type=int, help="stratum refinement parameter")

    y = sub.add_parser("cycles", parents=[common], help="exact cycle census")
    y.add_argument("--in", dest="infile", required=True, help="hypergraph file")
    y.add_argument("--csv", action="store_true", help="emit the census as a CSV row")

    f = sub.add_parser("formulas", parents=[common], help="closed-form values as JSON")
    f.add_argument("--l", type=int, dest="length", help="cycle length for the cycle law")
    f.add_argument("--rho", type=float, help="colour density for the growth rate")
    f.add_argument("--rho00", type=float, help="diagonal overlap entry for the balanced rate")
    f.add_argument("--overlap", type=str, help="four overlap counts n00,n01,n10,n11")
    f.add_argument("--cycles", type=str, dest="cycle_counts",
                   help="observed cycle counts c2,c3,... for the conditioning ratio")
    f.add_argument("--zeros", type=int, help="zero-count for the per-density expectation")

    w = sub.add_parser("wsample", parents=[common],
                       help="sample the limiting log-count fluctuation")

    e = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    e.add_argument("--config", type=str, help="JSON configuration file")
    e.add_argument("--flavour", choices=sorted(_FLAVOURS))
    e.add_argument("--omega", type=int)
    e.add_argument("--nu", type=int)
    e.add_argument("--workers", type=int)
    e.add_argument("--w-samples", type=int, dest="w_samples")
    return parser


def _params_from_args(args, flavour: Flavour) -> ModelParams:
    if args.n is None or args.k is None:
        raise Hyp2ColError("--n and --k are required")
    if args.dprime is not None:
        return ModelParams.from_density(args.n, args.k, args.dprime, flavour)
    if args.m is None:
        raise Hyp2ColError("one of --m or --dprime is required")
    return ModelParams(n=args.n, k=args.k, m=args.m, flavour=flavour)


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _cmd_generate(args) -> int:
    flavour = _FLAVOURS[args.flavour]
    params = _params_from_args(args, flavour)
    colouring = None
    if flavour is Flavour.WITH_REPLACEMENT:
        h = sample_hypergraph_with_replacement(params, args.seed)
    elif flavour is Flavour.SIMPLE:
        h = sample_simple_hypergraph(params, args.seed)
    else:
        h, colouring = sample_planted_pair(
            params, args.seed, distinct_edges=not args.planted_with_replacement
        )
    payload = {"seed": args.seed, "hypergraph": hgio.hypergraph_to_json_dict(h)}
    if colouring is not None:
        payload["colouring"] = colouring.to_string()
    if args.out:
        save_hypergraph(h, args.out)
        if colouring is not None:
            save_colouring(colouring, str(args.out) + ".col")
        print(json.dumps({"written": args.out}))
    else:
        print(json.dumps(payload, indent=2))
    return 0


def _cmd_count(args) -> int:
    h = load_hypergraph(args.infile)
    grid = None
    if args.omega is not None and args.nu is not None:
        grid = DensityGrid(omega=args.omega, nu=args.nu, n=h.n)
    report = count_colourings(h, grid=grid)
    _emit(report.to_json_dict(), args.out)
    return 0


def _cmd_cycles(args) -> int:
    h = load_hypergraph(args.infile)
    max_len = args.big_l if args.big_l is not None else 3
    census = count_cycles(h, max_len)
    if args.csv:
        row = census.csv_row(h.n, h.m, h.k, args.seed)
        if args.out:
            Path(args.out).write_text(row + "\n")
        else:
            print(row)
        return 0
    payload = {
        "n": h.n,
        "m": h.m,
        "k": h.k,
        "max_len": census.max_len,
        "counts": {str(l): census.count(l) for l in range(2, census.max_len + 1)},
    }
    _emit(payload, args.out)
    return 0


def _cmd_formulas(args) -> int:
    params = _params_from_args(args, Flavour.WITH_REPLACEMENT)
    flags = regime_check(params)
    payload: dict = {
        "n": params.n,
        "k": params.k,
        "m": params.m,
        "d": float(params.d),
        "d_exact": str(params.d),
        "regime": {
            "first_moment_ok": flags.first_moment_ok,
            "main_theorem_ok": flags.main_theorem_ok,
            "series_ok": flags.series_ok,
        },
    }
    qc = quadratic_constants(params)
    payload["quadratic_constants"] = {
        "b_minus": qc.b_minus, "b_plus": qc.b_plus, "d_pair": qc.d_pair,
    }
    if flags.series_ok:
        series = second_moment_ratio(params)
        payload["second_moment_ratio"] = series.value
        if args.big_l is not None:
            payload["second_moment_partial_log"] = series.partial_log(args.big_l)
            payload["second_moment_tail_bound"] = series.tail_bound(args.big_l)
    if args.length is not None:
        law = cycle_law(params, args.length)
        payload[f"lambda_{args.length}"] = law.poisson_mean
        payload[f"delta_{args.length}"] = law.planted_bias
        payload[f"mu_{args.length}"] = law.planted_mean
    if args.rho is not None:
        payload["first_moment_rate"] = first_moment_rate(args.rho, params)
    if args.rho00 is not None:
        payload["balanced_pair_moment_rate"] = balanced_pair_moment_rate(args.rho00, params)
    if args.zeros is not None:
        mv = expected_count_at_density(params, args.zeros)
        payload["expected_count_at_density"] = {
            "log": mv.log, "exact": None if mv.exact is None else str(mv.exact),
        }
    if args.overlap is not None:
        counts = tuple(int(x) for x in args.overlap.split(","))
        mv = expected_pair_count(params, counts)
        payload["expected_pair_count"] = {
            "log": mv.log, "exact": None if mv.exact is None else str(mv.exact),
        }
    if args.cycle_counts is not None:
        cc = [int(x) for x in args.cycle_counts.split(",")]
        payload["cycle_conditioned_ratio"] = cycle_conditioned_ratio(params, cc)
    payload["log_expected_count_exact_sum"] = expected_count_total(params, "exact_sum")
    payload["log_expected_count_asymptotic"] = expected_count_total(params, "asymptotic")
    _emit(payload, args.out)
    return 0


def _cmd_wsample(args) -> int:
    params = _params_from_args(args, Flavour.WITH_REPLACEMENT)
    level = args.big_l if args.big_l is not None else None
    law = make_fluctuation_law(params, level=level)
    n_samples = args.trials if args.trials is not None else 1000
    samples = fluctuation_samples(law, n_samples, args.seed)
    moments = fluctuation_moments(law)
    if args.out:
        Path(args.out).write_text("\n".join(f"{x:.12g}" for x in samples) + "\n")
    payload = {
        "level": law.level,
        "tail_bound": law.tail,
        "n_samples": n_samples,
        "mean_exp": moments.mean_exp,
        "mean_exp_sq": moments.mean_exp_sq,
        "mean_upper": moments.mean_upper,
        "sample_mean": float(samples.mean()),
        "sample_median": float(samples[len(samples) // 2]),
    }
    if not args.out:
        payload["samples"] = [float(x) for x in samples]
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        params = _params_from_args(args, Flavour.SIMPLE if args.flavour is None
                                   else _FLAVOURS[args.flavour])
        config = ExperimentConfig(params=params, seed=args.seed)
    # flags override file values
    if args.flavour is not None:
        config.params = config.params.with_flavour(_FLAVOURS[args.flavour])
    if args.trials is not None:
        config.trials = args.trials
    if args.seed is not None:
        config.seed = args.seed
    if args.big_l is not None:
        config.max_cycle_len = args.big_l
        config.level = max(args.big_l, 2)
    for name in ("omega", "nu", "workers", "w_samples"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(config, name, val)
    report = EXPERIMENTS[args.name](config)
    for crit in report.criteria:
        print(crit.line(), file=sys.stderr)
    if args.out:
        report.write(args.out)
        print(json.dumps({"written": args.out, "passed": report.passed}))
    else:
        print(json.dumps({
            "experiment": report.experiment,
            "config": report.config,
            "summary": report.summary,
            "criteria": [vars(c) for c in report.criteria],
            "passed": report.passed,
        }, indent=2, default=str))
    return 0 if report.passed else 1


def parse_and_dispatch(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    handlers = {
        "generate": _cmd_generate,
        "count": _cmd_count,
        "cycles": _cmd_cycles,
        "formulas": _cmd_formulas,
        "wsample": _cmd_wsample,
        "experiment": _cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except Hyp2ColError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
