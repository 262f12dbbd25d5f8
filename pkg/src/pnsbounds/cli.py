"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 estimation precondition
failure (an empty experimental treatment arm).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .bounds import ExperimentalDist, ObservationalDist, pns_bounds
from .ci import ConfidenceSpec, arm_margins
from .experiment import error_sweep
from .oracle import FIELDS, informer_sparse
from .planner import plan_constraint, plan_equal, plan_k_term
from .sampler import EmptyArmError, draw_experimental, draw_observational, estimate_from_counts, write_batch
from .scm import PRESETS, ModelFileError, ScmModel, generate_model, load_model, preset, save_model

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_ESTIMATION = 3


def _floats(text: str, count: int, what: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what}: expected {count} comma-separated numbers")
    if len(values) != count:
        raise argparse.ArgumentTypeError(f"{what}: expected {count} values, got {len(values)}")
    return values


def _ints(text: str, count: int, what: str) -> list[int]:
    values = _floats(text, count, what)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError(f"{what}: counts must be integers")
    return [int(v) for v in values]


def _grid(text: str) -> list[int]:
    try:
        sizes = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be comma-separated integers")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("grid must list positive sizes")
    return sizes


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _conf(args) -> ConfidenceSpec:
    return ConfidenceSpec.from_alpha(args.alpha, rounded=args.z_rounded)


def _model(args) -> ScmModel:
    if args.preset:
        return preset(args.preset)
    if not args.model:
        raise ModelFileError("give --model FILE or --preset NAME")
    return load_model(args.model)


def cmd_plan(args) -> int:
    conf = _conf(args)
    if args.fixed_m is not None:
        constraint = plan_constraint(args.alpha, args.epsilon, conf)
        doc = constraint.to_dict()
        doc.update(m=args.fixed_m, n=constraint.min_n(args.fixed_m))
    elif args.k_term is not None:
        doc = plan_k_term(args.k_term, args.alpha, args.epsilon, conf).to_dict()
    else:
        doc = plan_equal(args.alpha, args.epsilon, conf).to_dict()
    _emit(doc)
    return EXIT_OK


def _summary(args) -> tuple[ExperimentalDist, ObservationalDist, int, int]:
    if args.exp_counts is not None or args.obs_counts is not None:
        if args.exp_counts is None or args.obs_counts is None:
            raise ValueError("counts mode needs both --exp-counts and --obs-counts")
        est = estimate_from_counts(tuple(args.exp_counts), tuple(args.obs_counts))
        return est.exp_hat, est.obs_hat, est.m, est.n
    if args.m is None or args.n is None:
        raise ValueError("probability mode needs --m and --n")
    if args.from_json is not None:
        text = sys.stdin.read() if args.from_json == "-" else Path(args.from_json).read_text()
        doc = json.loads(text)
        exp = ExperimentalDist(**doc["exp"])
        obs = ObservationalDist(**doc["obs"])
    elif args.exp is not None and args.obs is not None:
        exp = ExperimentalDist(*args.exp)
        obs = ObservationalDist(*args.obs)
    else:
        raise ValueError("give --exp-counts/--obs-counts, --exp/--obs, or --from-json")
    return exp, obs, args.m, args.n


def cmd_bounds(args) -> int:
    exp, obs, m, n = _summary(args)
    conf = _conf(args)
    b = pns_bounds(exp, obs)
    margins = arm_margins(exp, obs, m, n, conf)
    doc = {
        "exp": exp.to_dict(),
        "obs": obs.to_dict(),
        **b.to_dict(),
        "alpha": conf.alpha,
        "z": conf.z,
        "margins": margins.to_dict(),
    }
    _emit(doc)
    return EXIT_OK


def cmd_oracle(args) -> int:
    model = _model(args)
    fields = args.fields.split(",") if args.fields else None
    truth = informer_sparse(model, fields, workers=args.threads)
    _emit({"model": model.name, **truth.to_dict()})
    return EXIT_OK


def cmd_gen_model(args) -> int:
    if args.preset:
        model = preset(args.preset)
    elif args.seed is not None:
        model = generate_model(args.seed, name=args.name)
    else:
        raise ValueError("give --seed or --preset")
    save_model(model, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    model = _model(args)
    draw = draw_experimental if args.kind == "experimental" else draw_observational
    write_batch(draw(model, args.size, args.seed), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = _model(args)
    report = error_sweep(model, args.grid, args.reps, args.seed, workers=args.threads)
    report.write(args.out_dir)
    sys.stdout.write(report.sweep_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnsbounds", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_conf(p):
        p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
        p.add_argument("--z-rounded", action="store_true", help="use the two-decimal z-table value")

    def add_model(p):
        p.add_argument("--model", help="model JSON file")
        p.add_argument("--preset", choices=PRESETS, help="use a built-in model instead of --model")

    def add_threads(p):
        p.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")

    p = sub.add_parser("plan", help="minimal sample sizes for a target margin")
    add_conf(p)
    p.add_argument("--epsilon", type=float, required=True, help="target margin of error")
    p.add_argument("--k-term", type=int, help="size for an expression of K terms from one pool")
    p.add_argument("--fixed-m", type=int, help="minimal n alongside this experimental size")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bounds", help="PNS bounds and margins from summary data")
    add_conf(p)
    p.add_argument("--exp-counts", type=lambda s: _ints(s, 4, "--exp-counts"), help="n11,n10,n01,n00 by (x,y)")
    p.add_argument("--obs-counts", type=lambda s: _ints(s, 4, "--obs-counts"), help="n11,n10,n01,n00 by (x,y)")
    p.add_argument("--exp", type=lambda s: _floats(s, 2, "--exp"), help="P(y_x),P(y_x')")
    p.add_argument("--obs", type=lambda s: _floats(s, 4, "--obs"), help="P(x,y),P(x,y'),P(x',y),P(x',y')")
    p.add_argument("--from-json", metavar="FILE", help="read exp/obs from oracle JSON ('-' for stdin)")
    p.add_argument("--m", type=int, help="experimental sample size (probability mode)")
    p.add_argument("--n", type=int, help="observational sample size (probability mode)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", help="exact distributions and PNS by enumeration")
    add_model(p)
    add_threads(p)
    p.add_argument("--fields", help=f"comma-separated subset of {','.join(FIELDS)}")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-model", help="write a random or preset model file")
    p.add_argument("--seed", type=int)
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_model)

    p = sub.add_parser("sample", help="draw a sample batch to CSV")
    add_model(p)
    p.add_argument("--kind", choices=("experimental", "observational"), required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="replication study over a size grid")
    add_model(p)
    add_threads(p)
    p.add_argument("--grid", type=_grid, required=True, help="comma-separated sizes, m = n = size")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyArmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
