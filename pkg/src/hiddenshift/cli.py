"""Command-line entry point.

Exit status: 0 when every verdict passes, 1 when any fails, 2 on a usage or
configuration error.
"""
from __future__ import annotations

import argparse
import sys

from .experiments import ExperimentConfig, run_experiment
from .group import GroupSpec
from .influence import influence_profile, is_bent, is_periodic, profile_to_csv
from .injectivization import is_injective
from .oracle import (
    OracleFormatError,
    load,
    make_random_function,
    make_random_nonperiodic,
    make_shifted,
    random_mm_bent,
    save,
)


def _common(p: argparse.ArgumentParser, n_required: bool = True) -> None:
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--n", type=int, required=n_required)
    p.add_argument("--s-size", dest="range_size", type=int, default=2)
    p.add_argument("--m", type=int)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hiddenshift", description="Hidden shift injectivization experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="injectivization failure rate against its bound")
    _common(p)
    p.add_argument("--function", choices=("uniform", "nonperiodic", "bent"), default="uniform")
    p.add_argument("--tuple", dest="tuple_mode", choices=("distinct", "uniform"), default="distinct")
    p.add_argument("--exact", action="store_true", help="enumerate instead of sampling")

    p = sub.add_parser("end-to-end", help="recover planted shifts through the reduction")
    _common(p)
    p.add_argument("--function", choices=("uniform", "nonperiodic", "bent"), default="nonperiodic")
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--min-success", type=float)
    p.add_argument("--exhaustive", action="store_true", help="every shift for each trial seed")

    p = sub.add_parser("bent", help="bent-function constructions and exhaustive scans")
    _common(p)

    p = sub.add_parser("classical-game", help="the magic-bell query game")
    _common(p)
    p.add_argument("--k", type=int, default=0, help="queries per trial")
    p.add_argument("--strategy", choices=("random", "greedy"), default="random")

    p = sub.add_parser("periodicity", help="fraction of periodic functions")
    _common(p)
    p.add_argument("--sample", dest="sampled", action="store_true",
                   help="Monte Carlo even when exhaustive enumeration is feasible")

    p = sub.add_parser("oracle", help="generate or inspect oracle files")
    osub = p.add_subparsers(dest="action", required=True)
    g = osub.add_parser("generate")
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--s-size", dest="range_size", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kind", choices=("random", "nonperiodic", "bent"), default="random")
    g.add_argument("--shift", type=int, help="write g shifted by this element index instead")
    g.add_argument("--out", metavar="PATH", required=True)
    i = osub.add_parser("inspect")
    i.add_argument("path")
    i.add_argument("--profile-csv", metavar="PATH")
    return parser


def _oracle(args) -> int:
    if args.action == "generate":
        spec = GroupSpec(args.q, args.n)
        if args.kind == "bent":
            if args.q != 2 or args.n % 2 or args.range_size != 2:
                raise ValueError("bent oracles need q = 2, even n and --s-size 2")
            table = random_mm_bent(args.n // 2, args.seed)
        elif args.kind == "nonperiodic":
            table = make_random_nonperiodic(spec, args.range_size, args.seed)
        else:
            table = make_random_function(spec, args.range_size, args.seed)
        if args.shift is not None:
            table = make_shifted(table, args.shift)
        save(table, args.out)
        print(f"wrote {args.out}: Z_{args.q}^{args.n} -> {table.range_size} values")
        return 0
    table = load(args.path)
    profile = influence_profile(table) if table.spec.order <= 4096 else None
    injective, witness = is_injective(table)
    periodic, period = is_periodic(table)
    print(f"group: Z_{table.spec.q}^{table.spec.n} (order {table.spec.order})")
    print(f"range_size: {table.range_size}")
    print(f"injective: {injective}" + (f" (collision {witness})" if witness else ""))
    print(f"periodic: {periodic}" + (f" (period index {period})" if periodic else ""))
    if profile is not None:
        print(f"gamma_min: {profile.gamma_min}")
    if table.spec.q == 2 and table.range_size == 2:
        print(f"bent: {is_bent(table)}")
    if args.profile_csv:
        if profile is None:
            profile = influence_profile(table)
        with open(args.profile_csv, "w") as fh:
            fh.write(profile_to_csv(profile))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "oracle":
            return _oracle(args)
        fields = {k: v for k, v in vars(args).items() if k != "command"}
        cfg = ExperimentConfig(experiment=args.command, **fields)
        report = run_experiment(cfg)
    except (ValueError, OverflowError, OracleFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for note in report.notes:
        print(f"note: {note}")
    for name, ok in report.verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(report.to_csv() if cfg.format == "csv" else report.to_json() + "\n")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
