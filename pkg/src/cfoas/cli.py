"""Command-line entry point: ``cfoas run | sweep | validate | pathloss``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .config import SystemConfig
from .experiment import run_experiment, summary_document, sweep, write_report, write_sweep
from .propagation import path_loss, path_loss_branch

VALIDATION_TOLERANCE = 0.05


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_config(args) -> SystemConfig:
    config = SystemConfig.from_file(args.config) if args.config else SystemConfig()
    overrides = {}
    for attr, field_name in (("drops", "drops"), ("seed", "seed"), ("ms", "aps_per_user"),
                             ("nu", "users_per_rb"), ("epsilon", "threshold_coeff"),
                             ("selection", "selection")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "epsilon", None) is not None and getattr(args, "selection", None) is None:
        overrides["selection"] = "threshold"
    return config.replace(**overrides) if overrides else config


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML file with SystemConfig fields")
    p.add_argument("--drops", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ms", type=int, help="APs selected per user")
    p.add_argument("--nu", type=int, help="users per resource block")
    p.add_argument("--epsilon", type=float, help="threshold selection coefficient")
    p.add_argument("--selection", choices=("fixed", "threshold"))
    p.add_argument("--workers", type=int, default=1)


def cmd_run(args) -> int:
    config = _load_config(args)
    report = run_experiment(config, workers=args.workers)
    paths = write_report(report, args.out)
    doc = summary_document(report)
    print(f"{'direction':<9} {'approach':<20} {'p5':>8} {'median':>8} {'p95':>8} {'mean':>8}")
    for direction, per_approach in doc["summary"].items():
        for approach, s in per_approach.items():
            if args.approach and approach not in args.approach:
                continue
            print(f"{direction:<9} {approach:<20} {s['p5']:8.3f} {s['median']:8.3f} "
                  f"{s['p95']:8.3f} {s['mean']:8.3f}")
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    result = sweep(config, args.axis, args.values, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"sweep_{args.axis}.csv"
    write_sweep(result, path)
    header = " ".join(f"{v:>7}" for v in result.values)
    print(f"{'5th pct SE':<28} {header}")
    for (approach, direction), curve in result.curves.items():
        print(f"{direction + '/' + approach:<28} " + " ".join(f"{x:7.3f}" for x in curve))
    print(f"wrote {path}")
    return 0


def cmd_validate(args) -> int:
    from .oracle import validation_suite

    start = time.perf_counter()
    rows = validation_suite(seed=args.seed, num_realizations=args.realizations,
                            num_symbols=args.symbols)
    failed = False
    print(f"{'expression':<44} {'max rel err':>11}  result")
    for label in dict.fromkeys(r.expression for r in rows):
        sinr_rows = [r for r in rows if r.expression == label and r.quantity == "sinr"]
        err = max((r.rel_error for r in sinr_rows if r.rel_error == r.rel_error), default=0.0)
        gating = sinr_rows[0].gating
        ok = err < VALIDATION_TOLERANCE
        failed |= gating and not ok
        verdict = ("PASS" if ok else "FAIL") if gating else "info"
        print(f"{label:<44} {err:11.4f}  {verdict}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("expression", "quantity", "user", "empirical", "closed_form",
                             "rel_error", "gating"))
            for r in rows:
                writer.writerow((r.expression, r.quantity, r.user, repr(r.empirical),
                                 repr(r.closed_form), repr(r.rel_error), int(r.gating)))
        print(f"wrote {args.out}")
    print(f"elapsed {time.perf_counter() - start:.1f} s")
    return 1 if failed else 0


def cmd_pathloss(args) -> int:
    config = _load_config(args)
    for d in args.distance_km:
        print(f"d = {d:g} km: {path_loss(d, config):.2f} dB  [{path_loss_branch(d, config)}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfoas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Monte Carlo SE statistics of all approaches")
    _add_config_args(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--approach", action="append",
                   help="only print these approaches (files always contain all)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="5th-percentile SE over N_u or M_s")
    _add_config_args(p)
    p.add_argument("--axis", choices=("nu", "ms"), required=True)
    p.add_argument("--values", type=_int_list, required=True)
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="closed forms against the link-level oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realizations", type=int, default=100_000)
    p.add_argument("--symbols", type=int, default=100)
    p.add_argument("--out", type=Path, help="CSV with per-term relative errors")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pathloss", help="path gain at given distances")
    p.add_argument("--config", type=Path)
    p.add_argument("--distance-km", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_pathloss)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
