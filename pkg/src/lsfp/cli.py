"""Command line entry point: `lsfp sweep | verify | single`."""

import argparse
import json
import sys

from lsfp.config import SimulationConfig
from lsfp.harness import run_setup, run_sweep, run_verification, write_results


def _load_config(args) -> SimulationConfig:
    cfg = (
        SimulationConfig.from_json(args.config)
        if args.config
        else SimulationConfig()
    )
    if args.seed is not None:
        cfg = SimulationConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    return cfg


def _parse_k_values(text):
    return [int(v) for v in text.split(",") if v.strip()]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lsfp",
        description="Two-layer LSFP massive MIMO simulator and optimizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (defaults otherwise)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", type=int, default=1, help="parallel setups")

    p_sweep = sub.add_parser(
        "sweep", parents=[common], help="run the K-sweep experiment, write CSV"
    )
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument(
        "--k-values", default="2,4,6,8,10", help="comma-separated user counts"
    )

    p_verify = sub.add_parser(
        "verify", parents=[common], help="Monte Carlo verification of closed-form SE"
    )
    p_verify.add_argument("--out", required=True, help="output CSV path")
    p_verify.add_argument("--n-setups", type=int, help="setups to verify")
    p_verify.add_argument("--n-blocks", type=int, help="channel realizations per setup")

    p_single = sub.add_parser(
        "single", parents=[common], help="one setup with verbose optimizer trace"
    )
    p_single.add_argument("--setup", type=int, default=0, help="setup index")
    p_single.add_argument("--out", help="optional CSV output path")

    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "sweep":
            rows = run_sweep(cfg, _parse_k_values(args.k_values), threads=args.threads)
            write_results(rows, args.out, config=cfg)
            print(f"wrote {len(rows)} rows to {args.out}")
        elif args.command == "verify":
            rows, report = run_verification(
                cfg, n_setups=args.n_setups, n_blocks=args.n_blocks,
                threads=args.threads,
            )
            write_results(rows, args.out, config=cfg)
            print(json.dumps(report, indent=2))
        elif args.command == "single":
            from lsfp.harness import _hash_seed, result_rows
            from lsfp.optimizer import optimize_lsfp
            from lsfp.scenario import generate_scenario
            from lsfp.stats import compute_statistics

            scenario = generate_scenario(cfg, _hash_seed(cfg, args.setup))
            stats = compute_statistics(scenario)
            print("LSFP optimizer trace:", file=sys.stderr)
            optimize_lsfp(
                stats, cfg.rho_d, options=cfg.optimizer, trace_file=sys.stderr
            )
            res = run_setup(cfg, args.setup)
            if args.out:
                write_results(result_rows(res), args.out, config=cfg)
            for scheme in ("LSFP", "CPC", "LPC"):
                se = res.se[scheme]
                print(
                    f"{scheme}: sum SE per cell = {se.sum() / cfg.L:.4f} bit/s/Hz, "
                    f"min user SE = {se.min():.4f}"
                )
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
