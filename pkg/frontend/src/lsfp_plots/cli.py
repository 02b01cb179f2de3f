"""Command line entry point: `plot sum-se | cdf`."""

import argparse
import sys

from lsfp_plots.figures import plot_cdf, plot_sum_se


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render figures from LSFP sweep result CSVs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("sum-se", help="average sum SE per cell vs K")
    p_sum.add_argument("--csv", required=True, help="sweep result CSV")
    p_sum.add_argument("--out", required=True, help="output figure (svg/pdf)")

    p_cdf = sub.add_parser("cdf", help="CDF of per-user SE at fixed K")
    p_cdf.add_argument("--csv", required=True, help="sweep result CSV")
    p_cdf.add_argument("--k", type=int, required=True, help="users per cell")
    p_cdf.add_argument("--out", required=True, help="output figure (svg/pdf)")

    args = parser.parse_args(argv)
    try:
        if args.command == "sum-se":
            plot_sum_se(args.csv, args.out)
        else:
            plot_cdf(args.csv, args.k, args.out)
        print(f"wrote {args.out} (+ .png)")
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
