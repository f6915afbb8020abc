"""plotkit command line: render convergence figures from trace CSVs."""

import argparse
import sys

from .figures import X_AXES, Y_METRICS, plot_comparison, plot_two_panel
from .frames import SchemaError, UsageError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Plot gradient-norm or loss-gap curves (log y) from "
                    "spiderbench trace CSVs.")
    parser.add_argument("traces", nargs="+", help="trace CSV paths")
    parser.add_argument("-o", "--out", required=True, help="output image path")
    parser.add_argument("--x", choices=X_AXES, default="sfo", dest="x_axis")
    parser.add_argument("--y", choices=Y_METRICS, default="gradnorm",
                        dest="y_metric")
    parser.add_argument("--eps", type=float, default=None,
                        help="horizontal target reference line")
    parser.add_argument("--n", type=int, default=None,
                        help="component count; required for --x epochs")
    parser.add_argument("--two-panel", action="store_true",
                        help="gradient norm and loss gap side by side "
                             "(ignores --y)")
    parser.add_argument("--median", action="store_true",
                        help="overlay a per-solver median curve")
    args = parser.parse_args(argv)

    try:
        if args.two_panel:
            result = plot_two_panel(args.traces, args.out, x_axis=args.x_axis,
                                    eps=args.eps, n=args.n,
                                    median_overlay=args.median)
        else:
            result = plot_comparison(args.traces, args.out, x_axis=args.x_axis,
                                     y_metric=args.y_metric, eps=args.eps,
                                     n=args.n, median_overlay=args.median)
    except (SchemaError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for label in result.skipped:
        print(f"warning: {label}: empty metric column, curve skipped",
              file=sys.stderr)
    print(f"wrote {result.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
