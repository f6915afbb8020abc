"""spiderbench command line: run, validate, and report on experiment configs.

Exit codes: 0 on success, 1 on config or dataset errors, 2 when a solver
aborted at runtime (remaining cells still run and the summary is written)."""

import argparse
import sys

from ..errors import ConfigError, DatasetParseError, SpideroptError
from .harness import run_experiment, validate_experiment
from .report import report_complexity


def _cmd_run(args) -> int:
    result = run_experiment(args.config, root=args.output_root)
    print(f"wrote {result.summary_path}")
    failed = [c for c in result.summary["cells"] if "error" in c]
    if failed:
        for c in failed:
            print(f"aborted: {c['solver']} seed={c['seed']}: {c['error']}",
                  file=sys.stderr)
    return result.exit_code


def _cmd_validate(args) -> int:
    for line in validate_experiment(args.config):
        print(line)
    return 0


def _cmd_report(args) -> int:
    report = report_complexity(args.summaries, eps_values=args.eps)
    print(report.render())
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spiderbench",
        description="Run variance-reduced optimization benchmarks from TOML "
                    "configs and report oracle-complexity scaling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every solver x seed cell and "
                                       "write traces plus summary.json")
    p_run.add_argument("config", help="experiment TOML path")
    p_run.add_argument("--output-root", default=None,
                       help="directory to place the experiment output under")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="resolve every solver without "
                                            "running and print the settings")
    p_val.add_argument("config", help="experiment TOML path")
    p_val.set_defaults(func=_cmd_validate)

    p_rep = sub.add_parser("report", help="fit SFO-vs-eps scaling exponents "
                                          "from two or more summary.json files")
    p_rep.add_argument("summaries", nargs="+", help="summary.json paths")
    p_rep.add_argument("--eps", type=float, action="append", default=None,
                       help="restrict to these target_eps levels (repeatable)")
    p_rep.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SpideroptError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
