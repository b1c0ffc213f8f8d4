"""Command-line entry point for linfeat"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path for linfeat import
sys.path.insert(0, str(Path(__file__).parent.parent))

from linfeat import __version__
from linfeat.config import LOG_LEVEL_ENV, OUTPUT_DIR_ENV, config_defaults, load_config
from linfeat.dataset import Layout, apply_split, load_csv, load_split_spec, synthesize, write_csv
from linfeat.errors import LinfeatError
from linfeat.features import list_features
from linfeat.runner import run_casestudy

logger = logging.getLogger("linfeat")

EXIT_OK = 0
EXIT_IO = 3


def configure_logging(verbose: int) -> None:
    """-v for INFO, -vv for DEBUG; otherwise $LINFEAT_LOG_LEVEL or WARNING"""
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, os.getenv(LOG_LEVEL_ENV, "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def cmd_casestudy(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    report = run_casestudy(config)

    output_dir = config.resolved_output_dir()
    print(f"[CASESTUDY] feature={report.feature} objective={report.objective} "
          f"n={report.dataset_shape[0]} p={report.dataset_shape[1]}")
    print(f"  anchor g(x̄) = {report.anchor_value:.10g}, slope m = {report.slope:.10g}")
    for rule, entry in report.ridge.items():
        print(f"  ridge {rule:8s} lambda = {entry['lambda']:.6g}  distance = {entry['distance']:.6g}")
    for rule, entry in report.pls.items():
        print(f"  pls   {rule:8s} k = {entry['k']:<4d}  distance = {entry['distance']:.6g}")
    for warning in report.warnings:
        print(f"  warning: {warning}")
    print(f"  checks: {'all passed' if report.checks['all_passed'] else 'FAILED'}")
    print(f"  outputs in {output_dir}")
    return EXIT_OK


def cmd_synthesize(args: argparse.Namespace) -> int:
    ds = synthesize(n=args.n, p=args.p, smoothness=args.smoothness, rank=args.rank,
                    noise_std=args.noise_std, seed=args.seed)
    path = write_csv(ds, args.out)
    print(f"[SYNTH] wrote {ds.n}x{ds.p} dataset to {path}")
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    ds = load_csv(args.path, layout=args.layout)
    shapes = {"n": ds.n, "p": ds.p, "grid": "decreasing" if ds.is_decreasing() else "increasing"}
    if args.split is not None:
        spec = load_split_spec(args.split)
        train, test1, test2 = apply_split(ds, spec)
        shapes["split"] = {
            "train": train.n,
            "test1": test1.n,
            "test2": test2.n,
            "outliers_removed": len(spec.outlier_indices),
        }
    print(json.dumps(shapes, indent=2))
    return EXIT_OK


def cmd_write_csv(args: argparse.Namespace) -> int:
    ds = load_csv(args.path, layout=args.layout)
    path = write_csv(ds, args.out)
    print(f"[DATASET] wrote {ds.n}x{ds.p} dataset to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linfeat",
        description="Feature coefficients of compressing features vs. ridge and PLS solution paths",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            f"casestudy config defaults:\n{config_defaults()}\n\n"
            f"features: {', '.join(list_features())}\n"
            f"environment: ${OUTPUT_DIR_ENV} overrides output_dir, ${LOG_LEVEL_ENV} sets the log level\n"
            "exit codes: 0 ok, 2 config/argument error, 3 data error, 4 numeric error"
        ),
    )
    parser.add_argument("--version", action="version", version=f"linfeat {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    commands = parser.add_subparsers(dest="command", required=True)

    casestudy = commands.add_parser("casestudy", help="run a full case study from a JSON config")
    casestudy.add_argument("--config", required=True, help="RunConfig JSON document")
    casestudy.add_argument("--output-dir", default=None, help="override output_dir of the config")
    casestudy.set_defaults(handler=cmd_casestudy)

    synth = commands.add_parser("synthesize", help="write a synthetic functional dataset as CSV")
    synth.add_argument("--n", type=int, default=40)
    synth.add_argument("--p", type=int, default=200)
    synth.add_argument("--smoothness", type=float, default=1.0)
    synth.add_argument("--rank", type=int, default=5)
    synth.add_argument("--noise-std", type=float, default=1e-4)
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--out", required=True, help="output CSV path")
    synth.set_defaults(handler=cmd_synthesize)

    layouts = [layout.value for layout in Layout]
    ingest = commands.add_parser("ingest", help="load a CSV export and report its shape")
    ingest.add_argument("path")
    ingest.add_argument("--layout", choices=layouts, default=Layout.ROWS_ARE_SAMPLES.value)
    ingest.add_argument("--split", default=None, help="JSON split sidecar")
    ingest.set_defaults(handler=cmd_ingest)

    rewrite = commands.add_parser("write-csv", help="re-emit a CSV export in the canonical dialect")
    rewrite.add_argument("path")
    rewrite.add_argument("--layout", choices=layouts, default=Layout.ROWS_ARE_SAMPLES.value)
    rewrite.add_argument("--out", required=True, help="output CSV path")
    rewrite.set_defaults(handler=cmd_write_csv)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except LinfeatError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
