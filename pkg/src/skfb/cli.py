"""Command-line entry point: volume generation, filtering, and the
experiment tables, all writing deterministic artifacts.

Exit codes: 0 on success, 2 on configuration errors, 3 when a runner
detects numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import mid_slice, read_vol, write_vol
from .experiments import (
    DegeneracyError,
    ExperimentConfig,
    build_phantom_volume,
    export_slice_pgm,
    run_convergence,
    run_mse_table,
    run_roi_table,
)
from .operators import ConfigError, apply_operator

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skfb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a stacked head-phantom volume (VOL1)")
    p.add_argument("--size", type=int, default=128, help="slice width/height (default 128)")
    p.add_argument("--depth", type=int, default=64, help="number of stacked slices (default 64)")
    p.add_argument("--native-size", type=int, default=400, help="rasterization size before resizing")
    p.add_argument("--variant", choices=["modified", "standard"], default="modified")
    p.add_argument("--preview", help="optional PGM path for a mid-slice preview")
    p.add_argument("-o", "--output", required=True, help="VOL1 output path")

    p = sub.add_parser("filter", help="apply a JSON-configured operator to a VOL1 volume")
    p.add_argument("--op", required=True, help="operator config JSON")
    p.add_argument("-i", "--input", required=True, help="VOL1 input path")
    p.add_argument("-o", "--output", required=True, help="VOL1 output path")

    p = sub.add_parser("mse-table", help="MSE of the four operators across resolutions")
    p.add_argument("--resolutions", default="16,32,64", help="comma-separated grid sizes")
    p.add_argument("-o", "--output", required=True, help="table path (.csv or .json)")

    p = sub.add_parser("roi-table", help="speckle metrics per ROI on the phantom slice")
    p.add_argument("--kantorovich", choices=["surrogate", "true-operator"], default="surrogate")
    p.add_argument("--filter-scope", choices=["slice", "roi"], default="slice")
    p.add_argument("--with-identity", action="store_true", help="append an identity-operator control row per ROI")
    p.add_argument("-o", "--output", required=True, help="table path (.csv or .json)")

    p = sub.add_parser("convergence", help="error decay of one operator family")
    p.add_argument("--kind", choices=["gaussian", "sk", "bilateral", "wavelet"], required=True)
    p.add_argument("-o", "--output", required=True, help="table path (.csv or .json)")

    p = sub.add_parser("slice", help="export one slice of a VOL1 volume as PGM")
    p.add_argument("-i", "--input", required=True, help="VOL1 input path")
    p.add_argument("--index", type=int, default=None, help="slice index (default: middle)")
    p.add_argument("--axis", type=int, default=0, help="slicing axis (default 0)")
    p.add_argument(
        "--fixed-range",
        nargs=2,
        type=float,
        metavar=("LO", "HI"),
        default=None,
        help="map this value range to 0..255 instead of [min, max]",
    )
    p.add_argument("-o", "--output", required=True, help="PGM output path")
    return parser


def _cmd_phantom(args: argparse.Namespace) -> int:
    volume = build_phantom_volume(
        size=args.size, depth=args.depth, native_size=args.native_size, variant=args.variant
    )
    write_vol(args.output, volume)
    if args.preview:
        export_slice_pgm(mid_slice(volume), args.preview, fixed_range=(0.0, 1.0))
    return EXIT_OK


def _cmd_filter(args: argparse.Namespace) -> int:
    try:
        config = json.loads(args.op)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--op is not valid JSON: {exc}") from exc
    volume = read_vol(args.input)
    write_vol(args.output, apply_operator(volume, config))
    return EXIT_OK


def _cmd_mse_table(args: argparse.Namespace) -> int:
    try:
        resolutions = tuple(int(tok) for tok in args.resolutions.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --resolutions value {args.resolutions!r}") from exc
    run_mse_table(ExperimentConfig(resolutions=resolutions)).write(args.output)
    return EXIT_OK


def _cmd_roi_table(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig(
        kantorovich=args.kantorovich,
        filter_scope=args.filter_scope,
        with_identity=args.with_identity,
    )
    run_roi_table(cfg).write(args.output)
    return EXIT_OK


def _cmd_convergence(args: argparse.Namespace) -> int:
    run_convergence(args.kind).write(args.output)
    return EXIT_OK


def _cmd_slice(args: argparse.Namespace) -> int:
    volume = read_vol(args.input)
    sliced = mid_slice(volume, axis=args.axis, index=args.index)
    fixed = tuple(args.fixed_range) if args.fixed_range is not None else None
    export_slice_pgm(sliced, args.output, fixed_range=fixed)
    return EXIT_OK


_COMMANDS = {
    "phantom": _cmd_phantom,
    "filter": _cmd_filter,
    "mse-table": _cmd_mse_table,
    "roi-table": _cmd_roi_table,
    "convergence": _cmd_convergence,
    "slice": _cmd_slice,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DegeneracyError as exc:
        print(f"skfb: degenerate result: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ValueError, OSError) as exc:
        print(f"skfb: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
