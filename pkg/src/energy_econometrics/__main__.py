"""CLI entry point for energy-econometrics."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from . import __version__
from .config import Settings, bundled_config_path, get_settings, load_analysis_config
from .errors import EconometricsError

logger = logging.getLogger("energy_econometrics")

FORMATS = ("text", "json", "csv_bundle")

# subcommand -> pipeline stages it runs
STAGE_VERBS = {
    "test": ("unit_root",),
    "cointegrate": ("cointegration",),
    "dols": ("dols",),
}


def _configure_logging(args: argparse.Namespace, settings: Settings) -> None:
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _config_path(args: argparse.Namespace, settings: Settings) -> Path:
    if args.config is not None:
        return args.config
    return settings.analysis_config or bundled_config_path()


def cmd_ingest(args: argparse.Namespace, settings: Settings) -> int:
    from .ingest import ingest_csv
    from .reports import TextTable

    if args.path is not None:
        dataset = ingest_csv(args.path)
    else:
        config = load_analysis_config(_config_path(args, settings))
        dataset = ingest_csv(config.data.path, config.data.columns)
    table = TextTable(f"{dataset.source.name}  sha256 {dataset.sha256}").add_header(
        "Series", "First", "Last", "Years", "Min", "Max"
    )
    for name in dataset:
        s = dataset[name]
        table.add_row(name, str(s.start_year), str(s.end_year), str(s.nobs), float(s.values.min()), float(s.values.max()))
    print(table.build(), end="")
    return 0


def cmd_analysis(args: argparse.Namespace, settings: Settings) -> int:
    """``run``, ``test``, ``cointegrate`` and ``dols``."""
    from .pipeline import STAGES, run_analysis, write_report

    config = load_analysis_config(_config_path(args, settings))
    stages = STAGE_VERBS.get(args.command, STAGES)
    report = run_analysis(config, cache_dir=settings.cache_dir, stages=stages, workers=settings.workers)
    out_dir = args.output or config.output.directory
    formats = args.format or config.output.formats
    for path in write_report(report, formats, out_dir):
        print(path)
    if report.errors:
        logger.warning("%d stage failures recorded in the report", len(report.errors))
    return 0


def cmd_cv(args: argparse.Namespace, settings: Settings) -> int:
    from .critical_values import NullDgpSpec, monte_carlo_cv, surface_cache_store

    dgp = NullDgpSpec(
        process=args.process,
        nobs=args.nobs,
        n=args.n,
        rank=args.rank,
        drift=args.drift,
        break_fractions=tuple(args.break_fraction),
    )
    options: dict[str, object] = {"max_lag": args.max_lag}
    if args.selection:
        options["selection"] = args.selection
    if args.trim is not None:
        options["trim"] = args.trim
    if args.break_style:
        options["break_style"] = args.break_style
    if args.lag_order is not None:
        options["lag_order"] = args.lag_order
    surface = monte_carlo_cv(
        args.family,
        args.spec_key,
        dgp,
        args.replications,
        args.seed,
        workers=args.workers or settings.workers,
        options=options,
    )
    for level, value in sorted(surface.quantiles.items()):
        print(f"{level:.2f}  {value: .4f}  (se {surface.standard_errors[level]:.4f})")
    print(surface_cache_store(surface, args.cache_dir or settings.cache_dir))
    return 0


def cmd_serve(args: argparse.Namespace, settings: Settings) -> int:
    import uvicorn

    print(f"Energy econometrics service v{__version__}")
    uvicorn.run(
        "energy_econometrics.app:app",
        host=args.host or settings.host,
        port=args.port or settings.port,
        reload=settings.reload,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="energy-econometrics",
        description="Unit-root, cointegration and DOLS analysis of annual energy demand data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    noise.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="validate a data file and summarise its series")
    ingest.add_argument("path", nargs="?", type=Path, help="CSV file; defaults to the config's data file")
    ingest.add_argument("-c", "--config", type=Path)
    ingest.set_defaults(handler=cmd_ingest)

    helps = {
        "run": "run the full pipeline",
        "test": "run the unit-root battery only",
        "cointegrate": "run VAR lag selection and Johansen tests only",
        "dols": "fit the DOLS models only",
    }
    for verb, text in helps.items():
        p = sub.add_parser(verb, help=text)
        p.add_argument("-c", "--config", type=Path, help="analysis YAML; defaults to the bundled replication")
        p.add_argument("-o", "--output", type=Path, help="report directory (overrides output.directory)")
        p.add_argument("-f", "--format", action="append", choices=FORMATS, help="repeatable")
        p.set_defaults(handler=cmd_analysis)

    cv = sub.add_parser("cv", help="simulate critical values and store them in the cache")
    cv.add_argument("--family", required=True, help="test family, e.g. adf, zivot_andrews, johansen_trace")
    cv.add_argument("--spec-key", required=True, help='e.g. "c", "ct:both" or "c:breaks:3"')
    cv.add_argument("--seed", type=int, required=True)
    cv.add_argument("--replications", type=int, default=10_000)
    cv.add_argument("--nobs", type=int, default=100)
    cv.add_argument("--process", default="random_walk")
    cv.add_argument("--n", type=int, default=1)
    cv.add_argument("--rank", type=int, default=0)
    cv.add_argument("--drift", type=float, default=0.0)
    cv.add_argument("--break-fraction", type=float, action="append", default=[])
    cv.add_argument("--max-lag", type=int, default=0)
    cv.add_argument("--selection")
    cv.add_argument("--trim", type=float)
    cv.add_argument("--break-style", choices=("AO", "IO"))
    cv.add_argument("--lag-order", type=int)
    cv.add_argument("--workers", type=int)
    cv.add_argument("--cache-dir", type=Path)
    cv.set_defaults(handler=cmd_cv)

    serve = sub.add_parser("serve", help="serve stored reports over HTTP")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    _configure_logging(args, settings)
    try:
        return args.handler(args, settings)
    except EconometricsError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
