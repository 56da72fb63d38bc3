"""Command-line surface: simulate -> analyze -> compare.

Exit codes: 0 success, 1 bad arguments or incompatible inputs, 2 malformed
config or data files, 3 numeric failure (a non-finite value reached an
output writer).
"""

import argparse
import sys

from . import __version__
from .analysis import (
    EmptyInputError,
    IncomparableReportsError,
    compare_reports,
    compute_metrics,
    series_from_records,
    summarize,
)
from .config import (
    ConfigError,
    config_echo,
    default_config,
    load_config,
    run_simulation,
)
from .fileio import (
    NumericOutputError,
    SnapshotFileError,
    ReportFileError,
    read_report_file,
    read_snapshot_file,
    write_comparison_file,
    write_iq_file,
    write_report_file,
    write_series_files,
    write_snapshot_file,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MALFORMED = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad arguments with exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="simosounder",
                     description="SIMO channel-sounder simulator and analyzer")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the sounder and write gain snapshots")
    sim.add_argument("--geometry", choices=("ula", "pi"),
                     help="receive-array preset (required unless --config is given)")
    sim.add_argument("--config", help="config file path; overrides the preset")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.add_argument("--out", required=True, help="snapshot CSV output path")
    sim.add_argument("--iq-out", help="optional raw IQ dump path (large)")
    sim.add_argument("--workers", type=int, default=1,
                     help="snapshot worker threads (output is identical)")

    ana = sub.add_parser("analyze", help="turn a snapshot file into metrics")
    ana.add_argument("--input", required=True, help="snapshot CSV from simulate")
    ana.add_argument("--report", required=True, help="summary report output path")
    ana.add_argument("--series-dir", required=True,
                     help="directory for the per-metric series CSVs")
    ana.add_argument("--snr-db", type=float, default=33.0,
                     help="analysis SNR in dB (default 33)")
    ana.add_argument("--config", help="config file to take calibration/labels from")
    ana.add_argument("--calibration-db", type=float,
                     help="override the capacity calibration in dB")
    ana.add_argument("--tx-power-dbm", type=float,
                     help="override the transmit power used for RSS recomputation")
    ana.add_argument("--rss-offset-db", type=float, default=0.0,
                     help="shift reported RSS, e.g. the 42 dB chain gain for a "
                          "receiver-output-referenced view (default: antenna port)")

    cmp_ = sub.add_parser("compare", help="diff two summary reports")
    cmp_.add_argument("--report-a", required=True)
    cmp_.add_argument("--report-b", required=True)
    cmp_.add_argument("--out", required=True, help="comparison table output path")
    return parser


def _cmd_simulate(args) -> int:
    if args.config is not None:
        config = load_config(args.config)
        if args.geometry is not None and args.geometry != config.geometry:
            raise _UsageError(
                f"--geometry {args.geometry} contradicts config geometry "
                f"{config.geometry}"
            )
    elif args.geometry is not None:
        config = default_config(args.geometry)
    else:
        raise _UsageError("either --geometry or --config is required")
    records = run_simulation(config, seed=args.seed,
                             retain_iq=args.iq_out is not None,
                             workers=max(1, args.workers))
    write_snapshot_file(args.out, records, config.tx_power_dbm)
    if args.iq_out is not None:
        write_iq_file(args.iq_out, records)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    config = load_config(args.config) if args.config is not None else None
    calibration = args.calibration_db
    if calibration is None:
        calibration = config.capacity_calibration_db if config else 62.0
    tx_power = args.tx_power_dbm
    if tx_power is None:
        tx_power = config.tx_power_dbm if config else -8.0
    geometry_label = config.geometry if config else "unknown"
    table = read_snapshot_file(args.input)
    series = compute_metrics(
        table.gains,
        interval_id=table.interval_id,
        snapshot_idx=table.snapshot_idx,
        time_ms=table.time_ms,
        snr_db=args.snr_db,
        tx_power_dbm=tx_power,
        calibration_db=calibration,
        geometry=geometry_label,
        rss_offset_db=args.rss_offset_db,
        config_echo=config_echo(config) if config else None,
    )
    report = summarize(series)
    write_report_file(args.report, report, __version__)
    write_series_files(series, args.series_dir)
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = read_report_file(args.report_a)
    b = read_report_file(args.report_b)
    table = compare_reports(a, b)
    write_comparison_file(args.out, table, __version__)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_compare(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IncomparableReportsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, SnapshotFileError, ReportFileError, EmptyInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NumericOutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
