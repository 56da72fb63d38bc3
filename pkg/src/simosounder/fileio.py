"""Bit-exact text file formats: gain snapshots, metric series, reports.

All numeric output uses 9 significant digits, '.' decimal points and LF
terminators regardless of locale. Writers go through a temp-file rename so
an interrupted run never leaves a partial file at the target path. Parsers
are strict: wrong ordering, row counts or numeric formats are rejected with
the offending line number.
"""

import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .analysis import ComparisonTable, SummaryReport

SNAPSHOT_HEADER = "interval,snapshot,t_ms,element,h_re,h_im,rss_dbm"
IQ_HEADER = "interval,snapshot,element,sample,i,q"
RSS_MARKER = "below-noise-floor"
UNDEFINED_MARKER = "undefined"
REPORT_FORMAT = "simosounder-report-v1"
COMPARISON_FORMAT = "simosounder-comparison-v1"


class NumericOutputError(ValueError):
    """A non-finite value reached a file writer."""


class SnapshotFileError(ValueError):
    """Malformed snapshot file; carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ReportFileError(ValueError):
    """Malformed report file."""


def fmt9(x: float) -> str:
    """Canonical 9-significant-digit decimal form."""
    if not math.isfinite(x):
        raise NumericOutputError(f"non-finite value {x!r} in file output")
    return f"{x:.9g}"


def _parse_number(token: str, line: int, what: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise SnapshotFileError(f"{what} is not a number: {token!r}", line) from None
    if not math.isfinite(v):
        raise SnapshotFileError(f"{what} is not finite: {token!r}", line)
    return v


def _parse_index(token: str, line: int, what: str) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise SnapshotFileError(f"{what} is not an integer: {token!r}", line) from None


def atomic_write_text(path, text: str):
    """Write text (LF newlines) via temp file + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class SnapshotTable:
    """Parsed snapshot file: canonical-order arrays, one row per snapshot."""

    interval_id: np.ndarray   # (n,)
    snapshot_idx: np.ndarray  # (n,)
    time_ms: np.ndarray       # (n,)
    gains: np.ndarray         # (n, N) complex
    rss_dbm: np.ndarray       # (n, N), -inf where marked below noise floor

    @property
    def n_elements(self) -> int:
        return self.gains.shape[1]


def format_snapshot_rows(records, tx_power_dbm: float) -> str:
    """Render simulator records as the snapshot CSV (canonical order)."""
    lines = [SNAPSHOT_HEADER]
    for rec in records:
        for i, g in enumerate(rec.estimated_gains, start=1):
            mag = abs(g)
            if mag == 0.0:
                rss = RSS_MARKER
            else:
                rss = fmt9(tx_power_dbm + 20.0 * math.log10(mag))
            lines.append(
                f"{rec.interval_id},{rec.snapshot_idx},{fmt9(rec.time_ms)},"
                f"{i},{fmt9(g.real)},{fmt9(g.imag)},{rss}"
            )
    return "\n".join(lines) + "\n"


def write_snapshot_file(path, records, tx_power_dbm: float):
    atomic_write_text(path, format_snapshot_rows(records, tx_power_dbm))


def format_snapshot_table(table: SnapshotTable) -> str:
    """Render a parsed table back to canonical text (round-trip identity)."""
    lines = [SNAPSHOT_HEADER]
    for t in range(table.gains.shape[0]):
        for i in range(table.n_elements):
            rss = table.rss_dbm[t, i]
            rss_s = RSS_MARKER if not math.isfinite(rss) else fmt9(rss)
            g = table.gains[t, i]
            lines.append(
                f"{table.interval_id[t]},{table.snapshot_idx[t]},"
                f"{fmt9(table.time_ms[t])},{i + 1},{fmt9(g.real)},"
                f"{fmt9(g.imag)},{rss_s}"
            )
    return "\n".join(lines) + "\n"


def parse_snapshot_text(text: str) -> SnapshotTable:
    """Strict parse: exact header, canonical ordering, contiguous elements."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SnapshotFileError("empty file", 1)
    if lines[0] != SNAPSHOT_HEADER:
        raise SnapshotFileError(
            f"bad header; expected {SNAPSHOT_HEADER!r}", 1
        )
    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split(",")
        if len(parts) != 7:
            raise SnapshotFileError(f"expected 7 fields, got {len(parts)}", lineno)
        interval = _parse_index(parts[0], lineno, "interval")
        snap = _parse_index(parts[1], lineno, "snapshot")
        t_ms = _parse_number(parts[2], lineno, "t_ms")
        element = _parse_index(parts[3], lineno, "element")
        h_re = _parse_number(parts[4], lineno, "h_re")
        h_im = _parse_number(parts[5], lineno, "h_im")
        if parts[6] == RSS_MARKER:
            rss = -math.inf
        else:
            rss = _parse_number(parts[6], lineno, "rss_dbm")
        rows.append((lineno, interval, snap, t_ms, element, h_re, h_im, rss))
    if not rows:
        raise SnapshotFileError("file has a header but no data rows", 1)

    if rows[0][4] != 1:
        raise SnapshotFileError("element numbering must start at 1", rows[0][0])
    blocks = [[rows[0]]]
    for row in rows[1:]:
        if row[4] == 1:
            blocks.append([row])
        else:
            blocks[-1].append(row)
    n_el = len(blocks[0])

    n_snap = len(blocks)
    interval_id = np.empty(n_snap, dtype=int)
    snapshot_idx = np.empty(n_snap, dtype=int)
    time_ms = np.empty(n_snap)
    gains = np.empty((n_snap, n_el), dtype=np.complex128)
    rss = np.empty((n_snap, n_el))
    prev_key = None
    per_interval_counts = {}
    for t, block in enumerate(blocks):
        lineno0, interval, snap, t_ms = block[0][:4]
        for k, (lineno, b_int, b_snap, b_tms, element, h_re, h_im, b_rss) in enumerate(
            block, start=1
        ):
            if k > n_el:
                raise SnapshotFileError(
                    f"snapshot ({interval},{snap}) has {len(block)} element "
                    f"rows; expected {n_el}",
                    lineno,
                )
            if element != k:
                raise SnapshotFileError(
                    f"expected element {k} of snapshot ({interval},{snap}), "
                    f"got element {element}",
                    lineno,
                )
            if (b_int, b_snap) != (interval, snap):
                raise SnapshotFileError(
                    f"snapshot ({interval},{snap}) interrupted by "
                    f"({b_int},{b_snap})",
                    lineno,
                )
            if b_tms != t_ms:
                raise SnapshotFileError(
                    f"t_ms changes within snapshot ({interval},{snap})", lineno
                )
            gains[t, k - 1] = complex(h_re, h_im)
            rss[t, k - 1] = b_rss
        if len(block) < n_el:
            raise SnapshotFileError(
                f"snapshot ({interval},{snap}) is missing element "
                f"{len(block) + 1} of {n_el}",
                block[-1][0],
            )
        key = (interval, snap)
        if prev_key is not None and key <= prev_key:
            raise SnapshotFileError(
                f"snapshots out of canonical order: ({interval},{snap}) "
                f"after {prev_key}",
                lineno0,
            )
        if prev_key is not None and interval == prev_key[0] and snap != prev_key[1] + 1:
            raise SnapshotFileError(
                f"snapshot indices must be contiguous; expected "
                f"{prev_key[1] + 1}, got {snap}",
                lineno0,
            )
        if interval not in per_interval_counts and snap != 0:
            raise SnapshotFileError(
                f"interval {interval} must start at snapshot 0", lineno0
            )
        per_interval_counts[interval] = per_interval_counts.get(interval, 0) + 1
        prev_key = key
        interval_id[t] = interval
        snapshot_idx[t] = snap
        time_ms[t] = t_ms
    counts = set(per_interval_counts.values())
    if len(counts) > 1:
        raise SnapshotFileError(
            f"intervals have unequal snapshot counts: "
            f"{sorted(per_interval_counts.items())}",
            rows[-1][0],
        )
    return SnapshotTable(interval_id, snapshot_idx, time_ms, gains, rss)


def read_snapshot_file(path) -> SnapshotTable:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return parse_snapshot_text(f.read())


def format_iq_rows(records) -> str:
    lines = [IQ_HEADER]
    for rec in records:
        if rec.iq is None:
            raise ValueError("records carry no IQ; run simulate with retain_iq")
        for i in range(rec.iq.shape[0]):
            for n in range(rec.iq.shape[1]):
                s = rec.iq[i, n]
                lines.append(
                    f"{rec.interval_id},{rec.snapshot_idx},{i + 1},{n},"
                    f"{fmt9(s.real)},{fmt9(s.imag)}"
                )
    return "\n".join(lines) + "\n"


def write_iq_file(path, records):
    atomic_write_text(path, format_iq_rows(records))


# --- metric series files -------------------------------------------------

def _series_prefix(series, t: int) -> str:
    return (
        f"{series.interval_id[t]},{series.snapshot_idx[t]},"
        f"{fmt9(series.time_ms[t])}"
    )


def format_rss_series(series) -> str:
    n_el = series.n_elements
    header = "interval,snapshot,t_ms," + ",".join(
        f"rss_dbm_{i + 1}" for i in range(n_el)
    )
    lines = [header]
    for t in range(len(series)):
        vals = [
            RSS_MARKER if not math.isfinite(v) else fmt9(v)
            for v in series.rss_dbm[t]
        ]
        lines.append(_series_prefix(series, t) + "," + ",".join(vals))
    return "\n".join(lines) + "\n"


def format_k_series(series) -> str:
    n_el = series.n_elements
    header = "interval,snapshot,t_ms," + ",".join(
        f"k{i + 1}1" for i in range(1, n_el)
    )
    lines = [header]
    for t in range(len(series)):
        if series.k_valid[t]:
            vals = [fmt9(v) for v in series.k_lin[t, 1:]]
        else:
            vals = [UNDEFINED_MARKER] * (n_el - 1)
        lines.append(_series_prefix(series, t) + "," + ",".join(vals))
    return "\n".join(lines) + "\n"


def format_capacity_series(series) -> str:
    lines = ["interval,snapshot,t_ms,capacity_bps_hz"]
    for t in range(len(series)):
        lines.append(
            _series_prefix(series, t) + "," + fmt9(series.capacity_bps_hz[t])
        )
    return "\n".join(lines) + "\n"


def format_cn_series(series) -> str:
    lines = ["interval,snapshot,t_ms,normalized_capacity"]
    for t in range(len(series)):
        if series.cn_valid[t]:
            val = fmt9(series.normalized_capacity[t])
        else:
            val = UNDEFINED_MARKER
        lines.append(_series_prefix(series, t) + "," + val)
    return "\n".join(lines) + "\n"


SERIES_WRITERS = {
    "rss": format_rss_series,
    "k_ratios": format_k_series,
    "capacity": format_capacity_series,
    "normalized_capacity": format_cn_series,
}


def write_series_files(series, directory) -> list:
    """Write the four metric series CSVs; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, writer in SERIES_WRITERS.items():
        path = os.path.join(directory, f"{name}.csv")
        atomic_write_text(path, writer(series))
        paths.append(path)
    return paths


# --- report files ---------------------------------------------------------

def _report_value(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return UNDEFINED_MARKER
        if not math.isfinite(x):
            return RSS_MARKER
        return fmt9(x)
    return str(x)


def format_report(report: SummaryReport, tool_version: str) -> str:
    """Deterministic key-value rendering of a summary report."""
    lines = []

    def section(name):
        if lines:
            lines.append("")
        lines.append(f"[{name}]")

    def kv(key, value):
        lines.append(f"{key} = {_report_value(value)}")

    section("meta")
    kv("format", REPORT_FORMAT)
    kv("tool_version", tool_version)
    section("analysis")
    kv("geometry", report.geometry)
    kv("snr_db", report.snr_db)
    kv("rho_linear", report.rho_linear)
    kv("capacity_calibration_db", report.calibration_db)
    kv("tx_power_dbm", report.tx_power_dbm)
    kv("intervals", ",".join(str(i) for i in report.intervals))
    kv("snapshots", report.n_snapshots)
    kv("elements", report.n_elements)
    kv("k_marker_count", report.k_marker_count)
    kv("cn_marker_count", report.cn_marker_count)
    section("capacity_bps_hz")
    kv("mean", report.capacity_mean)
    kv("std", report.capacity_std)
    kv("median", report.capacity_median)
    kv("min", report.capacity_min)
    kv("max", report.capacity_max)
    section("normalized_capacity")
    kv("mean", report.cn_mean)
    kv("std", report.cn_std)
    kv("median", report.cn_median)
    kv("min", report.cn_min)
    kv("max", report.cn_max)
    kv("ratio_of_means", report.cn_ratio_of_means)
    section("rss_dbm")
    for i in range(report.n_elements):
        kv(f"mean_{i + 1}", report.rss_mean_dbm[i])
    for i in range(report.n_elements):
        kv(f"p2p_{i + 1}", report.rss_p2p_db[i])
    for i in range(report.n_elements):
        kv(f"marker_count_{i + 1}", report.rss_marker_counts[i])
    section("gain_ratio_db")
    for i in range(report.n_elements):
        kv(f"mean_{i + 1}1", report.k_mean_db[i])
    section("config")
    for key, value in report.config_echo.items():
        kv(key, value)
    return "\n".join(lines) + "\n"


def write_report_file(path, report: SummaryReport, tool_version: str):
    atomic_write_text(path, format_report(report, tool_version))


def _parse_sections(text: str, what: str) -> dict:
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current in sections:
                raise ReportFileError(f"{what}: duplicate section [{current}]")
            sections[current] = {}
            continue
        if current is None or " = " not in raw:
            raise ReportFileError(f"{what}: line {lineno}: unexpected content {raw!r}")
        key, _, value = raw.partition(" = ")
        sections[current][key.strip()] = value
    return sections


def _get(sections: dict, section: str, key: str, what: str) -> str:
    try:
        return sections[section][key]
    except KeyError:
        raise ReportFileError(f"{what}: missing {key!r} in section [{section}]") from None


def _get_float(sections, section, key, what) -> float:
    token = _get(sections, section, key, what)
    if token == UNDEFINED_MARKER:
        return math.nan
    if token == RSS_MARKER:
        return -math.inf
    try:
        return float(token)
    except ValueError:
        raise ReportFileError(f"{what}: {key!r} is not a number: {token!r}") from None


def read_report_file(path) -> SummaryReport:
    """Parse a report back into a SummaryReport (for comparison)."""
    what = str(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        sections = _parse_sections(f.read(), what)
    if _get(sections, "meta", "format", what) != REPORT_FORMAT:
        raise ReportFileError(f"{what}: unrecognized report format")
    n_el = int(_get(sections, "analysis", "elements", what))
    intervals = tuple(
        int(v) for v in _get(sections, "analysis", "intervals", what).split(",") if v
    )
    return SummaryReport(
        geometry=_get(sections, "analysis", "geometry", what),
        snr_db=_get_float(sections, "analysis", "snr_db", what),
        rho_linear=_get_float(sections, "analysis", "rho_linear", what),
        calibration_db=_get_float(sections, "analysis", "capacity_calibration_db", what),
        tx_power_dbm=_get_float(sections, "analysis", "tx_power_dbm", what),
        intervals=intervals,
        n_snapshots=int(_get(sections, "analysis", "snapshots", what)),
        n_elements=n_el,
        rss_mean_dbm=tuple(
            _get_float(sections, "rss_dbm", f"mean_{i + 1}", what) for i in range(n_el)
        ),
        rss_p2p_db=tuple(
            _get_float(sections, "rss_dbm", f"p2p_{i + 1}", what) for i in range(n_el)
        ),
        k_mean_db=tuple(
            _get_float(sections, "gain_ratio_db", f"mean_{i + 1}1", what)
            for i in range(n_el)
        ),
        capacity_mean=_get_float(sections, "capacity_bps_hz", "mean", what),
        capacity_std=_get_float(sections, "capacity_bps_hz", "std", what),
        capacity_median=_get_float(sections, "capacity_bps_hz", "median", what),
        capacity_min=_get_float(sections, "capacity_bps_hz", "min", what),
        capacity_max=_get_float(sections, "capacity_bps_hz", "max", what),
        cn_mean=_get_float(sections, "normalized_capacity", "mean", what),
        cn_std=_get_float(sections, "normalized_capacity", "std", what),
        cn_median=_get_float(sections, "normalized_capacity", "median", what),
        cn_min=_get_float(sections, "normalized_capacity", "min", what),
        cn_max=_get_float(sections, "normalized_capacity", "max", what),
        cn_ratio_of_means=_get_float(
            sections, "normalized_capacity", "ratio_of_means", what
        ),
        k_marker_count=int(_get(sections, "analysis", "k_marker_count", what)),
        cn_marker_count=int(_get(sections, "analysis", "cn_marker_count", what)),
        rss_marker_counts=tuple(
            int(_get(sections, "rss_dbm", f"marker_count_{i + 1}", what))
            for i in range(n_el)
        ),
        config_echo=dict(sections.get("config", {})),
    )


def format_comparison(table: ComparisonTable, tool_version: str) -> str:
    lines = [
        "[meta]",
        f"format = {COMPARISON_FORMAT}",
        f"tool_version = {tool_version}",
        f"snr_db = {_report_value(table.snr_db)}",
        f"label_a = {table.label_a}",
        f"label_b = {table.label_b}",
        "",
        "[table]",
        "metric,value_a,value_b,delta",
    ]
    for row in table.rows:
        lines.append(
            f"{row.metric},{_report_value(row.value_a)},"
            f"{_report_value(row.value_b)},{_report_value(row.delta)}"
        )
    lines += [
        "",
        "[flags]",
        f"higher_capacity = {table.higher_capacity}",
        f"higher_normalized_capacity = {table.higher_normalized_capacity}",
    ]
    return "\n".join(lines) + "\n"


def write_comparison_file(path, table: ComparisonTable, tool_version: str):
    atomic_write_text(path, format_comparison(table, tool_version))
