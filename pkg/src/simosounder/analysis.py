"""Metric pipeline: gain snapshots -> RSS / gain-ratio / capacity series.

Capacity is evaluated on gains rescaled by the scenario's capacity
calibration (measured port gains sit ~60 dB below the dimensionless
convention the capacity formula expects); RSS and gain ratios use the raw
port-referenced gains. Aggregation into summary reports and report-level
comparison live here too.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    Snr,
    capacity,
    db20_to_linear,
    gain_ratios,
    normalized_capacity,
    rss_dbm,
)


class EmptyInputError(ValueError):
    """Metric computation was asked to run on an empty snapshot set."""


class IncomparableReportsError(ValueError):
    """Two summary reports were produced at different SNR operating points."""


@dataclass
class MetricSeries:
    """Per-snapshot metrics plus the context needed to reproduce them."""

    interval_id: np.ndarray
    snapshot_idx: np.ndarray
    time_ms: np.ndarray
    rss_dbm: np.ndarray        # (n, N), -inf where the gain is exactly zero
    k_lin: np.ndarray          # (n, N), nan rows where element 1 is zero
    k_valid: np.ndarray        # (n,) bool
    capacity_bps_hz: np.ndarray
    normalized_capacity: np.ndarray  # nan where undefined (all-zero row)
    cn_valid: np.ndarray
    geometry: str
    snr_db: float
    rho_linear: float
    calibration_db: float
    tx_power_dbm: float
    config_echo: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.capacity_bps_hz)

    @property
    def n_elements(self) -> int:
        return self.rss_dbm.shape[1]

    @property
    def k_db(self) -> np.ndarray:
        """20 log10 view of the gain ratios; zero ratios map to -inf."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return 20.0 * np.log10(self.k_lin)


@dataclass
class SummaryReport:
    """Aggregates of one metric series, ready for persistence and comparison."""

    geometry: str
    snr_db: float
    rho_linear: float
    calibration_db: float
    tx_power_dbm: float
    intervals: tuple
    n_snapshots: int
    n_elements: int
    rss_mean_dbm: tuple
    rss_p2p_db: tuple
    k_mean_db: tuple           # element 1 is 0 dB by construction
    capacity_mean: float
    capacity_std: float
    capacity_median: float
    capacity_min: float
    capacity_max: float
    cn_mean: float
    cn_std: float
    cn_median: float
    cn_min: float
    cn_max: float
    cn_ratio_of_means: float   # mean C over mean single-element capacity
    k_marker_count: int
    cn_marker_count: int
    rss_marker_counts: tuple
    config_echo: dict = field(default_factory=dict)


def compute_metrics(gains, interval_id, snapshot_idx, time_ms, snr_db: float,
                    tx_power_dbm: float, calibration_db: float = 0.0,
                    geometry: str = "custom", rss_offset_db: float = 0.0,
                    config_echo: dict | None = None) -> MetricSeries:
    """Evaluate RSS, gain ratios, capacity and normalized capacity per snapshot.

    ``gains`` is an (n_snapshots, n_elements) complex array of estimated
    port gains. RSS is antenna-port referenced; pass the chain gain as
    ``rss_offset_db`` for a receiver-output-referenced view. Snapshots with
    a zero reference element carry a marker (nan + validity flag) for the
    gain ratios instead of a value; all-zero snapshots likewise for
    normalized capacity.
    """
    gains = np.asarray(gains, dtype=np.complex128)
    if gains.ndim != 2 or gains.shape[0] == 0:
        raise EmptyInputError("need a non-empty (snapshots, elements) gain array")
    if not np.all(np.isfinite(gains)):
        raise ValueError("gain array contains non-finite values")
    rho = Snr.from_db(snr_db)
    if rho.rho <= 0.0:
        raise ValueError("analysis SNR must be positive")
    n, n_el = gains.shape
    scale = db20_to_linear(calibration_db)

    rss = np.empty((n, n_el))
    k_lin = np.full((n, n_el), np.nan)
    k_valid = np.zeros(n, dtype=bool)
    cap = np.empty(n)
    cn = np.full(n, np.nan)
    cn_valid = np.zeros(n, dtype=bool)
    for t in range(n):
        row = gains[t]
        for i in range(n_el):
            rss[t, i] = rss_dbm(row[i], tx_power_dbm) + rss_offset_db
        scaled = tuple(row * scale)
        cap[t] = capacity(scaled, rho)
        if np.any(row != 0):
            cn[t] = normalized_capacity(scaled, rho)
            cn_valid[t] = True
        if abs(row[0]) > 0.0:
            k_lin[t] = gain_ratios(tuple(row)).ratios
            k_valid[t] = True
    return MetricSeries(
        interval_id=np.asarray(interval_id, dtype=int),
        snapshot_idx=np.asarray(snapshot_idx, dtype=int),
        time_ms=np.asarray(time_ms, dtype=float),
        rss_dbm=rss,
        k_lin=k_lin,
        k_valid=k_valid,
        capacity_bps_hz=cap,
        normalized_capacity=cn,
        cn_valid=cn_valid,
        geometry=geometry,
        snr_db=float(snr_db),
        rho_linear=rho.rho,
        calibration_db=float(calibration_db),
        tx_power_dbm=float(tx_power_dbm),
        config_echo=dict(config_echo or {}),
    )


def series_from_records(records, snr_db: float, tx_power_dbm: float,
                        calibration_db: float = 0.0, geometry: str = "custom",
                        rss_offset_db: float = 0.0,
                        config_echo: dict | None = None) -> MetricSeries:
    """Convenience wrapper over :func:`compute_metrics` for simulator output."""
    if not records:
        raise EmptyInputError("no snapshot records")
    gains = np.stack([r.estimated_gains for r in records])
    return compute_metrics(
        gains,
        interval_id=[r.interval_id for r in records],
        snapshot_idx=[r.snapshot_idx for r in records],
        time_ms=[r.time_ms for r in records],
        snr_db=snr_db,
        tx_power_dbm=tx_power_dbm,
        calibration_db=calibration_db,
        geometry=geometry,
        rss_offset_db=rss_offset_db,
        config_echo=config_echo,
    )


def summarize(series: MetricSeries) -> SummaryReport:
    """Arithmetic aggregates over snapshots; markers excluded and counted."""
    if len(series) == 0:
        raise EmptyInputError("cannot summarize an empty series")
    n_el = series.n_elements
    rss_mean = []
    rss_p2p = []
    rss_markers = []
    for i in range(n_el):
        col = series.rss_dbm[:, i]
        finite = col[np.isfinite(col)]
        rss_markers.append(int(np.sum(~np.isfinite(col))))
        if finite.size:
            rss_mean.append(float(np.mean(finite)))
            rss_p2p.append(float(np.max(finite) - np.min(finite)))
        else:
            rss_mean.append(math.nan)
            rss_p2p.append(math.nan)
    k_rows = series.k_lin[series.k_valid]
    if k_rows.size:
        k_mean_lin = np.mean(k_rows, axis=0)
        k_mean_db = tuple(
            20.0 * math.log10(v) if v > 0.0 else -math.inf for v in k_mean_lin
        )
    else:
        k_mean_db = tuple(math.nan for _ in range(n_el))
    cap = series.capacity_bps_hz
    cn = series.normalized_capacity[series.cn_valid]
    if cn.size == 0:
        cn_stats = (math.nan,) * 5
        ratio_of_means = math.nan
    else:
        cn_stats = (
            float(np.mean(cn)),
            float(np.std(cn)),
            float(np.median(cn)),
            float(np.min(cn)),
            float(np.max(cn)),
        )
        # Ratio-of-means variant: mean combined capacity over the mean
        # single-element capacity (per-snapshot C / C_n), labeled distinctly.
        mean_single = np.mean(cap[series.cn_valid] / cn)
        ratio_of_means = float(np.mean(cap[series.cn_valid]) / mean_single)
    return SummaryReport(
        geometry=series.geometry,
        snr_db=series.snr_db,
        rho_linear=series.rho_linear,
        calibration_db=series.calibration_db,
        tx_power_dbm=series.tx_power_dbm,
        intervals=tuple(sorted(set(int(v) for v in series.interval_id))),
        n_snapshots=len(series),
        n_elements=n_el,
        rss_mean_dbm=tuple(rss_mean),
        rss_p2p_db=tuple(rss_p2p),
        k_mean_db=k_mean_db,
        capacity_mean=float(np.mean(cap)),
        capacity_std=float(np.std(cap)),
        capacity_median=float(np.median(cap)),
        capacity_min=float(np.min(cap)),
        capacity_max=float(np.max(cap)),
        cn_mean=cn_stats[0],
        cn_std=cn_stats[1],
        cn_median=cn_stats[2],
        cn_min=cn_stats[3],
        cn_max=cn_stats[4],
        cn_ratio_of_means=ratio_of_means,
        k_marker_count=int(np.sum(~series.k_valid)),
        cn_marker_count=int(np.sum(~series.cn_valid)),
        rss_marker_counts=tuple(rss_markers),
        config_echo=dict(series.config_echo),
    )


@dataclass
class ComparisonRow:
    metric: str
    value_a: float
    value_b: float

    @property
    def delta(self) -> float:
        return self.value_b - self.value_a


@dataclass
class ComparisonTable:
    """Paired metric rows for two reports plus winner flags."""

    label_a: str
    label_b: str
    snr_db: float
    rows: list
    higher_capacity: str
    higher_normalized_capacity: str


def compare_reports(a: SummaryReport, b: SummaryReport) -> ComparisonTable:
    """Side-by-side deltas for two reports computed at the same SNR."""
    if a.snr_db != b.snr_db:
        raise IncomparableReportsError(
            f"reports were computed at different SNRs: {a.snr_db} dB vs {b.snr_db} dB"
        )
    if a.n_elements != b.n_elements:
        raise IncomparableReportsError(
            "reports describe arrays with different element counts"
        )
    rows = [
        ComparisonRow("mean_capacity_bps_hz", a.capacity_mean, b.capacity_mean),
        ComparisonRow("mean_normalized_capacity", a.cn_mean, b.cn_mean),
    ]
    for i in range(a.n_elements):
        rows.append(
            ComparisonRow(f"rss_p2p_db_{i + 1}", a.rss_p2p_db[i], b.rss_p2p_db[i])
        )

    def winner(va: float, vb: float) -> str:
        if va > vb:
            return a.geometry
        if vb > va:
            return b.geometry
        return "tie"

    return ComparisonTable(
        label_a=a.geometry,
        label_b=b.geometry,
        snr_db=a.snr_db,
        rows=rows,
        higher_capacity=winner(a.capacity_mean, b.capacity_mean),
        higher_normalized_capacity=winner(a.cn_mean, b.cn_mean),
    )
