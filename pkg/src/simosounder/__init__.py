"""Deterministic 1xN SIMO channel-sounder simulator and analysis toolkit.

Simulates a single-tone indoor sounding campaign over a four-element
receive array (uniform linear or Pi-shaped), estimates the complex channel
gains back out of the synthesized IQ, and reduces gain snapshots to the
standard metric families: received signal strength, normalized gain
coefficients, and (normalized) channel capacity.
"""

__version__ = "0.1.0"

from .channel import (
    GainRatioVector,
    GainVector,
    Snr,
    capacity,
    capacity_det_oracle,
    gain_ratios,
    normalized_capacity,
    rss_dbm,
)
from .geometry import (
    ArrayLayout,
    ElementPlacement,
    RayPath,
    Scenario,
    build_pi,
    build_ula,
    los_gains,
    replica_gains,
)
from .sounder import (
    FadingModel,
    ReceiverChain,
    SnapshotConfig,
    SnapshotRecord,
    estimate_gain,
    realize_block,
    simulate,
    synthesize_iq,
)
from .analysis import (
    MetricSeries,
    SummaryReport,
    compare_reports,
    compute_metrics,
    series_from_records,
    summarize,
)
from .config import RunConfig, default_config, parse_config, format_config, run_simulation
from .kernels import BACKEND

__all__ = [
    "__version__",
    "BACKEND",
    "GainRatioVector",
    "GainVector",
    "Snr",
    "capacity",
    "capacity_det_oracle",
    "gain_ratios",
    "normalized_capacity",
    "rss_dbm",
    "ArrayLayout",
    "ElementPlacement",
    "RayPath",
    "Scenario",
    "build_pi",
    "build_ula",
    "los_gains",
    "replica_gains",
    "FadingModel",
    "ReceiverChain",
    "SnapshotConfig",
    "SnapshotRecord",
    "estimate_gain",
    "realize_block",
    "simulate",
    "synthesize_iq",
    "MetricSeries",
    "SummaryReport",
    "compare_reports",
    "compute_metrics",
    "series_from_records",
    "summarize",
    "RunConfig",
    "default_config",
    "parse_config",
    "format_config",
    "run_simulation",
]
