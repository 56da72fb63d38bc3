"""Flat key = value run configuration with strict parsing and presets.

The format is intentionally primitive: one ``key = value`` per line, ``#``
comments, no nesting. Unknown keys are rejected so typos cannot silently
fall back to defaults. ``RunConfig.to_text`` is the canonical formatter;
parsing its output reproduces the config byte-for-byte.
"""

import math
from dataclasses import dataclass, fields, replace

from . import geometry, sounder
from .geometry import RayPath, Scenario, build_pi, build_ula


class ConfigError(ValueError):
    """Malformed configuration text or values."""


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ConfigError(f"non-finite value {x!r} cannot be written to a config")
    return repr(float(x))


def _parse_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError as exc:
        raise ConfigError(f"not a number: {s!r}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"non-finite number not allowed: {s!r}")
    return v


def _parse_int(s: str) -> int:
    try:
        return int(s, 10)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {s!r}") from exc


def _parse_bool(s: str) -> bool:
    if s == "true":
        return True
    if s == "false":
        return False
    raise ConfigError(f"expected true or false, got {s!r}")


def _fmt_bool(v: bool) -> str:
    return "true" if v else "false"


def _parse_floats(s: str, count: int | None = None) -> tuple:
    if s == "":
        vals = ()
    else:
        vals = tuple(_parse_float(p.strip()) for p in s.split(","))
    if count is not None and len(vals) != count:
        raise ConfigError(f"expected {count} comma-separated numbers, got {len(vals)}")
    return vals


def _fmt_floats(v) -> str:
    return ",".join(_fmt_float(x) for x in v)


def _parse_ints(s: str) -> tuple:
    if s == "":
        return ()
    return tuple(_parse_int(p.strip()) for p in s.split(","))


def _fmt_ints(v) -> str:
    return ",".join(str(x) for x in v)


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of one simulate run, mirroring the config file keys."""

    geometry: str = "ula"
    frequency_hz: float = 2.4e9
    tx_rx_distance_m: float = 4.5
    antenna_height_m: float = 1.5
    room_width_m: float = 9.0
    room_length_m: float = 12.0
    link_offset_x_m: float = 0.0
    tx_polarization: tuple = (0.0, 0.0, 1.0)
    ula_spacing_wavelengths: float = 0.5
    pi_leg_wavelengths: float = 1.0
    pi_top_wavelengths: float = 1.0
    polarization_leakage: float = 0.05
    element_trims_db: tuple = (0.0, -19.0, -17.0, -15.0)
    capacity_calibration_db: float = 62.0
    replica_enabled: bool = False
    replica_wall: str = "-x"
    replica_amplitude_scale: float = 0.5
    replica_polarization: tuple = (0.0, 0.0, 1.0)
    replica_blocked_elements: tuple = (4,)
    fading_amplitude_sigma_db: float = 0.35
    fading_phase_jitter_rad: float = math.pi
    chain_gain_db: float = 42.0
    am_pm_deg_per_db: float = 0.2
    reference_level_dbm: float = -62.5
    noise_enabled: bool = True
    per_element_snr_db: float = 33.0
    intervals: int = 2
    snapshots_per_interval: int = 100
    snapshot_dt_ms: float = 4.0
    tx_power_dbm: float = -8.0
    samples_per_snapshot: int = 1024
    sample_rate_hz: float = 1.0e6
    tone_offset_hz: float = 1.0e5
    seed: int = 1

    def __post_init__(self):
        if self.geometry not in ("ula", "pi"):
            raise ConfigError(f"geometry must be ula or pi, got {self.geometry!r}")
        if self.replica_wall not in geometry.WALLS:
            raise ConfigError(
                f"replica_wall must be one of {geometry.WALLS}, got {self.replica_wall!r}"
            )
        object.__setattr__(self, "tx_polarization", tuple(self.tx_polarization))
        object.__setattr__(self, "element_trims_db", tuple(self.element_trims_db))
        object.__setattr__(self, "replica_polarization",
                           tuple(self.replica_polarization))
        object.__setattr__(self, "replica_blocked_elements",
                           tuple(self.replica_blocked_elements))


# (key, parse, format) in canonical file order.
_SPECS = {
    "geometry": (str, str),
    "frequency_hz": (_parse_float, _fmt_float),
    "tx_rx_distance_m": (_parse_float, _fmt_float),
    "antenna_height_m": (_parse_float, _fmt_float),
    "room_width_m": (_parse_float, _fmt_float),
    "room_length_m": (_parse_float, _fmt_float),
    "link_offset_x_m": (_parse_float, _fmt_float),
    "tx_polarization": (lambda s: _parse_floats(s, 3), _fmt_floats),
    "ula_spacing_wavelengths": (_parse_float, _fmt_float),
    "pi_leg_wavelengths": (_parse_float, _fmt_float),
    "pi_top_wavelengths": (_parse_float, _fmt_float),
    "polarization_leakage": (_parse_float, _fmt_float),
    "element_trims_db": (_parse_floats, _fmt_floats),
    "capacity_calibration_db": (_parse_float, _fmt_float),
    "replica_enabled": (_parse_bool, _fmt_bool),
    "replica_wall": (str, str),
    "replica_amplitude_scale": (_parse_float, _fmt_float),
    "replica_polarization": (lambda s: _parse_floats(s, 3), _fmt_floats),
    "replica_blocked_elements": (_parse_ints, _fmt_ints),
    "fading_amplitude_sigma_db": (_parse_float, _fmt_float),
    "fading_phase_jitter_rad": (_parse_float, _fmt_float),
    "chain_gain_db": (_parse_float, _fmt_float),
    "am_pm_deg_per_db": (_parse_float, _fmt_float),
    "reference_level_dbm": (_parse_float, _fmt_float),
    "noise_enabled": (_parse_bool, _fmt_bool),
    "per_element_snr_db": (_parse_float, _fmt_float),
    "intervals": (_parse_int, str),
    "snapshots_per_interval": (_parse_int, str),
    "snapshot_dt_ms": (_parse_float, _fmt_float),
    "tx_power_dbm": (_parse_float, _fmt_float),
    "samples_per_snapshot": (_parse_int, str),
    "sample_rate_hz": (_parse_float, _fmt_float),
    "tone_offset_hz": (_parse_float, _fmt_float),
    "seed": (_parse_int, str),
}

assert set(_SPECS) == {f.name for f in fields(RunConfig)}


def parse_config(text: str) -> RunConfig:
    """Parse config text; unknown keys, duplicates and bad values all raise."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SPECS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser_fn = _SPECS[key][0]
        try:
            values[key] = parser_fn(value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from exc
    try:
        return RunConfig(**values)
    except (ConfigError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def format_config(config: RunConfig) -> str:
    """Canonical text form; parsing it reproduces ``config`` exactly."""
    lines = []
    for key, (_, fmt) in _SPECS.items():
        lines.append(f"{key} = {fmt(getattr(config, key))}")
    return "\n".join(lines) + "\n"


def config_echo(config: RunConfig) -> dict:
    """Ordered key -> formatted-value mapping for report embedding."""
    return {key: fmt(getattr(config, key)) for key, (_, fmt) in _SPECS.items()}


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return parse_config(f.read())


def default_config(geom: str = "ula") -> RunConfig:
    """Documented default configs for the two reference geometries.

    The ULA defaults reproduce the reference testbed's metric levels with
    per-element trims fit to its measured gain-coefficient profile; the Pi
    defaults get their element disparity from cross-polarized legs plus the
    wall replica instead, with the link shifted toward the reflecting wall.
    """
    if geom == "ula":
        return RunConfig()
    if geom == "pi":
        return RunConfig(
            geometry="pi",
            link_offset_x_m=-2.7,
            polarization_leakage=0.06,
            element_trims_db=(0.0, 0.0, 0.0, 0.0),
            capacity_calibration_db=54.44,
            replica_enabled=True,
            replica_wall="-x",
            replica_amplitude_scale=0.5,
            replica_polarization=(0.52, 0.1248, 0.845),
            replica_blocked_elements=(4,),
            fading_amplitude_sigma_db=0.5,
        )
    raise ConfigError(f"no default config for geometry {geom!r}")


def build_scenario(config: RunConfig) -> Scenario:
    return Scenario.standard(
        frequency_hz=config.frequency_hz,
        tx_rx_distance_m=config.tx_rx_distance_m,
        antenna_height_m=config.antenna_height_m,
        room_width_m=config.room_width_m,
        room_length_m=config.room_length_m,
        link_offset_x_m=config.link_offset_x_m,
        tx_polarization=config.tx_polarization,
    )


def build_layout(config: RunConfig, scenario: Scenario):
    lam = scenario.wavelength_m
    if config.geometry == "ula":
        return build_ula(
            spacing_m=config.ula_spacing_wavelengths * lam,
            centroid=scenario.rx_centroid,
            polarization=config.tx_polarization,
        )
    return build_pi(
        leg_m=config.pi_leg_wavelengths * lam,
        top_m=config.pi_top_wavelengths * lam,
        centroid=scenario.rx_centroid,
        parallel_polarization=config.tx_polarization,
    )


def build_replica(config: RunConfig) -> RayPath | None:
    if not config.replica_enabled:
        return None
    pol = config.replica_polarization
    norm = math.sqrt(sum(v * v for v in pol))
    if norm == 0.0:
        raise ConfigError("replica_polarization must be a nonzero vector")
    pol = tuple(v / norm for v in pol)
    return RayPath(
        kind="replica",
        wall=config.replica_wall,
        amplitude_scale=config.replica_amplitude_scale,
        blocked_elements=frozenset(config.replica_blocked_elements),
        polarization=pol,
    )


def build_fading(config: RunConfig) -> sounder.FadingModel:
    return sounder.FadingModel(
        amplitude_sigma_db=config.fading_amplitude_sigma_db,
        phase_jitter_rad=config.fading_phase_jitter_rad,
        replica_enabled=config.replica_enabled,
    )


def build_chain(config: RunConfig) -> sounder.ReceiverChain:
    return sounder.ReceiverChain(
        chain_gain_db=config.chain_gain_db,
        am_pm_deg_per_db=config.am_pm_deg_per_db,
        reference_level_dbm=config.reference_level_dbm,
        noise_enabled=config.noise_enabled,
        per_element_snr_db=config.per_element_snr_db,
    )


def build_snapshot_config(config: RunConfig,
                          seed: int | None = None) -> sounder.SnapshotConfig:
    return sounder.SnapshotConfig(
        intervals=config.intervals,
        snapshots_per_interval=config.snapshots_per_interval,
        snapshot_dt_ms=config.snapshot_dt_ms,
        tx_power_dbm=config.tx_power_dbm,
        samples_per_snapshot=config.samples_per_snapshot,
        sample_rate_hz=config.sample_rate_hz,
        tone_offset_hz=config.tone_offset_hz,
        seed=config.seed if seed is None else seed,
    )


def run_simulation(config: RunConfig, seed: int | None = None,
                   retain_iq: bool = False, workers: int = 1) -> list:
    """Wire a RunConfig into the sounder and return its snapshot records."""
    scenario = build_scenario(config)
    layout = build_layout(config, scenario)
    if seed is not None:
        config = replace(config, seed=seed)
    return sounder.simulate(
        scenario,
        layout,
        build_fading(config),
        build_chain(config),
        build_snapshot_config(config),
        leakage=config.polarization_leakage,
        replica=build_replica(config),
        element_trims_db=config.element_trims_db,
        retain_iq=retain_iq,
        workers=workers,
    )
