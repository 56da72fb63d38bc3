"""Synthetic sounder measurements: block fading, IQ synthesis, gain estimation.

One snapshot is one 4 ms measurement instant. Per snapshot the mean ray
gains are jittered (block fading), a single-tone baseband block is pushed
through the receiver-chain model per element, and the complex channel gain
is recovered by matched-filter correlation. All randomness comes from
counter-based streams in :mod:`simosounder.rng`, so results are bit-exact
reproducible at any thread count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .channel import db20_to_linear
from .geometry import los_gains, replica_gains


class DegenerateReferenceError(ValueError):
    """Matched-filter reference has zero energy."""


@dataclass(frozen=True)
class SnapshotConfig:
    """Timing, excitation and sampling parameters of a sounder run."""

    intervals: int = 2
    snapshots_per_interval: int = 100
    snapshot_dt_ms: float = 4.0
    tx_power_dbm: float = -8.0
    samples_per_snapshot: int = 1024
    sample_rate_hz: float = 1.0e6
    tone_offset_hz: float = 1.0e5
    seed: int = 1

    def __post_init__(self):
        if self.intervals < 1 or self.snapshots_per_interval < 1:
            raise ValueError("interval and snapshot counts must be at least 1")
        if self.samples_per_snapshot < 1:
            raise ValueError("samples_per_snapshot must be at least 1")
        if self.snapshot_dt_ms <= 0.0:
            raise ValueError("snapshot_dt_ms must be positive")
        if self.sample_rate_hz <= 2.0 * self.tone_offset_hz:
            raise ValueError(
                "sample_rate_hz must exceed twice tone_offset_hz to represent the tone"
            )

    @property
    def tone_amplitude(self) -> float:
        """Baseband amplitude in sqrt(mW), so |s|^2 is the tx power in mW."""
        return math.sqrt(10.0 ** (self.tx_power_dbm / 10.0))


@dataclass(frozen=True)
class FadingModel:
    """Per-snapshot jitter around the deterministic ray gains."""

    amplitude_sigma_db: float = 0.35
    phase_jitter_rad: float = math.pi
    replica_enabled: bool = False

    def __post_init__(self):
        if self.amplitude_sigma_db < 0.0 or self.phase_jitter_rad < 0.0:
            raise ValueError("fading scales must be non-negative")


@dataclass(frozen=True)
class ReceiverChain:
    """Gain, AM-to-PM and noise figure of one receive branch (all identical)."""

    chain_gain_db: float = 42.0
    am_pm_deg_per_db: float = 0.2
    reference_level_dbm: float = -62.5
    noise_enabled: bool = True
    per_element_snr_db: float = 33.0

    def __post_init__(self):
        if not math.isfinite(self.chain_gain_db):
            raise ValueError("chain_gain_db must be finite")
        if self.am_pm_deg_per_db < 0.0:
            raise ValueError("am_pm_deg_per_db must be non-negative")

    @property
    def gain_linear(self) -> float:
        return db20_to_linear(self.chain_gain_db)


@dataclass
class SnapshotRecord:
    """One measurement instant: true channel, optional IQ, recovered channel."""

    interval_id: int
    snapshot_idx: int
    time_ms: float
    true_gains: np.ndarray
    estimated_gains: np.ndarray
    iq: np.ndarray | None = None


def realize_block(ray_gains, fading: FadingModel, stream_key) -> np.ndarray:
    """One block-fading realization of the composite channel.

    ``ray_gains`` is either a single gain vector or a stack of per-ray gain
    vectors (rows). Each (ray, element) cell draws an independent log-normal
    amplitude factor and a bounded uniform phase from the stream keyed by
    (seed, interval, snapshot, element, ray); the jittered rays are then
    summed per element. Distinct snapshot keys give independent draws.
    """
    rays = np.atleast_2d(np.asarray(ray_gains, dtype=np.complex128))
    seed, interval, snapshot = stream_key
    n_rays, n_el = rays.shape
    out = np.zeros(n_el, dtype=np.complex128)
    for r in range(n_rays):
        for i in range(n_el):
            gen = rng.stream(seed, interval, snapshot, element=i, ray=r,
                             purpose=rng.PURPOSE_FADING)
            a_db = fading.amplitude_sigma_db * gen.standard_normal()
            phi = fading.phase_jitter_rad * gen.uniform(-1.0, 1.0)
            out[i] += rays[r, i] * 10.0 ** (a_db / 20.0) * complex(math.cos(phi),
                                                                   math.sin(phi))
    return out


def _ampm_phases(gains: np.ndarray, config: SnapshotConfig,
                 chain: ReceiverChain) -> np.ndarray:
    """AM-to-PM rotation per element from the pre-chain mean power."""
    phases = np.zeros(gains.shape[0])
    if chain.am_pm_deg_per_db == 0.0:
        return phases
    for i, g in enumerate(gains):
        mag = abs(g)
        if mag == 0.0:
            continue  # no signal, rotation unobservable
        p_in_dbm = config.tx_power_dbm + 20.0 * math.log10(mag)
        deg = chain.am_pm_deg_per_db * (p_in_dbm - chain.reference_level_dbm)
        phases[i] = math.radians(deg)
    return phases


def _noise_sigma(gains: np.ndarray, config: SnapshotConfig,
                 chain: ReceiverChain) -> float:
    """Per-sample complex noise std from the SNR and mean element power."""
    mean_power = float(np.mean(np.abs(gains) ** 2))
    signal_power = chain.gain_linear ** 2 * config.tone_amplitude ** 2 * mean_power
    noise_power = signal_power / 10.0 ** (chain.per_element_snr_db / 10.0)
    return math.sqrt(noise_power)


def _noise_block(gains, config, chain, stream_key) -> np.ndarray | None:
    if not chain.noise_enabled:
        return None
    sigma = _noise_sigma(gains, config, chain)
    seed, interval, snapshot = stream_key
    n_el = gains.shape[0]
    m = config.samples_per_snapshot
    noise = np.empty((n_el, m), dtype=np.complex128)
    scale = sigma / math.sqrt(2.0)
    for i in range(n_el):
        gen = rng.stream(seed, interval, snapshot, element=i,
                         purpose=rng.PURPOSE_NOISE)
        z = gen.standard_normal((2, m))
        noise[i] = scale * (z[0] + 1j * z[1])
    return noise


def _synthesize(gains, config, chain, stream_key, tone) -> np.ndarray:
    coeffs = (chain.gain_linear * gains
              * np.exp(1j * _ampm_phases(gains, config, chain)))
    noise = _noise_block(gains, config, chain, stream_key)
    return kernels.synth_iq(coeffs, tone, noise)


def synthesize_iq(gains, config: SnapshotConfig, chain: ReceiverChain,
                  stream_key) -> np.ndarray:
    """Per-element received IQ block for one snapshot.

    y_i[n] = g_chain * h_i * s[n] * exp(j phi_ampm,i) + w_i[n], where s is
    the transmitted tone and w is circular complex Gaussian noise scaled to
    the configured per-element SNR (omitted when noise is disabled).
    """
    gains = np.asarray(gains, dtype=np.complex128)
    tone = kernels.tone_samples(config.samples_per_snapshot, config.tone_offset_hz,
                                config.sample_rate_hz, config.tone_amplitude)
    return _synthesize(gains, config, chain, stream_key, tone)


def _estimate(iq, tone, tone_energy, chain) -> np.ndarray:
    if tone_energy == 0.0:
        raise DegenerateReferenceError("reference tone has zero energy")
    acc = kernels.correlate(iq, tone)
    return acc / (chain.gain_linear * tone_energy)


def estimate_gain(iq, config: SnapshotConfig, chain: ReceiverChain) -> np.ndarray:
    """Matched-filter channel estimate referenced to the antenna port.

    h_hat_i = sum_n y_i[n] conj(s[n]) / (g_chain * sum_n |s[n]|^2). Exact to
    roundoff when noise and AM-to-PM are disabled.
    """
    iq = np.asarray(iq, dtype=np.complex128)
    if iq.ndim != 2 or iq.shape[1] != config.samples_per_snapshot:
        raise ValueError(
            f"expected IQ of shape (n_elements, {config.samples_per_snapshot})"
        )
    tone = kernels.tone_samples(config.samples_per_snapshot, config.tone_offset_hz,
                                config.sample_rate_hz, config.tone_amplitude)
    energy = float(np.sum(tone.real ** 2 + tone.imag ** 2))
    return _estimate(iq, tone, energy, chain)


def simulate(scenario, layout, fading: FadingModel, chain: ReceiverChain,
             config: SnapshotConfig, *, leakage: float = 0.0, replica=None,
             element_trims_db=None, retain_iq: bool = False,
             workers: int = 1) -> list:
    """Run a full sounder campaign and return records in canonical order.

    Composes line-of-sight (plus the replica ray when enabled) into per-ray
    mean gains, then per snapshot applies block fading, synthesizes IQ and
    estimates the gains back. Output is bit-identical for identical inputs
    and seed regardless of ``workers``.
    """
    rays = [los_gains(scenario, layout, leakage)]
    if fading.replica_enabled and replica is not None:
        rays.append(replica_gains(scenario, layout, replica))
    rays = np.stack(rays)
    if element_trims_db is not None:
        trims = np.asarray([db20_to_linear(t) for t in element_trims_db])
        if trims.shape[0] != rays.shape[1]:
            raise ValueError("element_trims_db length must match element count")
        rays = rays * trims[None, :]

    tone = kernels.tone_samples(config.samples_per_snapshot, config.tone_offset_hz,
                                config.sample_rate_hz, config.tone_amplitude)
    energy = float(np.sum(tone.real ** 2 + tone.imag ** 2))

    def one(interval_id: int, snapshot_idx: int) -> SnapshotRecord:
        key = (config.seed, interval_id, snapshot_idx)
        true = realize_block(rays, fading, key)
        coeffs = (chain.gain_linear * true
                  * np.exp(1j * _ampm_phases(true, config, chain)))
        noise = _noise_block(true, config, chain, key)
        if retain_iq:
            iq = kernels.synth_iq(coeffs, tone, noise)
            acc = kernels.correlate(iq, tone)
        else:
            # Fused kernel: same arithmetic and accumulation order, so the
            # estimates match the retained-IQ path bit for bit.
            iq = None
            acc = kernels.synth_correlate(coeffs, tone, noise)
        if energy == 0.0:
            raise DegenerateReferenceError("reference tone has zero energy")
        est = acc / (chain.gain_linear * energy)
        return SnapshotRecord(
            interval_id=interval_id,
            snapshot_idx=snapshot_idx,
            time_ms=snapshot_idx * config.snapshot_dt_ms,
            true_gains=true,
            estimated_gains=est,
            iq=iq,
        )

    tasks = [(interval, snap)
             for interval in range(1, config.intervals + 1)
             for snap in range(config.snapshots_per_interval)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda t: one(*t), tasks))
    else:
        records = [one(*t) for t in tasks]
    return records
