"""Capacity and gain metrics for a one-transmitter, N-receiver link.

Everything here is a pure function over short complex gain vectors. Base-2
logarithms are evaluated as natural-log ratios via log1p for accuracy at
small SNR, and element sums use math.fsum so that reordering the receive
elements cannot change a result.
"""

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


class InvalidGainError(ValueError):
    """Gain vector is empty or contains a non-finite component."""


class UndefinedRatioError(ValueError):
    """Normalized capacity is 0/0 (all-zero gains or zero SNR)."""


class ReferenceZeroError(ValueError):
    """Gain ratios are undefined because the reference element is zero."""


def db10_to_linear(db: float) -> float:
    """dB power ratio to linear power ratio."""
    return 10.0 ** (db / 10.0)


def linear_to_db10(x: float) -> float:
    """Linear power ratio to dB (x must be > 0)."""
    return 10.0 * math.log10(x)


def db20_to_linear(db: float) -> float:
    """dB amplitude ratio to linear amplitude ratio."""
    return 10.0 ** (db / 20.0)


def linear_to_db20(x: float) -> float:
    """Linear amplitude ratio to dB (x must be > 0)."""
    return 20.0 * math.log10(x)


@dataclass(frozen=True)
class GainVector:
    """Ordered complex voltage gains, one per receive element (1-indexed)."""

    gains: tuple

    def __post_init__(self):
        gains = tuple(complex(g) for g in self.gains)
        if len(gains) < 1:
            raise InvalidGainError("gain vector needs at least one element")
        for i, g in enumerate(gains, start=1):
            if not (math.isfinite(g.real) and math.isfinite(g.imag)):
                raise InvalidGainError(f"gain of element {i} is not finite: {g!r}")
        object.__setattr__(self, "gains", gains)

    def __len__(self):
        return len(self.gains)

    def __iter__(self):
        return iter(self.gains)

    def magnitudes(self) -> tuple:
        return tuple(abs(g) for g in self.gains)


@dataclass(frozen=True)
class Snr:
    """Per-element signal-to-noise ratio as a linear power ratio."""

    rho: float

    def __post_init__(self):
        rho = float(self.rho)
        if not math.isfinite(rho) or rho < 0.0:
            raise ValueError(f"SNR must be a finite non-negative ratio, got {rho!r}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(db10_to_linear(db))

    @property
    def db(self) -> float:
        if self.rho <= 0.0:
            raise ValueError("dB value undefined for zero SNR")
        return linear_to_db10(self.rho)


@dataclass(frozen=True)
class GainRatioVector:
    """Element gain magnitudes normalized by element 1 (ratios[0] is 1)."""

    ratios: tuple

    @property
    def db(self) -> tuple:
        """20 log10 view; zero ratios map to -inf."""
        return tuple(
            linear_to_db20(r) if r > 0.0 else -math.inf for r in self.ratios
        )


def _as_gains(h) -> tuple:
    if isinstance(h, GainVector):
        return h.gains
    return GainVector(tuple(h)).gains


def _as_rho(rho) -> float:
    if isinstance(rho, Snr):
        return rho.rho
    return Snr(float(rho)).rho


def capacity(h, rho) -> float:
    """Spectral efficiency in bps/Hz of the combined receive channel.

    Uses the closed form log2(1 + rho * sum |h_i|^2), which for a single
    transmit antenna equals the log-determinant of I + rho * h^H h.
    """
    gains = _as_gains(h)
    r = _as_rho(rho)
    total = math.fsum(g.real * g.real + g.imag * g.imag for g in gains)
    return math.log1p(r * total) / LN2


def capacity_det_oracle(h, rho) -> float:
    """Slow reference: capacity via the explicit N x N determinant.

    Kept alongside the closed form as an independent cross-check; tests
    assert the two agree to 1e-9 absolute.
    """
    gains = np.asarray(_as_gains(h), dtype=np.complex128)
    r = _as_rho(rho)
    n = gains.shape[0]
    m = np.eye(n, dtype=np.complex128) + r * np.outer(np.conj(gains), gains)
    det = np.linalg.det(m)
    return math.log(det.real) / LN2


def normalized_capacity(h, rho) -> float:
    """Combined capacity over the mean of the N single-element capacities.

    Lies in (1, N]; equals N exactly when only one element is active and
    approaches N as rho -> 0.
    """
    gains = _as_gains(h)
    r = _as_rho(rho)
    powers = [g.real * g.real + g.imag * g.imag for g in gains]
    if r == 0.0 or not any(p > 0.0 for p in powers):
        raise UndefinedRatioError(
            "normalized capacity is 0/0 for zero SNR or an all-zero gain vector"
        )
    combined = math.log1p(r * math.fsum(powers)) / LN2
    mean_single = math.fsum(math.log1p(r * p) / LN2 for p in powers) / len(powers)
    return combined / mean_single


def gain_ratios(h) -> GainRatioVector:
    """Per-element |h_i| / |h_1| with element 1 pinned to exactly 1."""
    gains = _as_gains(h)
    ref = abs(gains[0])
    if ref == 0.0:
        raise ReferenceZeroError("element 1 has zero gain; ratios undefined")
    ratios = (1.0,) + tuple(abs(g) / ref for g in gains[1:])
    return GainRatioVector(ratios)


def rss_dbm(h_i: complex, tx_power_dbm: float) -> float:
    """Received signal strength in dBm for one element at the antenna port.

    Returns -inf when the gain magnitude is zero; file writers translate
    that sentinel into a below-noise-floor marker rather than emitting a
    float infinity.
    """
    g = complex(h_i)
    if not (math.isfinite(g.real) and math.isfinite(g.imag)):
        raise InvalidGainError(f"gain is not finite: {h_i!r}")
    mag = abs(g)
    if mag == 0.0:
        return -math.inf
    return tx_power_dbm + linear_to_db20(mag)
