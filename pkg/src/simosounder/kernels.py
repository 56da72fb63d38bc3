"""Backend dispatch for the IQ hot loops.

The compiled Cython extension is preferred when it was built; otherwise the
numpy fallback is used. Both backends implement the same contracts and agree
to floating-point roundoff; ``BACKEND`` records which one is active.
``benchmarks/bench_kernels.py`` compares their throughput.
"""

import numpy as np

try:
    from . import _ckernels
    BACKEND = "cython"
except ImportError:
    _ckernels = None
    BACKEND = "python"

from . import _pykernels

_impl = _ckernels if _ckernels is not None else _pykernels


def tone_samples(n_samples: int, tone_offset_hz: float, sample_rate_hz: float,
                 amplitude: float) -> np.ndarray:
    """Complex baseband single tone s[n] = A exp(j 2 pi f0 n / fs)."""
    n = np.arange(n_samples)
    return amplitude * np.exp(2j * np.pi * (tone_offset_hz / sample_rate_hz) * n)


def synth_iq(coeffs, tone, noise=None) -> np.ndarray:
    """Received IQ block: one row per element, one column per sample."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    tone = np.ascontiguousarray(tone, dtype=np.complex128)
    if noise is not None:
        noise = np.ascontiguousarray(noise, dtype=np.complex128)
    return _impl.synth_iq(coeffs, tone, noise)


def correlate(iq, tone) -> np.ndarray:
    """Per-element correlation of received IQ against the reference tone."""
    iq = np.ascontiguousarray(iq, dtype=np.complex128)
    tone = np.ascontiguousarray(tone, dtype=np.complex128)
    return _impl.correlate(iq, tone)


def synth_correlate(coeffs, tone, noise=None) -> np.ndarray:
    """Correlations of the synthesized block without keeping the block.

    Result is bit-identical to ``correlate(synth_iq(...), tone)`` on either
    backend; the compiled one skips the intermediate array entirely.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    tone = np.ascontiguousarray(tone, dtype=np.complex128)
    if noise is not None:
        noise = np.ascontiguousarray(noise, dtype=np.complex128)
    return _impl.synth_correlate(coeffs, tone, noise)
