"""Pure-numpy implementations of the IQ inner loops.

Fallback used when the compiled extension is unavailable; same call
signatures as ``_ckernels``.
"""

import numpy as np


def synth_iq(coeffs, tone, noise):
    """y[i, n] = coeffs[i] * tone[n] (+ noise[i, n])."""
    y = coeffs[:, None] * tone[None, :]
    if noise is not None:
        y += noise
    return y


def correlate(iq, tone):
    """Per-element sum over samples of iq[i, n] * conj(tone[n])."""
    return iq @ np.conj(tone)


def synth_correlate(coeffs, tone, noise):
    """Fused synth + correlate; trivially the two-pass composition here."""
    return correlate(synth_iq(coeffs, tone, noise), tone)
