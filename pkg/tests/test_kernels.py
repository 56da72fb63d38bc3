"""Backend-agnostic kernel contracts plus cross-backend agreement."""

import numpy as np
import pytest

from simosounder import _pykernels, kernels

try:
    from simosounder import _ckernels
except ImportError:
    _ckernels = None


def sample_inputs(seed=0, n_el=4, n_s=257):
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=n_el) + 1j * rng.normal(size=n_el)
    tone = kernels.tone_samples(n_s, 1.0e5, 1.0e6, 0.4)
    noise = (rng.normal(size=(n_el, n_s)) + 1j * rng.normal(size=(n_el, n_s))) * 0.01
    return coeffs, tone, noise


class TestToneSamples:
    def test_amplitude_and_start(self):
        s = kernels.tone_samples(64, 1.0e5, 1.0e6, 0.5)
        assert s[0] == 0.5 + 0.0j
        assert np.allclose(np.abs(s), 0.5, rtol=1e-12)

    def test_frequency(self):
        s = kernels.tone_samples(10, 1.0e5, 1.0e6, 1.0)
        k = np.arange(10)
        expected = np.exp(2j * np.pi * 0.1 * k)
        assert np.allclose(s, expected, rtol=1e-12)


class TestSynthIq:
    def test_noiseless_outer_product(self):
        coeffs, tone, _ = sample_inputs()
        y = kernels.synth_iq(coeffs, tone)
        expected = coeffs[:, None] * tone[None, :]
        assert np.allclose(y, expected, rtol=1e-13, atol=0)

    def test_noise_is_additive(self):
        coeffs, tone, noise = sample_inputs()
        clean = kernels.synth_iq(coeffs, tone)
        noisy = kernels.synth_iq(coeffs, tone, noise)
        assert np.allclose(noisy - clean, noise, atol=1e-14)

    def test_unit_coefficient_passthrough(self):
        _, tone, _ = sample_inputs()
        y = kernels.synth_iq(np.array([1.0 + 0.0j]), tone)
        assert np.array_equal(y[0], tone)


class TestCorrelate:
    def test_against_vdot_oracle(self):
        coeffs, tone, noise = sample_inputs()
        iq = kernels.synth_iq(coeffs, tone, noise)
        acc = kernels.correlate(iq, tone)
        for i in range(iq.shape[0]):
            oracle = np.vdot(tone, iq[i])  # conjugates the first argument
            assert acc[i] == pytest.approx(oracle, rel=1e-12)

    def test_matched_filter_recovers_scale(self):
        coeffs, tone, _ = sample_inputs()
        iq = kernels.synth_iq(coeffs, tone)
        energy = np.sum(np.abs(tone) ** 2)
        est = kernels.correlate(iq, tone) / energy
        assert np.allclose(est, coeffs, rtol=1e-12)


class TestSynthCorrelate:
    def test_fused_matches_two_pass_bitwise(self):
        coeffs, tone, noise = sample_inputs(seed=6, n_s=1024)
        fused = kernels.synth_correlate(coeffs, tone, noise)
        two_pass = kernels.correlate(kernels.synth_iq(coeffs, tone, noise), tone)
        assert np.array_equal(fused, two_pass)

    def test_fused_noiseless_matches_two_pass_bitwise(self):
        coeffs, tone, _ = sample_inputs(seed=7, n_s=777)
        fused = kernels.synth_correlate(coeffs, tone)
        two_pass = kernels.correlate(kernels.synth_iq(coeffs, tone), tone)
        assert np.array_equal(fused, two_pass)


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
class TestBackendAgreement:
    def test_synth_matches(self):
        coeffs, tone, noise = sample_inputs(seed=3)
        a = _ckernels.synth_iq(coeffs, tone, noise)
        b = _pykernels.synth_iq(coeffs, tone, noise)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_correlate_matches(self):
        coeffs, tone, noise = sample_inputs(seed=4, n_s=2048)
        iq = _pykernels.synth_iq(coeffs, tone, noise)
        a = _ckernels.correlate(iq, tone)
        b = _pykernels.correlate(iq, tone)
        scale = np.max(np.abs(b))
        assert np.max(np.abs(a - b)) < 1e-12 * scale

    def test_active_backend_reported(self):
        assert kernels.BACKEND == "cython"
