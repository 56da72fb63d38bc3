# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled inner loops for IQ synthesis and matched-filter correlation.

Complex arrays are processed through float64 views (interleaved re/im) so
the hot loops stay in plain double arithmetic that the C compiler can
vectorize, rather than calling the libm complex-multiply helpers.
"""

import numpy as np


def synth_iq(coeffs, tone, noise):
    """y[i, n] = coeffs[i] * tone[n] (+ noise[i, n])."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    tone = np.ascontiguousarray(tone, dtype=np.complex128)
    cdef Py_ssize_t n_el = coeffs.shape[0]
    cdef Py_ssize_t n_s = tone.shape[0]
    out_arr = np.empty((n_el, n_s), dtype=np.complex128)

    cdef const double[::1] c = coeffs.view(np.float64)
    cdef const double[::1] s = tone.view(np.float64)
    cdef double[:, ::1] y = out_arr.view(np.float64)
    cdef const double[:, ::1] w
    cdef Py_ssize_t i, n
    cdef double cr, ci, sr, si

    if noise is None:
        for i in range(n_el):
            cr = c[2 * i]
            ci = c[2 * i + 1]
            for n in range(n_s):
                sr = s[2 * n]
                si = s[2 * n + 1]
                y[i, 2 * n] = cr * sr - ci * si
                y[i, 2 * n + 1] = cr * si + ci * sr
    else:
        noise = np.ascontiguousarray(noise, dtype=np.complex128)
        w = noise.view(np.float64)
        for i in range(n_el):
            cr = c[2 * i]
            ci = c[2 * i + 1]
            for n in range(n_s):
                sr = s[2 * n]
                si = s[2 * n + 1]
                y[i, 2 * n] = cr * sr - ci * si + w[i, 2 * n]
                y[i, 2 * n + 1] = cr * si + ci * sr + w[i, 2 * n + 1]
    return out_arr


def synth_correlate(coeffs, tone, noise):
    """Fused synth_iq + correlate without materializing the IQ block.

    Bit-identical to ``correlate(synth_iq(coeffs, tone, noise), tone)``:
    the per-sample values and the accumulation order are the same, the
    intermediate block just never touches memory.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    tone = np.ascontiguousarray(tone, dtype=np.complex128)
    cdef Py_ssize_t n_el = coeffs.shape[0]
    cdef Py_ssize_t n_s = tone.shape[0]
    out_arr = np.empty(n_el, dtype=np.complex128)

    cdef const double[::1] c = coeffs.view(np.float64)
    cdef const double[::1] s = tone.view(np.float64)
    cdef double[::1] out = out_arr.view(np.float64)
    cdef const double[:, ::1] w
    cdef Py_ssize_t i, n
    cdef double cr, ci, sr, si, yr, yi, acc_re, acc_im

    if noise is None:
        for i in range(n_el):
            cr = c[2 * i]
            ci = c[2 * i + 1]
            acc_re = 0.0
            acc_im = 0.0
            for n in range(n_s):
                sr = s[2 * n]
                si = s[2 * n + 1]
                yr = cr * sr - ci * si
                yi = cr * si + ci * sr
                acc_re += yr * sr + yi * si
                acc_im += yi * sr - yr * si
            out[2 * i] = acc_re
            out[2 * i + 1] = acc_im
    else:
        noise = np.ascontiguousarray(noise, dtype=np.complex128)
        w = noise.view(np.float64)
        for i in range(n_el):
            cr = c[2 * i]
            ci = c[2 * i + 1]
            acc_re = 0.0
            acc_im = 0.0
            for n in range(n_s):
                sr = s[2 * n]
                si = s[2 * n + 1]
                yr = cr * sr - ci * si + w[i, 2 * n]
                yi = cr * si + ci * sr + w[i, 2 * n + 1]
                acc_re += yr * sr + yi * si
                acc_im += yi * sr - yr * si
            out[2 * i] = acc_re
            out[2 * i + 1] = acc_im
    return out_arr


def correlate(iq, tone):
    """Per-element sum over samples of iq[i, n] * conj(tone[n])."""
    iq = np.ascontiguousarray(iq, dtype=np.complex128)
    tone = np.ascontiguousarray(tone, dtype=np.complex128)
    cdef Py_ssize_t n_el = iq.shape[0]
    cdef Py_ssize_t n_s = tone.shape[0]
    out_arr = np.empty(n_el, dtype=np.complex128)

    cdef const double[:, ::1] y = iq.view(np.float64)
    cdef const double[::1] s = tone.view(np.float64)
    cdef double[::1] out = out_arr.view(np.float64)
    cdef Py_ssize_t i, n
    cdef double acc_re, acc_im, yr, yi, sr, si

    for i in range(n_el):
        acc_re = 0.0
        acc_im = 0.0
        for n in range(n_s):
            yr = y[i, 2 * n]
            yi = y[i, 2 * n + 1]
            sr = s[2 * n]
            si = s[2 * n + 1]
            acc_re += yr * sr + yi * si
            acc_im += yi * sr - yr * si
        out[2 * i] = acc_re
        out[2 * i + 1] = acc_im
    return out_arr
