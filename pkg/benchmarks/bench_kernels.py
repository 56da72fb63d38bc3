#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-numpy IQ kernels.

Times the two hot loops (block synthesis and matched-filter correlation)
on workloads shaped like the default campaign (200 snapshots) and the
Monte-Carlo estimator study (10^4 snapshots). Usage:

    python3 benchmarks/bench_kernels.py [--snapshots N] [--repeats R]
"""

import argparse
import time

import numpy as np

from simosounder import _pykernels
from simosounder.kernels import tone_samples

try:
    from simosounder import _ckernels
except ImportError:
    _ckernels = None

N_ELEMENTS = 4
N_SAMPLES = 1024


def workload(n_snapshots, seed=0):
    rng = np.random.default_rng(seed)
    tone = tone_samples(N_SAMPLES, 1.0e5, 1.0e6, 0.398)
    coeffs = rng.normal(size=(n_snapshots, N_ELEMENTS)) \
        + 1j * rng.normal(size=(n_snapshots, N_ELEMENTS))
    noise = (rng.normal(size=(N_ELEMENTS, N_SAMPLES))
             + 1j * rng.normal(size=(N_ELEMENTS, N_SAMPLES))) * 1e-3
    return tone, np.ascontiguousarray(coeffs), np.ascontiguousarray(noise)


def run_two_pass(impl, tone, coeffs, noise):
    acc = 0.0 + 0.0j
    for k in range(coeffs.shape[0]):
        iq = impl.synth_iq(coeffs[k], tone, noise)
        acc += impl.correlate(iq, tone)[0]
    return acc


def run_fused(impl, tone, coeffs, noise):
    acc = 0.0 + 0.0j
    for k in range(coeffs.shape[0]):
        acc += impl.synth_correlate(coeffs[k], tone, noise)[0]
    return acc


def time_backend(fn, impl, tone, coeffs, noise, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(impl, tone, coeffs, noise)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--snapshots", type=int, nargs="*",
                        default=[200, 10_000])
    args = parser.parse_args()

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.insert(0, ("cython", _ckernels))
    else:
        print("note: compiled extension not available; timing numpy fallback only")

    modes = (("two-pass", run_two_pass), ("fused", run_fused))
    print(f"{'snapshots':>10} {'mode':>9} {'backend':>8} {'time':>10} "
          f"{'per-snap':>10} {'speedup':>8}")
    for n in args.snapshots:
        tone, coeffs, noise = workload(n)
        for mode_name, fn in modes:
            results = {}
            for name, impl in backends:
                results[name] = time_backend(fn, impl, tone, coeffs, noise,
                                             args.repeats)
            base = results.get("python")
            for name, _ in backends:
                t = results[name]
                speedup = (f"{base / t:6.2f}x" if base and name != "python"
                           else "      -")
                print(f"{n:>10} {mode_name:>9} {name:>8} {t * 1e3:>8.1f}ms "
                      f"{t / n * 1e6:>8.1f}us {speedup:>8}")

    # Agreement spot check between the two implementations.
    if _ckernels is not None:
        tone, coeffs, noise = workload(8, seed=1)
        for k in range(coeffs.shape[0]):
            a = _ckernels.correlate(_ckernels.synth_iq(coeffs[k], tone, noise), tone)
            b = _pykernels.correlate(_pykernels.synth_iq(coeffs[k], tone, noise), tone)
            assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(b))
        print("backend agreement: max relative difference < 1e-12")


if __name__ == "__main__":
    main()
