#!/usr/bin/env python3
"""Benchmark the compiled covariance-ODE kernel against the numpy fallback.

The kernel propagates V' = A(t) V + V A(t)^T + Q for a periodically driven
drift; it dominates the runtime of the time-domain oracle.  Run:

    python3 benchmarks/bench_kernels.py

The same comparison can be forced package-wide by setting
TMSQUEEZE_DISABLE_NUMBA=1 before importing tmsqueeze.
"""

import time

import numpy as np

from tmsqueeze import kernels
from tmsqueeze.model import EffectiveModel, build_cr_harmonics


def case(omega_m, horizon):
    model = EffectiveModel.from_ratios(
        0.5, 40.0, gamma_over_kappa=0.02, nbar=0.5,
        drive_variant="two_tone", omega_m_over_kappa=omega_m)
    drift = build_cr_harmonics(None, model)
    harmonics = [(h[0], h[1]) for h in drift.harmonics]
    return drift.A0, harmonics, drift.diffusion(), horizon


def run(A0, harmonics, Q, horizon, force_python):
    V0 = 0.5 * np.eye(A0.shape[0])
    t0 = time.perf_counter()
    V, _, _, _, n_steps, status = kernels.run_propagation(
        A0, harmonics, Q, V0, horizon, rtol=1e-8, atol=1e-12,
        force_python=force_python)
    dt = time.perf_counter() - t0
    assert status == kernels.STATUS_OK
    return dt, n_steps, V


def main():
    print(f"numba active: {kernels.NUMBA_ACTIVE}")
    cases = [("omega_m = 5 kappa,  T = 500/kappa", case(5.0, 500.0)),
             ("omega_m = 20 kappa, T = 500/kappa", case(20.0, 500.0))]
    # trigger compilation outside the timed region
    run(*cases[0][1], force_python=False)
    print(f"{'case':38s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s} {'steps':>8s}")
    for label, args in cases:
        t_jit, steps, V_jit = run(*args, force_python=False)
        t_py, _, V_py = run(*args, force_python=True)
        assert np.abs(V_jit - V_py).max() < 1e-9
        print(f"{label:38s} {t_jit:9.3f}s {t_py:9.3f}s {t_py / t_jit:7.1f}x {steps:8d}")


if __name__ == "__main__":
    main()
