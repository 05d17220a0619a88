"""Hot numeric kernel: adaptive RK propagation of the covariance ODE.

Propagates ``V' = A(t) V + V A(t)^T + Q`` where the drift is a static matrix
plus a sum of counter-rotating harmonics,

    A(t) = A0 + sum_k [ Ak e^{+i w_k t} + conj(Ak) e^{-i w_k t} ],

using a Dormand-Prince 5(4) pair with PI step-size control.  Passing zero
harmonics gives the constant-drift case, which is also used by the randomized
solver cross-checks, so the per-step cost matters.

The same source is compiled with numba when available; set the environment
variable ``TMSQUEEZE_DISABLE_NUMBA=1`` to force the pure-numpy path (used by
``benchmarks/bench_kernels.py`` to compare the two).
"""

import os

import numpy as np

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# Difference between the 5th- and 4th-order weights (error estimator).
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2
STATUS_DIVERGED = 3


def _propagate_impl(A0, Are, Aim, omegas, Q, V0, t_end, rtol, atol,
                    avg_start, avg_end, nbins, bins_start, max_steps):
    """Integrate the covariance ODE on [0, t_end].

    Returns (V_end, V_avg, bin_sum, bin_time, n_steps, status) where V_avg is
    the time average of V over [avg_start, avg_end] (V_end when the window is
    empty) and bin_sum/bin_time accumulate the Frobenius norm of V over nbins
    equal bins spanning [bins_start, t_end], for boundedness diagnostics.
    """
    n = A0.shape[0]
    m = Are.shape[0]

    def drift(t):
        A = A0.copy()
        for k in range(m):
            ph = omegas[k] * t
            A += (2.0 * np.cos(ph)) * Are[k] - (2.0 * np.sin(ph)) * Aim[k]
        return A

    def rhs(t, V):
        A = drift(t)
        return A @ V + V @ A.T + Q

    V = V0.copy()
    t = 0.0
    f = rhs(t, V)

    # Initial step: curvature heuristic, capped by the fastest harmonic.
    scale0 = atol + rtol * np.abs(V)
    d0 = np.sqrt(np.mean((V / scale0) ** 2))
    d1 = np.sqrt(np.mean((f / scale0) ** 2))
    if d1 > 1e-30:
        h = 0.01 * d0 / d1
    else:
        h = 1e-6 * t_end
    if m > 0:
        wmax = np.max(np.abs(omegas))
        if wmax > 0.0:
            h = min(h, 0.2 / wmax)
    h = min(h, t_end)
    if h <= 0.0:
        h = 1e-6 * max(t_end, 1.0)

    hmin = 1e-14 * max(t_end, 1.0)
    err_prev = 1.0
    status = STATUS_MAXSTEPS
    n_steps = 0

    acc = np.zeros_like(V)
    acc_time = 0.0
    bin_sum = np.zeros(nbins)
    bin_time = np.zeros(nbins)
    bin_width = (t_end - bins_start) / nbins if nbins > 0 else 0.0

    while n_steps < max_steps:
        if t >= t_end:
            status = STATUS_OK
            break
        if h < hmin:
            status = STATUS_UNDERFLOW
            break
        if t + h > t_end:
            h = t_end - t

        k1 = f
        k2 = rhs(t + _C2 * h, V + h * (_A21 * k1))
        k3 = rhs(t + _C3 * h, V + h * (_A31 * k1 + _A32 * k2))
        k4 = rhs(t + _C4 * h, V + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = rhs(t + _C5 * h, V + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = rhs(t + h, V + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        Vn = V + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = rhs(t + h, Vn)

        E = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = atol + rtol * np.maximum(np.abs(V), np.abs(Vn))
        err = np.sqrt(np.mean((E / scale) ** 2))

        if not np.isfinite(err):
            h *= 0.1
            continue

        if err <= 1.0:
            t_new = t + h
            # Time-average accumulation (trapezoid, clipped to the window).
            if avg_end > avg_start:
                lo = max(t, avg_start)
                hi = min(t_new, avg_end)
                if hi > lo:
                    w = hi - lo
                    acc += (0.5 * w) * (V + Vn)
                    acc_time += w
            if nbins > 0 and t_new >= bins_start:
                idx = int((t_new - bins_start) / bin_width)
                if idx >= nbins:
                    idx = nbins - 1
                if idx >= 0:
                    bin_sum[idx] += np.sqrt(np.sum(Vn * Vn)) * h
                    bin_time[idx] += h
            t = t_new
            V = Vn
            f = k7
            n_steps += 1
            if np.sqrt(np.sum(V * V)) > 1e30:
                status = STATUS_DIVERGED
                break
            fac = 0.9 * err ** (-0.14) * err_prev ** 0.08 if err > 1e-300 else 5.0
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-10)
        else:
            h *= max(0.1, 0.9 * err ** (-0.2))

    if acc_time > 0.0:
        V_avg = acc / acc_time
    else:
        V_avg = V.copy()
    return V, V_avg, bin_sum, bin_time, n_steps, status


NUMBA_DISABLED = os.environ.get("TMSQUEEZE_DISABLE_NUMBA", "") not in ("", "0")

propagate_periodic_py = _propagate_impl

if NUMBA_DISABLED:
    propagate_periodic = _propagate_impl
    NUMBA_ACTIVE = False
else:
    try:
        import numba

        propagate_periodic = numba.njit(cache=True)(_propagate_impl)
        NUMBA_ACTIVE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        propagate_periodic = _propagate_impl
        NUMBA_ACTIVE = False


def run_propagation(A0, harmonics, Q, V0, t_end, rtol=1e-8, atol=1e-12,
                    avg_window=None, nbins=0, bins_start=0.0, max_steps=50_000_000,
                    force_python=False):
    """Convenience wrapper marshalling harmonics into kernel-friendly arrays.

    harmonics is a sequence of (delta_k, A_k_plus) pairs; the drift oscillates
    at e^{+2i delta_k t} (and its conjugate).
    """
    n = A0.shape[0]
    m = len(harmonics)
    Are = np.zeros((m, n, n))
    Aim = np.zeros((m, n, n))
    omegas = np.zeros(m)
    for k, (delta, Ak) in enumerate(harmonics):
        Are[k] = np.real(Ak)
        Aim[k] = np.imag(Ak)
        omegas[k] = 2.0 * delta
    if avg_window is None:
        avg_start, avg_end = 0.0, -1.0
    else:
        avg_start, avg_end = avg_window
    fn = propagate_periodic_py if force_python else propagate_periodic
    return fn(
        np.ascontiguousarray(A0, dtype=np.float64),
        Are, Aim, omegas,
        np.ascontiguousarray(Q, dtype=np.float64),
        np.ascontiguousarray(V0, dtype=np.float64),
        float(t_end), float(rtol), float(atol),
        float(avg_start), float(avg_end),
        int(nbins), float(bins_start), int(max_steps),
    )
