"""Steady state of the time-periodic (counter-rotating) covariance dynamics.

The drift A(t) = A0 + sum_k (A_k+ e^{+2i delta_k t} + A_k- e^{-2i delta_k t})
makes the long-time covariance oscillatory; the object of interest is its DC
component V0.  Harmonic balance truncated to the bare frequencies couples the
Fourier components X[w], X[w +- 2 delta_k] through a stacked (2N+1)-block
matrix Abar[w] = script_A - i w I with a frequency-independent script_A.  The
frequency integral of the central block of Abar^-1 D0 Abar^-dag is then
exactly the central block of the solution W of

    script_A W + W script_A^dag = -D0,

so V0 is obtained from one stacked Lyapunov solve instead of numerical
quadrature; the reported integration_error is the solve residual plus the
imaginary/asymmetric residue of the extracted block.  A slow time-domain
integration of the same dynamics is kept as an independent oracle.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import StepSizeUnderflow, UnstableDrift
from .gaussian import duan_quantity, mechanical_block
from .model import DriftSet, EffectiveModel, build_cr_harmonics, build_rwa_quadrature
from .numerics import (
    StabilityReport,
    golden_minimize,
    solve_lyapunov,
    solve_lyapunov_conj,
    solve_sylvester_conj,
    stability_report,
)


@dataclass(frozen=True)
class FloquetSolution:
    """DC covariance of the periodic steady state plus diagnostics."""

    V0: np.ndarray
    harmonics_out: tuple | None
    integration_error: float
    stability: StabilityReport


def _stacked_system(drift):
    """(script_A, D0, N) for the truncated frequency-coupled system."""
    A0 = np.asarray(drift.A0, dtype=complex)
    n = A0.shape[0]
    Q = np.asarray(drift.diffusion(), dtype=complex)
    N = len(drift.harmonics)
    dim = (2 * N + 1) * n
    script_A = np.zeros((dim, dim), dtype=complex)
    D0 = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(n)

    def blk(i, j):
        return slice(i * n, (i + 1) * n), slice(j * n, (j + 1) * n)

    for j in range(2 * N + 1):
        rows, cols = blk(j, j)
        D0[rows, cols] = Q
        if j < N:
            k = N - j
            delta = drift.harmonics[k - 1][0]
            script_A[rows, cols] = A0 + 2j * delta * eye
        elif j > N:
            k = j - N
            delta = drift.harmonics[k - 1][0]
            script_A[rows, cols] = A0 - 2j * delta * eye
        else:
            script_A[rows, cols] = A0
    for k in range(1, N + 1):
        _, Ap, Am = drift.harmonics[k - 1]
        Ap = np.asarray(Ap, dtype=complex)
        Am = np.asarray(Am, dtype=complex)
        rows, cols = blk(N, N - k)
        script_A[rows, cols] = Ap          # central row couples to X[w - 2 d_k]
        rows, cols = blk(N, N + k)
        script_A[rows, cols] = Am
        rows, cols = blk(N - k, N)
        script_A[rows, cols] = Am          # sideband rows couple back to X[w]
        rows, cols = blk(N + k, N)
        script_A[rows, cols] = Ap
    return script_A, D0, N


def solve_floquet(drift, tol=1e-9, want_harmonics=False):
    """DC steady-state covariance of the time-periodic system.

    With an empty harmonic list this reduces to the static Lyapunov solution.
    Raises UnstableDrift when the static part or the frequency-coupled system
    has no decaying steady state.
    """
    n = drift.A0.shape[0]
    static_rep = stability_report(drift.A0)
    if not static_rep.is_stable:
        raise UnstableDrift(
            f"static drift is not Hurwitz (abscissa {static_rep.spectral_abscissa:.3e})")
    if len(drift.harmonics) == 0:
        V0 = solve_lyapunov(np.asarray(drift.A0, dtype=float), drift.diffusion())
        return FloquetSolution(V0=V0, harmonics_out=(() if want_harmonics else None),
                               integration_error=0.0, stability=static_rep)

    script_A, D0, N = _stacked_system(drift)
    rep = stability_report(script_A)
    if not rep.is_stable:
        raise UnstableDrift(
            f"frequency-coupled system is not Hurwitz "
            f"(abscissa {rep.spectral_abscissa:.3e})")
    W = solve_lyapunov_conj(script_A, D0)
    resid = np.linalg.norm(script_A @ W + W @ script_A.conj().T + D0) \
        / max(np.linalg.norm(D0), 1e-300)
    center = slice(N * n, (N + 1) * n)
    block = W[center, center]
    imag_resid = float(np.abs(block.imag).max())
    asym_resid = float(np.abs(block - block.T).max())
    V0 = 0.5 * (block.real + block.real.T)
    err = float(resid) + imag_resid + asym_resid

    harmonics_out = None
    if want_harmonics:
        Q = np.asarray(drift.diffusion(), dtype=complex)
        eye = np.eye(script_A.shape[0], dtype=complex)
        out = []
        for k in range(1, N + 1):
            delta = drift.harmonics[k - 1][0]

            def side_block(sign):
                D = np.zeros_like(D0)
                if sign > 0:
                    D[(N - k) * n:(N - k + 1) * n, N * n:(N + 1) * n] = Q
                    D[N * n:(N + 1) * n, (N + k) * n:(N + k + 1) * n] = Q
                else:
                    D[N * n:(N + 1) * n, (N - k) * n:(N - k + 1) * n] = Q
                    D[(N + k) * n:(N + k + 1) * n, N * n:(N + 1) * n] = Q
                B = script_A + sign * 2j * delta * eye
                Wk = solve_sylvester_conj(script_A, B, D)
                return Wk[center, center]

            out.append((delta, side_block(+1), side_block(-1)))
        harmonics_out = tuple(out)
    return FloquetSolution(V0=V0, harmonics_out=harmonics_out,
                           integration_error=err, stability=rep)


def dc_covariance_by_ode(drift, horizon=None, tol=1e-7):
    """Time-domain oracle: integrate the covariance ODE and average a window.

    Starts from vacuum, lets transients decay for at least ten times the
    slowest static decay time, then averages over at least twenty periods of
    the slowest harmonic.  Deliberately slow; used to validate solve_floquet.
    Raises UnstableDrift when the covariance norm grows monotonically over
    the final fifth of the horizon.
    """
    A0 = np.asarray(drift.A0, dtype=float)
    rep = stability_report(A0)
    if not rep.is_stable:
        raise UnstableDrift("static drift is not Hurwitz")
    t_settle = 10.0 / abs(rep.spectral_abscissa)
    if drift.harmonics:
        delta_min = min(abs(h[0]) for h in drift.harmonics)
        t_avg = 20.0 * math.pi / delta_min
    else:
        t_avg = 0.1 * t_settle
    t_end = max(horizon if horizon is not None else 0.0, t_settle + t_avg)
    n = A0.shape[0]
    V0 = 0.5 * np.eye(n)
    nbins = 20
    V_end, V_avg, bin_sum, bin_time, _, status = kernels.run_propagation(
        A0, [(h[0], h[1]) for h in drift.harmonics], drift.diffusion(), V0,
        t_end, rtol=tol, atol=tol * 1e-4,
        avg_window=(t_end - t_avg, t_end), nbins=nbins, bins_start=0.8 * t_end)
    if status == kernels.STATUS_UNDERFLOW:
        raise StepSizeUnderflow("covariance propagation step underflow")
    if status == kernels.STATUS_MAXSTEPS:
        raise StepSizeUnderflow(
            "covariance propagation exhausted its step budget before the "
            "horizon; the harmonic frequencies are too fast for a direct "
            "time-domain solve at these damping rates")
    if status == kernels.STATUS_DIVERGED:
        raise UnstableDrift("covariance norm diverged")
    filled = bin_time > 0.0
    means = bin_sum[filled] / bin_time[filled]
    if len(means) >= 5 and np.all(np.diff(means) > 0.0) \
            and means[-1] > 1.05 * means[0]:
        raise UnstableDrift(
            "covariance norm grows monotonically over the final fifth of the horizon")
    return 0.5 * (V_avg + V_avg.T)


def duan_floquet(model, tol=1e-9):
    """Duan quantity of the DC mechanical state including counter-rotating terms."""
    drift = build_cr_harmonics(None, model)
    sol = solve_floquet(drift, tol=tol)
    return duan_quantity(mechanical_block(sol.V0))


def duan_rwa(model):
    """Duan quantity of the rotating-wave steady state."""
    drift = build_rwa_quadrature(model)
    V = solve_lyapunov(drift.A0, drift.diffusion())
    return duan_quantity(mechanical_block(V))


def sweep_cooperativity_floquet(C_values, *, nbar=0.0, gamma_over_kappa=4e-5,
                                Omega_over_kappa=0.1, omega_m_over_kappa=None,
                                asym_tol=1e-3, asym_range=(0.0, 0.99995)):
    """Optimized two-mode squeezing against cooperativity.

    For each cooperativity the Duan quantity is minimized over the drive
    asymmetry by golden section; omega_m_over_kappa selects the two-tone
    counter-rotating model (None means rotating-wave).  Returns a list of
    (C_minus, best_asymmetry, duan_min, tms_db) rows with
    tms_db = -log10(duan_min / 1) relative to the vacuum reference.
    """
    rows = []
    for C in C_values:
        def duan_of(asym):
            if asym <= 0.0:
                asym = 0.0
            try:
                m = EffectiveModel.from_ratios(
                    asym, C, Omega_over_kappa=Omega_over_kappa,
                    gamma_over_kappa=gamma_over_kappa, nbar=nbar,
                    drive_variant=("two_tone" if omega_m_over_kappa else None),
                    omega_m_over_kappa=omega_m_over_kappa)
                if omega_m_over_kappa is None:
                    return duan_rwa(m)
                return duan_floquet(m)
            except UnstableDrift:
                return float("inf")

        best_x, best_f = golden_minimize(duan_of, asym_range[0], asym_range[1],
                                         xtol=asym_tol * 0.1)
        rows.append((float(C), float(best_x), float(best_f),
                     -math.log10(best_f)))
    return rows
