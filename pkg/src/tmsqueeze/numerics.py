"""Dense linear-algebra and integration primitives.

Continuous Lyapunov solves, a matrix-valued linear ODE integrator, stability
reports, adaptive 1-D quadrature, and a golden-section minimizer.  Everything
here is a pure function of its inputs.
"""

from dataclasses import dataclass
import heapq
import math

import numpy as np

from .errors import (
    DimensionMismatch,
    NonConvergent,
    SingularSystem,
    StepSizeUnderflow,
    UnstableDrift,
)
from . import kernels


@dataclass(frozen=True)
class StabilityReport:
    """Spectral abscissa of a drift matrix and the resulting stability verdict."""

    spectral_abscissa: float
    is_stable: bool


def stability_report(A):
    """Max real part of the eigenvalues of A, with a scale-aware margin.

    A matrix counts as stable only if its abscissa is below -1e-12 * ||A||,
    which separates genuinely damped systems from marginal (purely rotating)
    ones at double precision.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    abscissa = float(np.max(np.linalg.eigvals(A).real))
    margin = 1e-12 * float(np.linalg.norm(A, 2))
    return StabilityReport(spectral_abscissa=abscissa, is_stable=abscissa < -margin)


def solve_lyapunov(A, Q):
    """Solve A V + V A^T = -Q for the steady-state covariance V.

    The equation is vectorized into an n^2 x n^2 linear system; at the matrix
    sizes used here (n <= 8 for the model, a few tens for stacked systems)
    this is cheap and allows one step of iterative refinement, which keeps the
    residual at the round-off floor.  Works for real or complex A with the
    same transpose (not conjugate) semantics.
    """
    A = np.asarray(A)
    Q = np.asarray(Q)
    n = A.shape[0]
    if A.shape != (n, n) or Q.shape != (n, n):
        raise DimensionMismatch(f"incompatible shapes {A.shape} and {Q.shape}")
    rep = stability_report(A)
    if not rep.is_stable:
        raise UnstableDrift(
            f"drift matrix is not Hurwitz (spectral abscissa {rep.spectral_abscissa:.3e})"
        )

    eye = np.eye(n)
    M = np.kron(A, eye) + np.kron(eye, A)
    try:
        v = np.linalg.solve(M, -Q.reshape(-1))
        V = v.reshape(n, n)
        resid = A @ V + V @ A.T + Q
        dv = np.linalg.solve(M, -resid.reshape(-1))
        V = V + dv.reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"vectorized Lyapunov system is singular: {exc}") from exc
    V = 0.5 * (V + V.T)
    if np.isrealobj(A) and np.isrealobj(Q):
        V = V.real
    return V


def solve_lyapunov_conj(A, Q):
    """Solve A V + V A^H = -Q (conjugate-transpose form) for Hermitian V.

    Used for stacked frequency-coupled systems, where A may be a few tens of
    rows wide; the solve goes through the Schur-based Sylvester routine rather
    than vectorization to keep large sweeps fast.
    """
    from scipy.linalg import solve_sylvester

    A = np.asarray(A, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    rep = stability_report(A)
    if not rep.is_stable:
        raise UnstableDrift(
            f"stacked drift matrix is not Hurwitz (spectral abscissa {rep.spectral_abscissa:.3e})"
        )
    V = solve_sylvester(A, A.conj().T, -Q)
    return 0.5 * (V + V.conj().T)


def solve_sylvester_conj(A, B, Q):
    """Solve A W + W B^H = -Q (cross-covariance companion of the above)."""
    from scipy.linalg import solve_sylvester

    return solve_sylvester(np.asarray(A, dtype=complex),
                           np.asarray(B, dtype=complex).conj().T,
                           -np.asarray(Q, dtype=complex))


def integrate_lyapunov_ode(A_of_t, Q, V_init, t_end, tol=1e-8, max_steps=2_000_000):
    """Integrate V' = A(t) V + V A(t)^T + Q from V(0) = V_init up to t_end.

    A_of_t may be a callable t -> matrix or a constant matrix.  Returns the
    trajectory as (times, values) with values[k] the covariance at times[k],
    sampled at the accepted steps of the adaptive Dormand-Prince integrator.
    Raises StepSizeUnderflow when the controller cannot meet tol.
    """
    Q = np.asarray(Q, dtype=float)
    V = np.asarray(V_init, dtype=float).copy()
    n = V.shape[0]
    if Q.shape != (n, n):
        raise DimensionMismatch(f"Q shape {Q.shape} does not match V {V.shape}")

    if callable(A_of_t):
        A_eval = A_of_t
    else:
        A_const = np.asarray(A_of_t, dtype=float)

        def A_eval(t):
            return A_const

    rtol = tol
    atol = tol * 1e-4

    def rhs(t, V):
        A = np.asarray(A_eval(t), dtype=float)
        return A @ V + V @ A.T + Q

    t = 0.0
    f = rhs(t, V)
    scale0 = atol + rtol * np.abs(V)
    d0 = math.sqrt(float(np.mean((V / scale0) ** 2)))
    d1 = math.sqrt(float(np.mean((f / scale0) ** 2)))
    h = 0.01 * d0 / d1 if d1 > 1e-30 else 1e-6 * t_end
    h = min(max(h, 1e-12 * t_end), t_end)
    hmin = 1e-14 * max(t_end, 1.0)

    times = [0.0]
    values = [V.copy()]
    err_prev = 1.0
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            raise StepSizeUnderflow(f"exceeded {max_steps} steps before t_end")
        if h < hmin:
            raise StepSizeUnderflow(f"step size underflow at t={t:.6e}")
        if t + h > t_end:
            h = t_end - t
        k1 = f
        k2 = rhs(t + kernels._C2 * h, V + h * (kernels._A21 * k1))
        k3 = rhs(t + kernels._C3 * h, V + h * (kernels._A31 * k1 + kernels._A32 * k2))
        k4 = rhs(t + kernels._C4 * h,
                 V + h * (kernels._A41 * k1 + kernels._A42 * k2 + kernels._A43 * k3))
        k5 = rhs(t + kernels._C5 * h,
                 V + h * (kernels._A51 * k1 + kernels._A52 * k2 + kernels._A53 * k3
                          + kernels._A54 * k4))
        k6 = rhs(t + h,
                 V + h * (kernels._A61 * k1 + kernels._A62 * k2 + kernels._A63 * k3
                          + kernels._A64 * k4 + kernels._A65 * k5))
        Vn = V + h * (kernels._B1 * k1 + kernels._B3 * k3 + kernels._B4 * k4
                      + kernels._B5 * k5 + kernels._B6 * k6)
        k7 = rhs(t + h, Vn)
        E = h * (kernels._E1 * k1 + kernels._E3 * k3 + kernels._E4 * k4
                 + kernels._E5 * k5 + kernels._E6 * k6 + kernels._E7 * k7)
        sc = atol + rtol * np.maximum(np.abs(V), np.abs(Vn))
        err = math.sqrt(float(np.mean((E / sc) ** 2)))
        if not math.isfinite(err):
            h *= 0.1
            continue
        if err <= 1.0:
            t += h
            V = Vn
            f = k7
            times.append(t)
            values.append(V.copy())
            fac = 0.9 * err ** (-0.14) * err_prev ** 0.08 if err > 1e-300 else 5.0
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-10)
            steps += 1
        else:
            h *= max(0.1, 0.9 * err ** (-0.2))
    return np.array(times), np.array(values)


def propagate_constant(A, Q, V_init, t_end, rtol=1e-9, atol=1e-13):
    """Endpoint V(t_end) of the constant-drift covariance ODE (hot path).

    Same stepper as integrate_lyapunov_ode but without trajectory storage,
    running through the compiled kernel.
    """
    V_end, _, _, _, _, status = kernels.run_propagation(
        np.asarray(A, dtype=float), [], np.asarray(Q, dtype=float),
        np.asarray(V_init, dtype=float), t_end, rtol=rtol, atol=atol)
    if status == kernels.STATUS_UNDERFLOW:
        raise StepSizeUnderflow("step size underflow in constant-drift propagation")
    if status != kernels.STATUS_OK:
        raise NonConvergent(f"propagation ended with status {status}")
    return V_end


# 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
_XK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
])


def _gk15(f, a, b):
    """Gauss-Kronrod 15(7) estimate of the integral of f over [a, b]."""
    c = 0.5 * (a + b)
    hw = 0.5 * (b - a)
    fc = f(c)
    ik = _WK[7] * fc
    ig = _WG[3] * fc
    for j in range(7):
        x = hw * _XK[j]
        fsum = f(c - x) + f(c + x)
        ik += _WK[j] * fsum
        if j % 2 == 1:
            ig += _WG[j // 2] * fsum
    ik *= hw
    ig *= hw
    return ik, abs(ik - ig)


def integrate_1d(f, domain, tol=1e-8, points=()):
    """Adaptive quadrature of a scalar function over a possibly infinite domain.

    Infinite endpoints are truncated at a cutoff chosen so that the assumed
    C/w^2 tail contributes less than tol/10 per side, with C estimated from
    |f(w)| w^2 on a geometric ladder of probe points.  The finite interval is
    then split at the probe/user points and refined by bisection with a
    15-point Kronrod rule until the summed error estimate is below tol.
    """
    lo, hi = domain
    if not lo < hi:
        raise DimensionMismatch(f"empty integration domain ({lo}, {hi})")

    edges = set(p for p in points if lo < p < hi)

    def tail_cut(sign, anchor):
        base = max(1.0, abs(anchor))
        C = 0.0
        w = base
        for _ in range(60):
            C = max(C, abs(f(sign * w)) * w * w)
            edges.add(sign * w)
            w *= 2.0
            if w > 1e15:
                break
        cut = max(10.0 * C / tol, 4.0 * base)
        return sign * min(cut, 1e15)

    finite = [p for p in (lo, hi) if math.isfinite(p)]
    anchor = max(abs(p) for p in finite) if finite else 1.0
    for p in points:
        anchor = max(anchor, abs(p))
    if not math.isfinite(lo):
        lo = tail_cut(-1.0, anchor)
    if not math.isfinite(hi):
        hi = tail_cut(+1.0, anchor)
    edges = sorted(e for e in edges if lo < e < hi)
    knots = [lo] + edges + [hi]

    total = 0.0
    heap = []
    count = 0
    for a, b in zip(knots[:-1], knots[1:]):
        val, err = _gk15(f, a, b)
        total += val
        heapq.heappush(heap, (-err, count, a, b, val))
        count += 1

    err_total = sum(-item[0] for item in heap)
    evals = 15 * len(heap)
    max_evals = 600_000
    span = hi - lo
    while err_total > tol:
        if evals > max_evals:
            raise NonConvergent(
                f"quadrature stalled: error {err_total:.3e} > tol {tol:.3e} "
                f"after {evals} evaluations")
        neg_err, _, a, b, val = heapq.heappop(heap)
        if (b - a) < 1e-15 * span:
            raise NonConvergent(f"quadrature interval underflow near {a!r}")
        mid = 0.5 * (a + b)
        v1, e1 = _gk15(f, a, mid)
        v2, e2 = _gk15(f, mid, b)
        total += v1 + v2 - val
        err_total += e1 + e2 - (-neg_err)
        heapq.heappush(heap, (-e1, count, a, mid, v1))
        count += 1
        heapq.heappush(heap, (-e2, count, mid, b, v2))
        count += 1
        evals += 30
    return total


def golden_minimize(fun, lo, hi, xtol=1e-6):
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = c if fc < fd else d
    return x, min(fc, fd)
