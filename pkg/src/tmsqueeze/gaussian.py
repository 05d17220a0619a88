"""Gaussian-state metrics on symmetrically-ordered covariance matrices.

Quadratures follow X = (s + s^dag)/sqrt(2), P = -i(s - s^dag)/sqrt(2), so the
vacuum variance is 1/2.  Two-mode covariance matrices use the ordered basis
(X_a, P_a, X_b, P_b); the three-mode variants append (X_c, P_c).
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionMismatch, NotTTMSSLike, UnphysicalState

_SZ = np.diag([1.0, -1.0])


def symplectic_form(n_modes):
    """Block-diagonal symplectic form for the (X1, P1, X2, P2, ...) ordering."""
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), J)


def symplectic_eigenvalues(V):
    """Symplectic spectrum of a covariance matrix (>= 1/2 for physical states)."""
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    if V.ndim != 2 or V.shape[1] != n or n % 2:
        raise DimensionMismatch(f"covariance matrix must be 2n x 2n, got {V.shape}")
    ev = np.linalg.eigvals(1j * symplectic_form(n // 2) @ V)
    return np.sort(np.abs(ev.real))[::2].copy()


def check_physical(V, tol=1e-9):
    """Raise UnphysicalState unless V is symmetric and satisfies uncertainty."""
    V = np.asarray(V, dtype=float)
    scale = max(1.0, float(np.abs(V).max()))
    if np.abs(V - V.T).max() > 1e-8 * scale:
        raise UnphysicalState("covariance matrix is not symmetric")
    nu = symplectic_eigenvalues(V)
    if nu.min() < 0.5 - tol:
        raise UnphysicalState(
            f"uncertainty violated: min symplectic eigenvalue {nu.min():.12g} < 1/2")
    return V


def _require_two_mode(V):
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 two-mode covariance, got {V.shape}")
    return V


def mechanical_block(V):
    """Two-mode (a, b) block of a three-mode covariance matrix."""
    V = np.asarray(V, dtype=float)
    if V.shape != (6, 6):
        raise DimensionMismatch(f"expected a 6x6 three-mode covariance, got {V.shape}")
    return V[:4, :4].copy()


def duan_quantity(V):
    """<X_+^2> + <P_-^2> with X_+ = (X_a + X_b)/sqrt(2), P_- = (P_a - P_b)/sqrt(2).

    Values below 1 certify inseparability of the two modes.
    """
    V = _require_two_mode(V)
    xp = 0.5 * (V[0, 0] + V[2, 2] + 2.0 * V[0, 2])
    pm = 0.5 * (V[1, 1] + V[3, 3] - 2.0 * V[1, 3])
    return float(xp + pm)


def collective_second_moments(V):
    """(<X_+^2>, <P_+^2>, <X_-^2>, <P_-^2>) of a two-mode covariance."""
    V = _require_two_mode(V)
    xp = 0.5 * (V[0, 0] + V[2, 2] + 2.0 * V[0, 2])
    xm = 0.5 * (V[0, 0] + V[2, 2] - 2.0 * V[0, 2])
    pp = 0.5 * (V[1, 1] + V[3, 3] + 2.0 * V[1, 3])
    pm = 0.5 * (V[1, 1] + V[3, 3] - 2.0 * V[1, 3])
    return float(xp), float(pp), float(xm), float(pm)


def log_negativity(V):
    """Logarithmic negativity from the partial-transpose symplectic spectrum.

    Equals max{0, -ln 2 eta} with eta^2 = (Sigma - sqrt(Sigma^2 - 4 det V))/2
    and Sigma = det V_a + det V_b - 2 det V_ab, but is evaluated through the
    Hermitian similarity i V~^(1/2) J V~^(1/2) of the partially transposed
    covariance V~, which stays accurate at degenerate symplectic spectra
    (the determinant form loses half the working precision at the
    separability boundary).
    """
    V = _require_two_mode(V)
    if float(np.linalg.det(V)) < 0.0:
        raise UnphysicalState("det V < 0")
    check_physical(V)
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    Vt = flip @ V @ flip
    evals, U = np.linalg.eigh(Vt)
    if evals.min() <= 0.0:
        raise UnphysicalState("partial transpose is not positive definite")
    W = (U * np.sqrt(evals)) @ U.T
    M = 1j * W @ symplectic_form(2) @ W
    eta = float(np.abs(np.linalg.eigvalsh(M)).min())
    return max(0.0, -math.log(2.0 * eta))


def log_negativity_determinant_form(V):
    """Direct evaluation of the closed determinant formula (reference path)."""
    V = _require_two_mode(V)
    sigma = (float(np.linalg.det(V[:2, :2])) + float(np.linalg.det(V[2:, 2:]))
             - 2.0 * float(np.linalg.det(V[:2, 2:])))
    disc = max(sigma * sigma - 4.0 * float(np.linalg.det(V)), 0.0)
    eta_sq = 0.5 * (sigma - math.sqrt(disc))
    if eta_sq <= 0.0:
        raise UnphysicalState("partial-transpose symplectic eigenvalue is not real")
    return max(0.0, -0.5 * math.log(4.0 * eta_sq))


def purity(V):
    """Purity mu = 1/(4 sqrt(det V)) of a two-mode Gaussian state."""
    V = _require_two_mode(V)
    check_physical(V)
    det_v = float(np.linalg.det(V))
    mu = 1.0 / (4.0 * math.sqrt(det_v))
    if mu > 1.0 + 1e-9:
        raise UnphysicalState(f"purity {mu:.12g} > 1")
    return min(mu, 1.0)


def bogoliubov_occupations(V, r):
    """Occupations of the two-mode Bogoliubov modes
    b1 = a cosh r + b^dag sinh r,  b2 = b cosh r + a^dag sinh r,
    computed from the symmetric moments with normal-ordering corrections.
    """
    V = _require_two_mode(V)
    ch2 = math.cosh(r) ** 2
    sh2 = math.sinh(r) ** 2
    shch = math.sinh(r) * math.cosh(r)
    na = 0.5 * (V[0, 0] + V[1, 1] - 1.0)     # <a^dag a>
    nb = 0.5 * (V[2, 2] + V[3, 3] - 1.0)     # <b^dag b>
    cross = V[0, 2] - V[1, 3]                # <ab> + <a^dag b^dag>
    n1 = ch2 * na + sh2 * (nb + 1.0) + shch * cross
    n2 = ch2 * nb + sh2 * (na + 1.0) + shch * cross
    return float(n1), float(n2)


@dataclass(frozen=True)
class TTMSSFit:
    """Thermal two-mode squeezed state parameters extracted from a covariance."""

    xi: float
    nth_a: float
    nth_b: float
    residual: float


def ttmss_covariance(xi, nth_a, nth_b):
    """Covariance of a two-mode squeezed thermal state (squeezing xi)."""
    ch2 = math.cosh(xi) ** 2
    sh2 = math.sinh(xi) ** 2
    c_a = (nth_a + 0.5) * ch2 + (nth_b + 0.5) * sh2
    c_b = (nth_b + 0.5) * ch2 + (nth_a + 0.5) * sh2
    c_ab = (nth_a + nth_b + 1.0) * math.sinh(xi) * math.cosh(xi)
    V = np.zeros((4, 4))
    V[:2, :2] = c_a * np.eye(2)
    V[2:, 2:] = c_b * np.eye(2)
    V[:2, 2:] = -c_ab * _SZ
    V[2:, :2] = -c_ab * _SZ
    return V


def tmss_covariance(r):
    """Covariance of a pure two-mode squeezed vacuum."""
    return ttmss_covariance(r, 0.0, 0.0)


def vacuum_covariance(n_modes=2):
    return 0.5 * np.eye(2 * n_modes)


def fit_ttmss(V):
    """Fit (xi, nth_a, nth_b) of the nearest thermal two-mode squeezed state.

    Uses the averaged block extraction c_a = mean diag V_a, c_b = mean diag
    V_b, c_ab = mean of the sigma_z-weighted off-diagonal block, then inverts
    the closed-form covariance.  The part of V outside the family is reported
    as a Frobenius-norm residual rather than an error, so mildly non-ideal
    steady states can still be characterized.
    """
    V = _require_two_mode(V)
    c_a = 0.5 * (V[0, 0] + V[1, 1])
    c_b = 0.5 * (V[2, 2] + V[3, 3])
    c_ab = 0.5 * (V[1, 3] - V[0, 2])
    if 2.0 * abs(c_ab) >= c_a + c_b:
        raise NotTTMSSLike(
            f"|2 c_ab| = {2 * abs(c_ab):.6g} >= c_a + c_b = {c_a + c_b:.6g}")
    xi = 0.5 * math.atanh(2.0 * c_ab / (c_a + c_b))
    total = math.sqrt((c_a + c_b) ** 2 - 4.0 * c_ab ** 2)  # = nth_a + nth_b + 1
    diff = c_a - c_b                                       # = nth_a - nth_b
    nth_a = 0.5 * (total - 1.0 + diff)
    nth_b = 0.5 * (total - 1.0 - diff)
    if nth_a < -1e-9 or nth_b < -1e-9:
        raise UnphysicalState(
            f"fit gave negative thermal occupations ({nth_a:.3e}, {nth_b:.3e})")
    residual = float(np.linalg.norm(V - ttmss_covariance(xi, nth_a, nth_b)))
    return TTMSSFit(xi=xi, nth_a=max(nth_a, 0.0), nth_b=max(nth_b, 0.0),
                    residual=residual)


def teleportation_fidelity(V, V_in=None):
    """Fidelity of standard CV teleportation through the channel V.

    V_in is the 2x2 covariance of the input state; the default is a coherent
    state, V_in = I/2.
    """
    V = _require_two_mode(V)
    if V_in is None:
        V_in = 0.5 * np.eye(2)
    V_in = np.asarray(V_in, dtype=float)
    if V_in.shape != (2, 2):
        raise DimensionMismatch(f"input covariance must be 2x2, got {V_in.shape}")
    Va = V[:2, :2]
    Vb = V[2:, 2:]
    Vab = V[:2, 2:]
    N = _SZ @ Va @ _SZ + _SZ @ Vab + Vab.T @ _SZ + Vb
    det = float(np.linalg.det(2.0 * V_in + N))
    if det <= 0.0:
        raise UnphysicalState(f"teleportation noise matrix has det {det:.3e} <= 0")
    return 1.0 / math.sqrt(det)


def fidelity_ttmss(fit):
    """Teleportation fidelity of a thermal two-mode squeezed channel."""
    return 1.0 / (math.exp(-2.0 * fit.xi)
                  * (1.0 + fit.nth_a + fit.nth_b + math.exp(2.0 * fit.xi)))


def fidelity_from_logneg(e_n):
    """Optimal coherent-state teleportation fidelity at entanglement e_n."""
    if e_n < 0.0:
        raise ValueError(f"logarithmic negativity must be >= 0, got {e_n}")
    return 1.0 / (1.0 + math.exp(-e_n))
