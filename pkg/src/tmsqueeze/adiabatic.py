"""Closed-form adiabatic-limit results (fast sweeps and solver oracles).

Valid when the reservoir mode responds fast (kappa above Omega and the
couplings), the collective rotation dominates the mechanical damping, and the
two damped modes have symmetric rates and bath occupations.  These formulas
assume no coupling imperfections; the full Lyapunov path covers Gm != 0.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import AsymmetricParams
from .numerics import golden_minimize


@dataclass(frozen=True)
class AdiabaticResult:
    """Steady-state collective second moments and derived state metrics."""

    X_plus_sq: float
    P_minus_sq: float
    X_minus_sq: float
    P_plus_sq: float
    n_beta: float
    mu: float

    @property
    def duan(self):
        return self.X_plus_sq + self.P_minus_sq


def _require_symmetric(model):
    if not math.isclose(model.gamma_a, model.gamma_b, rel_tol=1e-12):
        raise AsymmetricParams(
            f"closed forms need gamma_a = gamma_b, got {model.gamma_a} != {model.gamma_b}")
    if not math.isclose(model.nbar_a, model.nbar_b, rel_tol=1e-12, abs_tol=1e-15):
        raise AsymmetricParams(
            f"closed forms need nbar_a = nbar_b, got {model.nbar_a} != {model.nbar_b}")
    if model.Gm_plus != 0.0 or model.Gm_minus != 0.0:
        raise AsymmetricParams(
            "closed forms assume no coupling imperfections; use the Lyapunov "
            "solver for Gm != 0")


def collective_moments(model):
    """Steady-state <X+-^2>, <P-+^2>, Bogoliubov occupation, and purity.

    The squeezed pair relaxes to a weighted mix of the thermal bath and the
    squeezed effective reservoir,
        <X+^2> = <P-^2> = gamma/(gamma+Gamma) (nbar + 1/2)
                          + Gamma/(gamma+Gamma) e^{-2r}/2,
    and the anti-squeezed pair carries e^{+2r} instead.
    """
    _require_symmetric(model)
    gamma = model.gamma
    nbar = model.nbar_a
    Gam = model.Gamma
    wth = gamma / (gamma + Gam)
    wsq = Gam / (gamma + Gam)
    e2r = (model.G_minus + model.G_plus) / (model.G_minus - model.G_plus)
    x_p = wth * (nbar + 0.5) + wsq * 0.5 / e2r
    x_m = wth * (nbar + 0.5) + wsq * 0.5 * e2r
    sinh2 = model.G_plus ** 2 / model.script_G ** 2
    n_beta = wth * (nbar + (2.0 * nbar + 1.0) * sinh2)
    mu = (gamma + Gam) ** 2 / (
        (gamma * (1.0 + 2.0 * nbar) + Gam) ** 2
        + 4.0 * (1.0 + 2.0 * nbar) * gamma * Gam * sinh2)
    return AdiabaticResult(X_plus_sq=x_p, P_minus_sq=x_p,
                           X_minus_sq=x_m, P_plus_sq=x_m,
                           n_beta=n_beta, mu=mu)


def collective_moments_rational(model):
    """Same moments in the rational form (exact algebraic equivalent).

    <X+-^2> = [gamma kappa (nbar + 1/2) + 2 (G- -+ G+)^2]
              / [gamma kappa + 4 (G-^2 - G+^2)]
    Useful as an independent evaluation path and for the G+ -> G- limit.
    """
    _require_symmetric(model)
    gk = model.gamma * model.kappa
    nbar = model.nbar_a
    den = gk + 4.0 * (model.G_minus ** 2 - model.G_plus ** 2)
    x_p = (gk * (nbar + 0.5) + 2.0 * (model.G_minus - model.G_plus) ** 2) / den
    x_m = (gk * (nbar + 0.5) + 2.0 * (model.G_minus + model.G_plus) ** 2) / den
    return x_p, x_m


def covariance_from_moments(result):
    """Two-mode covariance on (X_a, P_a, X_b, P_b) implied by the moments.

    Individual variances are the average of the collective ones and the
    cross-correlations their half-difference; the X-P cross terms vanish in
    the fast-rotation limit the closed forms assume.
    """
    V = np.zeros((4, 4))
    x_diag = 0.5 * (result.X_plus_sq + result.X_minus_sq)
    p_diag = 0.5 * (result.P_plus_sq + result.P_minus_sq)
    x_cross = 0.5 * (result.X_plus_sq - result.X_minus_sq)
    p_cross = 0.5 * (result.P_plus_sq - result.P_minus_sq)
    V[0, 0] = V[2, 2] = x_diag
    V[1, 1] = V[3, 3] = p_diag
    V[0, 2] = V[2, 0] = x_cross
    V[1, 3] = V[3, 1] = p_cross
    return V


def duan_of_asymmetry(asymmetry, C_minus, nbar):
    """Duan quantity of the adiabatic steady state at a given drive asymmetry.

    Dimensionless form of the rational moments with gamma*kappa scaled out:
    fixing C- fixes G-; the asymmetry sets G+.
    """
    den = 1.0 + C_minus * (1.0 - asymmetry ** 2)
    return 2.0 * ((nbar + 0.5) + 0.5 * C_minus * (1.0 - asymmetry) ** 2) / den


def optimal_asymmetry(C_minus, nbar):
    """Drive asymmetry minimizing the adiabatic Duan quantity (closed form).

    Setting the derivative of the rational-form Duan quantity to zero gives a
    quadratic in 1 - asymmetry whose positive root is

        1 + (1+nbar)/C- - sqrt(((1+nbar)/C-)^2 + (1+2 nbar)/C-).

    At nbar = 0 this reduces to 1 + 1/C- - sqrt((1 + 1/C-)/C-).
    """
    if C_minus <= 0.0:
        raise ValueError("C_minus must be positive")
    if nbar < 0.0:
        raise ValueError("nbar must be >= 0")
    shift = (1.0 + nbar) / C_minus
    return 1.0 + shift - math.sqrt(shift ** 2 + (1.0 + 2.0 * nbar) / C_minus)


def optimal_asymmetry_cold(C_minus, nbar):
    """Optimal-asymmetry expression with the thermal shift only in the linear
    term, 1 + (1+nbar)/C- - sqrt((1 + 1/C-)/C-); exact at nbar = 0 only."""
    return 1.0 + (1.0 + nbar) / C_minus - math.sqrt((1.0 + 1.0 / C_minus) / C_minus)


def optimal_asymmetry_large_c(C_minus):
    """Large-cooperativity approximation 1 - 1/sqrt(C-)."""
    return 1.0 - 1.0 / math.sqrt(C_minus)


def optimal_asymmetry_numeric(C_minus, nbar, xtol=1e-6):
    """Golden-section minimum of the adiabatic Duan quantity over asymmetry."""
    x, _ = golden_minimize(
        lambda a: duan_of_asymmetry(a, C_minus, nbar), 0.0, 1.0 - 1e-9, xtol=xtol)
    return x


def duan_at_optimum(C_minus, nbar):
    """Duan quantity at the optimal asymmetry, first order in 1/C-."""
    if C_minus < 1.0:
        raise ValueError("expansion requires C_minus >= 1")
    return (1.0 + nbar) / math.sqrt(C_minus) + nbar * (1.0 + nbar) / C_minus
