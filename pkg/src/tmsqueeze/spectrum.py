"""Cavity output spectrum and spectrum-based entanglement bound.

The spectrum S[w] (w = detuning from the reservoir-mode resonance, units of
1/kappa) is the Fourier transform of the normally-ordered output correlator
of the reservoir mode.  It is evaluated from the frequency-domain solution of
the mode-operator Langevin system: with R[w] = (A0 - i w I)^-1 B0,

    S[w] = kappa * sum_i  w_i |R[c^dag row, i]|^2,

where the weights w_i = (nbar_a + 1, nbar_a, nbar_b + 1, nbar_b, 1, 0) are
the unordered input-bath correlators (thermal mechanical baths, vacuum at the
reservoir-mode input).  The sign of the resolvent is fixed so that the result
reproduces the closed-form spectrum and the peak asymmetry orientation.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import (
    DegenerateDenominator,
    NegativeOccupation,
    RegimeWarning,
    UnstableDrift,
)
from .model import build_mode_operator
from .numerics import stability_report


@dataclass(frozen=True)
class SpectrumTrace:
    """Sampled output spectrum over a strictly increasing detuning grid."""

    omega_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if grid.shape != vals.shape or grid.ndim != 1:
            raise ValueError("grid and values must be matching 1-D arrays")
        if not np.all(np.diff(grid) > 0.0):
            raise ValueError("omega_grid must be strictly increasing")
        floor = -1e-12 * max(vals.max(initial=0.0), 1e-300)
        if vals.min(initial=0.0) < floor:
            raise ValueError("spectrum values must be non-negative")
        object.__setattr__(self, "omega_grid", grid)
        object.__setattr__(self, "values", vals)


def default_grid(model, n=2001):
    """Symmetric detuning grid covering both peaks and their tails.

    Spans 8 Omega on each side, widened to at least six linewidths beyond the
    peak positions when the peaks are broad.
    """
    width = model.gamma + model.Gamma
    half = max(8.0 * model.Omega, model.Omega + 6.0 * width)
    return np.linspace(-half, half, n)


def output_spectrum(model, grid=None):
    """Numerical output spectrum of the driven system on the given grid."""
    ds = build_mode_operator(model)
    if not stability_report(ds.A0).is_stable:
        raise UnstableDrift("mode-operator drift matrix is not Hurwitz")
    if grid is None:
        grid = default_grid(model)
    grid = np.asarray(grid, dtype=float)
    weights = np.array([
        model.nbar_a + 1.0, model.nbar_a,
        model.nbar_b + 1.0, model.nbar_b,
        1.0, 0.0,
    ])
    eye = np.eye(6, dtype=complex)
    mats = ds.A0[None, :, :] - 1j * grid[:, None, None] * eye[None, :, :]
    rows = np.linalg.solve(mats, np.broadcast_to(ds.B0, mats.shape))[:, 5, :]
    values = model.kappa * np.sum(weights * np.abs(rows) ** 2, axis=1)
    return SpectrumTrace(omega_grid=grid, values=np.maximum(values, 0.0))


def spectrum_closed_form(model, omega):
    """Closed-form spectrum for vanishing coupling imperfections."""
    if model.Gm_plus != 0.0 or model.Gm_minus != 0.0:
        raise ValueError("closed form requires Gm_plus = Gm_minus = 0")
    w = np.asarray(omega, dtype=float)
    g, k, Om = model.gamma, model.kappa, model.Omega
    nbar = 0.5 * (model.nbar_a + model.nbar_b)
    G2 = model.script_G ** 2
    N = ((8.0 * G2 + (g - 2j * w) * (k - 2j * w)) * (g - 2j * w)
         + 4.0 * Om ** 2 * (k - 2j * w))
    num = k * 32.0 * (model.G_minus ** 2 * nbar
                      + model.G_plus ** 2 * (nbar + 1.0)) * g \
        * (g ** 2 + 4.0 * (w ** 2 + Om ** 2))
    out = num / np.abs(N) ** 2
    return float(out) if np.isscalar(omega) else out


def peak_values(model):
    """Closed-form spectrum heights at detunings +-Omega, with imperfections."""
    den = (model.G_minus ** 2 - model.Gm_minus ** 2
           - model.G_plus ** 2 + model.Gm_plus ** 2)
    scale = (model.G_minus ** 2 + model.Gm_minus ** 2
             + model.G_plus ** 2 + model.Gm_plus ** 2)
    if abs(den) < 1e-12 * scale:
        raise DegenerateDenominator("G-^2 - Gm-^2 - G+^2 + Gm+^2 vanishes")
    nbar = 0.5 * (model.nbar_a + model.nbar_b)
    gk = model.gamma * model.kappa

    def peak(sign):
        num = ((model.G_minus + sign * model.Gm_minus) ** 2 * nbar
               + (model.G_plus + sign * model.Gm_plus) ** 2 * (1.0 + nbar))
        return gk * num / den ** 2

    return peak(+1.0), peak(-1.0)


def occupation_from_spectrum(trace, model):
    """Bogoliubov occupation inferred from a spectrum trace, two ways.

    The area route integrates the negative-detuning peak (trapezoid plus a
    1/w^2 tail estimate beyond the grid edge); the peak route reads the
    spectrum height at +-Omega.  Both inversions assume vanishing coupling
    imperfections; above a 1% imperfection ratio they are unreliable and a
    RegimeWarning is emitted.
    """
    ratios = []
    if model.G_plus > 0.0:
        ratios.append(abs(model.Gm_plus) / model.G_plus)
    ratios.append(abs(model.Gm_minus) / model.G_minus)
    if max(ratios) >= 0.01:
        warnings.warn(
            f"occupation inversion assumes imperfections below 1%, got "
            f"{max(ratios):.3g}", RegimeWarning, stacklevel=2)

    grid, vals = trace.omega_grid, trace.values
    neg = grid <= 0.0
    area = float(np.trapezoid(vals[neg], grid[neg]))
    # 1/w^2 tail beyond the most-negative grid point.
    w_edge = grid[0]
    area += float(vals[0] * abs(w_edge))

    G2 = model.script_G ** 2
    k, g = model.kappa, model.gamma
    n_area = area * (4.0 * G2 + k * (k + g)) / (8.0 * math.pi * k * G2)
    s_peak = 0.5 * (np.interp(+model.Omega, grid, vals)
                    + np.interp(-model.Omega, grid, vals))
    n_peak = float(s_peak) * G2 / (g * k + 4.0 * G2)
    for name, value in (("area", n_area), ("peak", n_peak)):
        if value < -1e-6:
            raise NegativeOccupation(f"{name} inversion gave {value:.3e}")
    return max(n_area, 0.0), max(n_peak, 0.0)


def duan_bound(n_beta, r):
    """Upper bound 8 e^{-2r} (n_beta + 1/2) on the Duan quantity.

    Assumes equal occupations of the two Bogoliubov modes; tight in the
    strongly squeezed (large r) regime.
    """
    if n_beta < 0.0:
        raise ValueError("n_beta must be >= 0")
    if r < 0.0:
        raise ValueError("r must be >= 0")
    return 8.0 * math.exp(-2.0 * r) * (n_beta + 0.5)
