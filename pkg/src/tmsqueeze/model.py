"""Physical setups, effective model parameters, and drift/noise matrices.

A driven three-mode system (two mechanical oscillators coupled to one cavity,
or two cavities coupled to one mechanical oscillator) reduces, after
linearization in a rotating frame, to an effective model with couplings
G+/G-, imperfections Gm+/Gm-, an oscillation frequency Omega, and the damping
rates and bath occupations of the three modes.  This module derives those
parameters from two-tone or four-tone drive configurations and assembles the
drift and noise matrices in three bases:

* quadrature       -- (X_a, P_a, X_b, P_b, X_c, P_c), real 6x6 drift;
* mode_operator    -- (a, a^dag, b, b^dag, c, c^dag), complex 6x6 drift,
                      used for output spectra;
* collective_adiabatic -- (X+, P+, X-, P-) after eliminating mode c, 4x4.

Counter-rotating corrections enter as harmonic coefficient matrices A_k+/-
such that A(t) = A0 + sum_k (A_k+ e^{+2i delta_k t} + A_k- e^{-2i delta_k t})
with A_k- the elementwise conjugate of A_k+.

All rates returned by the constructors are normalized so that the reservoir
mode linewidth is kappa = 1; conversion from laboratory units happens here at
the boundary.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .errors import ConfigError, RegimeWarning, UnstableRegime

QUADRATURE_BASIS = ("X_a", "P_a", "X_b", "P_b", "X_c", "P_c")
MODE_OPERATOR_BASIS = ("a", "a_dag", "b", "b_dag", "c", "c_dag")
COLLECTIVE_BASIS = ("X_plus", "P_plus", "X_minus", "P_minus")

TWO_TONE = "two_tone"
FOUR_TONE = "four_tone"
TOPOLOGY_MECH = "two_mechanical_one_cavity"
TOPOLOGY_CAV = "two_cavity_one_mechanical"


@dataclass(frozen=True)
class DriveScheme:
    """Drive tone amplitudes; all amplitudes are magnitudes (phases absorbed).

    two_tone: tones at the average sideband frequency on both sides of the
    reservoir-mode resonance, amplitudes E_plus / E_minus.
    four_tone: one tone per sideband process, amplitudes E_1plus/E_1minus for
    mode a and E_2plus/E_2minus for mode b, with frame offset Omega.
    """

    variant: str
    E_plus: float = 0.0
    E_minus: float = 0.0
    E_1plus: float = 0.0
    E_1minus: float = 0.0
    E_2plus: float = 0.0
    E_2minus: float = 0.0
    Omega: float = 0.0

    def __post_init__(self):
        if self.variant not in (TWO_TONE, FOUR_TONE):
            raise ConfigError(f"unknown drive variant {self.variant!r}")
        for name in ("E_plus", "E_minus", "E_1plus", "E_1minus", "E_2plus", "E_2minus"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"drive amplitude {name} must be >= 0")
        if self.variant == FOUR_TONE and self.Omega <= 0.0:
            raise ConfigError("four-tone driving requires a frame offset Omega > 0")


@dataclass(frozen=True)
class PhysicalSetup:
    """Laboratory-level description of the three-mode system (rates in rad/s).

    For the two_mechanical_one_cavity topology, a and b are mechanical modes
    and c (linewidth kappa) is the driven cavity.  For the
    two_cavity_one_mechanical topology the roles are swapped: a and b are
    cavity modes, kappa is the damping rate of the shared mechanical mode,
    and omega_c is its resonance frequency.
    """

    omega_a: float
    omega_b: float
    kappa: float
    gamma_a: float
    gamma_b: float
    nbar_a: float
    nbar_b: float
    g_a: float
    g_b: float
    drive: DriveScheme
    topology: str = TOPOLOGY_MECH
    omega_c: float = 0.0

    def __post_init__(self):
        if self.topology not in (TOPOLOGY_MECH, TOPOLOGY_CAV):
            raise ConfigError(f"unknown topology {self.topology!r}")
        if self.kappa <= 0.0 or self.gamma_a <= 0.0 or self.gamma_b <= 0.0:
            raise ConfigError("damping rates kappa, gamma_a, gamma_b must be > 0")
        if not self.omega_a > self.omega_b:
            raise ConfigError("convention requires omega_a > omega_b")
        if self.g_a <= 0.0 or self.g_b <= 0.0:
            raise ConfigError("single-photon couplings g_a, g_b must be > 0")
        if self.nbar_a < 0.0 or self.nbar_b < 0.0:
            raise ConfigError("bath occupations must be >= 0")
        if self.topology == TOPOLOGY_CAV and self.omega_c <= 0.0:
            raise ConfigError(
                "two_cavity_one_mechanical needs the mechanical resonance omega_c > 0")


@dataclass(frozen=True)
class EffectiveModel:
    """Reduced parameter set defining every drift/noise matrix.

    All rates are in units of the stored kappa (the constructors normalize to
    kappa = 1).  The optional drive-context fields record the counter-rotating
    frequencies and mismatch parameters needed to build the harmonic
    coefficient matrices; they stay None for purely rotating-wave work.
    """

    G_plus: float
    G_minus: float
    Gm_plus: float = 0.0
    Gm_minus: float = 0.0
    Omega: float = 0.1
    kappa: float = 1.0
    gamma_a: float = 4e-5
    gamma_b: float = 4e-5
    nbar_a: float = 0.0
    nbar_b: float = 0.0
    drive_variant: str | None = None
    omega_m: float | None = None
    omega_1: float | None = None
    omega_2: float | None = None
    delta: float | None = None
    d: float = 1.0
    eps_plus: float | None = None
    eps_minus: float | None = None
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.validate:
            return
        if self.kappa <= 0.0 or self.gamma_a <= 0.0 or self.gamma_b <= 0.0:
            raise ConfigError("kappa, gamma_a, gamma_b must be > 0")
        if self.nbar_a < 0.0 or self.nbar_b < 0.0:
            raise ConfigError("bath occupations must be >= 0")
        if self.G_plus < 0.0 or self.G_minus <= 0.0:
            raise ConfigError("couplings must satisfy G_plus >= 0 and G_minus > 0")
        if self.G_plus >= self.G_minus:
            raise UnstableRegime(
                f"G_plus/G_minus = {self.G_plus / self.G_minus:.6g} >= 1 "
                "is outside the stable regime")

    @property
    def ratio(self):
        """Drive asymmetry G+/G-."""
        return self.G_plus / self.G_minus

    @property
    def r(self):
        """Two-mode squeezing parameter, tanh r = G+/G-."""
        return math.atanh(self.ratio)

    @property
    def script_G(self):
        """Effective coupling sqrt(G-^2 - G+^2) of the collective mode."""
        return math.sqrt(self.G_minus ** 2 - self.G_plus ** 2)

    @property
    def Gamma(self):
        """Reservoir-induced damping 4 script_G^2 / kappa."""
        return 4.0 * self.script_G ** 2 / self.kappa

    @property
    def gamma(self):
        return 0.5 * (self.gamma_a + self.gamma_b)

    @property
    def C_plus(self):
        return 4.0 * self.G_plus ** 2 / (self.gamma * self.kappa)

    @property
    def C_minus(self):
        return 4.0 * self.G_minus ** 2 / (self.gamma * self.kappa)

    def mismatch_parameters(self):
        """(eps_plus, eps_minus) as used by the counter-rotating matrices.

        Taken from the stored drive-derived values when available, otherwise
        inferred from the imperfection ratios Gm+/G+ and Gm-/G-.
        """
        if self.eps_plus is not None and self.eps_minus is not None:
            return self.eps_plus, self.eps_minus
        rho_p = self.Gm_plus / self.G_plus if self.G_plus > 0.0 else 0.0
        rho_m = self.Gm_minus / self.G_minus
        if abs(rho_p) >= 1.0 or abs(rho_m) >= 1.0:
            raise ConfigError("imperfection ratios |Gm/G| must be < 1 to infer eps")
        return (1.0 - rho_p) / (1.0 + rho_p), (1.0 + rho_m) / (1.0 - rho_m)

    @classmethod
    def from_ratios(cls, asymmetry, C_minus, *, Omega_over_kappa=0.1,
                    gamma_over_kappa=4e-5, nbar=0.0,
                    gm_plus_ratio=0.0, gm_minus_ratio=0.0,
                    gamma_a_over_kappa=None, gamma_b_over_kappa=None,
                    nbar_a=None, nbar_b=None,
                    drive_variant=None, omega_m_over_kappa=None,
                    delta_over_kappa=None, omega_1_over_kappa=None,
                    d=1.0, eps_plus=None, eps_minus=None):
        """Build a model from the dimensionless ratios used in sweeps.

        C_minus fixes G-, asymmetry fixes G+/G-, and the imperfection ratios
        set Gm+- = ratio * G+-.  Counter-rotating context is attached when the
        sideband frequencies are given (omega_m for two-tone; delta and
        omega_1 for four-tone).
        """
        ga = gamma_over_kappa if gamma_a_over_kappa is None else gamma_a_over_kappa
        gb = gamma_over_kappa if gamma_b_over_kappa is None else gamma_b_over_kappa
        na = nbar if nbar_a is None else nbar_a
        nb = nbar if nbar_b is None else nbar_b
        gamma = 0.5 * (ga + gb)
        G_minus = 0.5 * math.sqrt(C_minus * gamma)
        G_plus = asymmetry * G_minus
        Omega = Omega_over_kappa
        omega_m = omega_m_over_kappa
        omega_1 = omega_2 = delta = None
        if drive_variant == FOUR_TONE:
            if delta_over_kappa is None or omega_1_over_kappa is None:
                raise ConfigError(
                    "four-tone counter-rotating context needs delta_over_kappa "
                    "and omega_1_over_kappa")
            delta = delta_over_kappa
            omega_1 = omega_1_over_kappa
            omega_2 = omega_1 - 2.0 * delta
            omega_m = omega_1 - delta
        return cls(
            G_plus=G_plus, G_minus=G_minus,
            Gm_plus=gm_plus_ratio * G_plus, Gm_minus=gm_minus_ratio * G_minus,
            Omega=Omega, kappa=1.0, gamma_a=ga, gamma_b=gb,
            nbar_a=na, nbar_b=nb,
            drive_variant=drive_variant, omega_m=omega_m,
            omega_1=omega_1, omega_2=omega_2, delta=delta,
            d=d, eps_plus=eps_plus, eps_minus=eps_minus)


@dataclass(frozen=True)
class DriftSet:
    """Drift matrix, noise input matrix, and counter-rotating harmonics.

    diffusion() returns the symmetrized noise matrix Q entering the Lyapunov
    equation A V + V A^T = -Q.  For the quadrature and collective bases the
    bath occupations are folded into B0 and Q = B0 B0^T; the mode-operator
    basis keeps B0 = diag(sqrt(rates)) and carries the symmetrized input
    correlations separately.
    """

    basis: str
    A0: np.ndarray
    B0: np.ndarray
    harmonics: tuple = ()
    input_correlations: np.ndarray | None = None
    effective_bath_occupations: tuple | None = None

    def diffusion(self):
        if self.input_correlations is None:
            return self.B0 @ self.B0.T
        return self.B0 @ self.input_correlations @ self.B0.T


def _sideband_amplitude(E, omega, kappa):
    """Magnitude of the steady sideband field i E / (+-i omega - kappa/2)."""
    return abs(E) / math.hypot(omega, kappa / 2.0)


def effective_from_two_tone(setup):
    """Effective model for two-tone driving at the average sideband frequency.

    The couplings are G+- = (g_a + g_b) cbar+- / 2 with cbar+- the steady
    sideband amplitudes; unequal single-photon couplings leave imperfections
    Gm+- = +-(g_a - g_b) cbar+- / 2.
    """
    if setup.drive.variant != TWO_TONE:
        raise ConfigError("setup does not use two-tone driving")
    omega_m = 0.5 * (setup.omega_a + setup.omega_b)
    Omega = 0.5 * (setup.omega_a - setup.omega_b)
    if omega_m < 10.0 * setup.kappa:
        warnings.warn(
            f"resolved-sideband condition: omega_m/kappa = "
            f"{omega_m / setup.kappa:.3g} < 10", RegimeWarning, stacklevel=2)
    cbar_p = _sideband_amplitude(setup.drive.E_plus, omega_m, setup.kappa)
    cbar_m = _sideband_amplitude(setup.drive.E_minus, omega_m, setup.kappa)
    k = setup.kappa
    return EffectiveModel(
        G_plus=0.5 * (setup.g_a + setup.g_b) * cbar_p / k,
        G_minus=0.5 * (setup.g_a + setup.g_b) * cbar_m / k,
        Gm_plus=+0.5 * (setup.g_a - setup.g_b) * cbar_p / k,
        Gm_minus=-0.5 * (setup.g_a - setup.g_b) * cbar_m / k,
        Omega=Omega / k, kappa=1.0,
        gamma_a=setup.gamma_a / k, gamma_b=setup.gamma_b / k,
        nbar_a=setup.nbar_a, nbar_b=setup.nbar_b,
        drive_variant=TWO_TONE, omega_m=omega_m / k, d=setup.g_a / setup.g_b)


def effective_from_four_tone(setup):
    """Effective model for four-tone driving with frame offset Omega.

    Tones sit at detunings +-omega_1 = +-(omega_a - Omega) and
    +-omega_2 = +-(omega_b + Omega); matched amplitudes
    cbar_1/cbar_2 = g_b/g_a cancel the imperfections exactly.
    """
    if setup.drive.variant != FOUR_TONE:
        raise ConfigError("setup does not use four-tone driving")
    Omega = setup.drive.Omega
    omega_1 = setup.omega_a - Omega
    omega_2 = setup.omega_b + Omega
    if setup.topology == TOPOLOGY_CAV:
        # Both driven modes respond at detunings +-omega_c of the shared
        # mechanical mode, each with its own linewidth.
        c1p = abs(setup.drive.E_1plus) / math.hypot(setup.omega_c, setup.gamma_a / 2.0)
        c1m = abs(setup.drive.E_1minus) / math.hypot(setup.omega_c, setup.gamma_a / 2.0)
        c2p = abs(setup.drive.E_2plus) / math.hypot(setup.omega_c, setup.gamma_b / 2.0)
        c2m = abs(setup.drive.E_2minus) / math.hypot(setup.omega_c, setup.gamma_b / 2.0)
    else:
        c1p = _sideband_amplitude(setup.drive.E_1plus, omega_1, setup.kappa)
        c1m = _sideband_amplitude(setup.drive.E_1minus, omega_1, setup.kappa)
        c2p = _sideband_amplitude(setup.drive.E_2plus, omega_2, setup.kappa)
        c2m = _sideband_amplitude(setup.drive.E_2minus, omega_2, setup.kappa)
    k = setup.kappa
    delta = 0.5 * (setup.omega_a - setup.omega_b) - Omega
    eps_p = (setup.g_b * c2p) / (setup.g_a * c1p) if c1p > 0.0 else 1.0
    eps_m = (setup.g_b * c2m) / (setup.g_a * c1m) if c1m > 0.0 else 1.0
    if setup.topology == TOPOLOGY_CAV:
        # Counter-rotating corrections are not modeled for this topology;
        # keep only the rotating-wave parameter set.
        cr = dict(drive_variant=FOUR_TONE)
    else:
        cr = dict(drive_variant=FOUR_TONE,
                  omega_m=0.5 * (setup.omega_a + setup.omega_b) / k,
                  omega_1=omega_1 / k, omega_2=omega_2 / k, delta=delta / k,
                  d=setup.g_a / setup.g_b, eps_plus=eps_p, eps_minus=eps_m)
    model = EffectiveModel(
        G_plus=0.5 * (setup.g_a * c1p + setup.g_b * c2p) / k,
        G_minus=0.5 * (setup.g_a * c1m + setup.g_b * c2m) / k,
        Gm_plus=+0.5 * (setup.g_a * c1p - setup.g_b * c2p) / k,
        Gm_minus=-0.5 * (setup.g_a * c1m - setup.g_b * c2m) / k,
        Omega=Omega / k, kappa=1.0,
        gamma_a=setup.gamma_a / k, gamma_b=setup.gamma_b / k,
        nbar_a=setup.nbar_a, nbar_b=setup.nbar_b, **cr)
    for message in validate_regime(setup, model):
        warnings.warn(message, RegimeWarning, stacklevel=2)
    return model


def effective_from_setup(setup):
    """Dispatch on the drive variant of a physical setup."""
    if setup.drive.variant == TWO_TONE:
        return effective_from_two_tone(setup)
    return effective_from_four_tone(setup)


def validate_regime(setup, model):
    """Collect human-readable warnings for regime-condition violations.

    setup may be None when only an effective model is available; checks that
    need laboratory frequencies are then based on the stored drive context.
    """
    out = []
    Omega, gamma, kappa = model.Omega, model.gamma, model.kappa
    if Omega < 10.0 * gamma:
        out.append(
            f"sum/difference coupling condition: Omega/gamma = "
            f"{Omega / gamma:.3g} < 10")
    if model.drive_variant == FOUR_TONE and model.delta is not None:
        # delta = (omega_a - omega_b)/2 - Omega must dominate Omega.
        margin = (model.delta + Omega) - gamma
        if margin < 10.0 * Omega:
            out.append(
                f"unwanted-sideband condition: ((omega_a-omega_b)/2 - gamma)/Omega "
                f"= {margin / Omega:.3g} < 10")
    sidebands = []
    if model.omega_m is not None and model.drive_variant == TWO_TONE:
        sidebands.append(("omega_m", model.omega_m))
    if model.omega_1 is not None:
        sidebands.append(("omega_1", model.omega_1))
    if model.omega_2 is not None:
        sidebands.append(("omega_2", model.omega_2))
    for name, value in sidebands:
        if value < 10.0 * kappa:
            out.append(
                f"resolved-sideband condition: {name}/kappa = "
                f"{value / kappa:.3g} < 10")
    if kappa <= Omega:
        out.append(f"adiabaticity: kappa <= Omega ({kappa:.3g} <= {Omega:.3g})")
    if kappa <= model.G_minus:
        out.append(f"adiabaticity: kappa <= G_minus ({kappa:.3g} <= {model.G_minus:.3g})")
    return out


def build_rwa_quadrature(model):
    """Rotating-wave drift and noise in the quadrature basis (6x6, real)."""
    gp, gm = model.G_plus, model.G_minus
    gms = model.Gm_minus + model.Gm_plus
    gmd = model.Gm_minus - model.Gm_plus
    Om = model.Omega
    A_a = np.array([[-model.gamma_a / 2.0, Om], [-Om, -model.gamma_a / 2.0]])
    A_b = np.array([[-model.gamma_b / 2.0, -Om], [Om, -model.gamma_b / 2.0]])
    A_c = -(model.kappa / 2.0) * np.eye(2)
    C_a = np.array([[0.0, gm - gp - gms], [-gm - gp + gmd, 0.0]])
    C_b = np.array([[0.0, gm - gp + gms], [-gm - gp - gmd, 0.0]])
    Z = np.zeros((2, 2))
    A0 = np.block([[A_a, Z, C_a], [Z, A_b, C_b], [C_a, C_b, A_c]])
    B0 = np.diag([
        math.sqrt(model.gamma_a * (model.nbar_a + 0.5)),
        math.sqrt(model.gamma_a * (model.nbar_a + 0.5)),
        math.sqrt(model.gamma_b * (model.nbar_b + 0.5)),
        math.sqrt(model.gamma_b * (model.nbar_b + 0.5)),
        math.sqrt(model.kappa / 2.0),
        math.sqrt(model.kappa / 2.0),
    ])
    return DriftSet(basis="quadrature", A0=A0, B0=B0)


def build_mode_operator(model):
    """Drift and noise in the mode-operator basis (a, a^dag, ..., complex)."""
    gp, gm = model.G_plus, model.G_minus
    gmp, gmm = model.Gm_plus, model.Gm_minus
    Om = model.Omega
    A_a = np.diag([-1j * Om - model.gamma_a / 2.0, +1j * Om - model.gamma_a / 2.0])
    A_b = np.diag([+1j * Om - model.gamma_b / 2.0, -1j * Om - model.gamma_b / 2.0])
    A_c = -(model.kappa / 2.0) * np.eye(2, dtype=complex)
    C_a = 1j * np.array([[-gm + gmm, -gp - gmp], [gp + gmp, gm - gmm]])
    C_b = 1j * np.array([[-gm - gmm, -gp + gmp], [gp - gmp, gm + gmm]])
    Z = np.zeros((2, 2), dtype=complex)
    A0 = np.block([[A_a, Z, C_a], [Z, A_b, C_b], [C_a, C_b, A_c]])
    B0 = np.diag([
        math.sqrt(model.gamma_a), math.sqrt(model.gamma_a),
        math.sqrt(model.gamma_b), math.sqrt(model.gamma_b),
        math.sqrt(model.kappa), math.sqrt(model.kappa),
    ]).astype(complex)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    S = np.zeros((6, 6))
    S[:2, :2] = (model.nbar_a + 0.5) * swap
    S[2:4, 2:4] = (model.nbar_b + 0.5) * swap
    S[4:, 4:] = 0.5 * swap
    return DriftSet(basis="mode_operator", A0=A0, B0=B0, input_correlations=S)


def mode_to_quadrature(M):
    """Map a symmetric second-moment matrix from the mode-operator basis to
    quadratures via the per-mode unitary X = (s + s^dag)/sqrt(2), etc."""
    t = np.array([[1.0, 1.0], [-1j, 1j]]) / math.sqrt(2.0)
    T = np.kron(np.eye(M.shape[0] // 2), t)
    return np.real_if_close(T @ M @ T.T, tol=1e6).real


def build_collective_adiabatic(model):
    """Drift and noise for the collective quadratures after eliminating mode c.

    The + sector is damped at gamma/2 + Gamma and driven by a two-quadrature
    reservoir with effective occupations nbar_1 = e^{-2r}/2 - 1/2 (squeezed,
    negative) and nbar_2 = e^{+2r}/2 - 1/2; the mechanical baths enter through
    the exact collective transform of the individual inputs.
    """
    if model.kappa <= model.Omega or model.kappa <= model.G_minus:
        warnings.warn(
            "adiabatic elimination outside its regime (kappa should exceed "
            "Omega and the couplings)", RegimeWarning, stacklevel=2)
    gamma = model.gamma
    ell = (model.gamma_a - model.gamma_b) / (2.0 * gamma)
    Gam = model.Gamma
    Om = model.Omega
    A_p = -(gamma / 2.0 + Gam) * np.eye(2)
    A_m = -(gamma / 2.0) * np.eye(2)
    A_pm = np.array([[-ell * gamma / 2.0, Om], [-Om, -ell * gamma / 2.0]])
    A0 = np.block([[A_p, A_pm], [A_pm, A_m]])

    e2r = (model.G_minus + model.G_plus) / (model.G_minus - model.G_plus)
    nbar_1 = 0.5 / e2r - 0.5
    nbar_2 = 0.5 * e2r - 0.5
    wa = math.sqrt(0.5 * model.gamma_a * (model.nbar_a + 0.5))
    wb = math.sqrt(0.5 * model.gamma_b * (model.nbar_b + 0.5))
    B_mech = np.zeros((4, 4))
    B_mech[:2, :2] = wa * np.eye(2)
    B_mech[:2, 2:] = wb * np.eye(2)
    B_mech[2:, :2] = wa * np.eye(2)
    B_mech[2:, 2:] = -wb * np.eye(2)
    # Damping Gam per + quadrature pairs with diffusion 2 Gam (nbar_i + 1/2);
    # this reproduces the exact elimination of mode c from the full system.
    B_cav = np.zeros((4, 2))
    B_cav[0, 0] = math.sqrt(2.0 * Gam * (nbar_1 + 0.5))
    B_cav[1, 1] = math.sqrt(2.0 * Gam * (nbar_2 + 0.5))
    B0 = np.hstack([B_mech, B_cav])
    return DriftSet(basis="collective_adiabatic", A0=A0, B0=B0,
                    effective_bath_occupations=(nbar_1, nbar_2))


def _mode_row_creation(p, q):
    """Mode-row coupling block when the harmonic enters as s^dag(p c^dag + q c)."""
    return 0.5 * np.array([[-1j * (p + q), q - p], [-(p + q), 1j * (p - q)]])


def _cav_row_creation(p, q):
    return 0.5 * np.array([[1j * (q - p), q - p], [-(q + p), 1j * (q + p)]])


def _mode_row_annihilation(p, q):
    """Mode-row coupling block when the harmonic enters as s(p c^dag + q c)."""
    return 0.5 * np.array([[1j * (p + q), p - q], [-(p + q), 1j * (p - q)]])


def _cav_row_annihilation(p, q):
    return 0.5 * np.array([[1j * (q - p), p - q], [-(p + q), -1j * (p + q)]])


def _assemble_harmonic(terms):
    """Assemble one A_k+ from (mode, kind, p, q) coupling terms.

    mode is 'a' or 'b'; kind 'creation' couples s^dag to the cavity at the
    positive harmonic, 'annihilation' couples s.
    """
    A = np.zeros((6, 6), dtype=complex)
    rows = {"a": slice(0, 2), "b": slice(2, 4)}
    for mode, kind, p, q in terms:
        sl = rows[mode]
        if kind == "creation":
            A[sl, 4:6] += _mode_row_creation(p, q)
            A[4:6, sl] += _cav_row_creation(p, q)
        else:
            A[sl, 4:6] += _mode_row_annihilation(p, q)
            A[4:6, sl] += _cav_row_annihilation(p, q)
    return A


def build_cr_harmonics(setup, model):
    """Quadrature-basis drift set including counter-rotating harmonics.

    Two-tone driving contributes a single harmonic at the average sideband
    frequency omega_m; four-tone driving contributes four, at delta,
    omega_b + Omega, omega_m, and omega_a - Omega.  The coefficient matrices
    are assembled from the bilinear coupling terms of the time-dependent
    Hamiltonian with per-mode weights, so unequal single-photon couplings and
    drive mismatches are both covered; A_k- is the complex conjugate of A_k+.
    """
    if setup is not None:
        if setup.topology == TOPOLOGY_CAV:
            raise ConfigError(
                "counter-rotating harmonics are only modeled for the "
                "two-mechanical topology")
        model = effective_from_setup(setup)
    static = build_rwa_quadrature(model)
    gp, gm = model.G_plus, model.G_minus

    if model.drive_variant == TWO_TONE or (
            model.drive_variant is None and model.omega_m is not None):
        if model.omega_m is None:
            raise ConfigError("two-tone harmonics need omega_m")
        A1 = _assemble_harmonic([
            ("a", "creation", gm - model.Gm_minus, gp + model.Gm_plus),
            ("b", "creation", gm + model.Gm_minus, gp - model.Gm_plus),
        ])
        harmonics = ((model.omega_m, A1, A1.conj()),)
    elif model.drive_variant == FOUR_TONE:
        if None in (model.delta, model.omega_1, model.omega_2, model.omega_m):
            raise ConfigError("four-tone harmonics need delta, omega_1, omega_2, omega_m")
        eps_p, eps_m = model.mismatch_parameters()
        d = model.d
        base_p = 2.0 * gp / (1.0 + eps_p)   # g_a * cbar_1+
        base_m = 2.0 * gm / (1.0 + eps_m)   # g_a * cbar_1-
        ga_c1 = (base_m, base_p)
        ga_c2 = (d * eps_m * base_m, d * eps_p * base_p)
        gb_c1 = (base_m / d, base_p / d)
        gb_c2 = (eps_m * base_m, eps_p * base_p)
        A1 = _assemble_harmonic([
            ("a", "creation", ga_c2[1], ga_c2[0]),
            ("b", "annihilation", gb_c1[0], gb_c1[1]),
        ])
        A2 = _assemble_harmonic([("b", "creation", gb_c2[0], gb_c2[1])])
        A3 = _assemble_harmonic([
            ("a", "creation", ga_c2[0], ga_c2[1]),
            ("b", "creation", gb_c1[0], gb_c1[1]),
        ])
        A4 = _assemble_harmonic([("a", "creation", ga_c1[0], ga_c1[1])])
        harmonics = (
            (model.delta, A1, A1.conj()),
            (model.omega_2, A2, A2.conj()),
            (model.omega_m, A3, A3.conj()),
            (model.omega_1, A4, A4.conj()),
        )
    else:
        raise ConfigError(
            "model has no drive context; set drive_variant and the sideband "
            "frequencies (omega_m, or delta and omega_1)")
    return DriftSet(basis="quadrature", A0=static.A0, B0=static.B0,
                    harmonics=harmonics)
