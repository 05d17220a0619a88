"""Steady-state two-mode squeezing of a driven three-mode system.

Public surface: effective-model construction and drift builders (model),
steady-state solvers (numerics, floquet), Gaussian-state metrics (gaussian),
adiabatic closed forms (adiabatic), output spectra (spectrum), and the
scenario runner behind the CLI (scenario).
"""

__version__ = "0.1.0"

from .adiabatic import (
    AdiabaticResult,
    collective_moments,
    covariance_from_moments,
    duan_at_optimum,
    optimal_asymmetry,
    optimal_asymmetry_numeric,
)
from .errors import (
    AsymmetricParams,
    ConfigError,
    DegenerateDenominator,
    DimensionMismatch,
    NegativeOccupation,
    NonConvergent,
    NotTTMSSLike,
    RegimeWarning,
    SingularSystem,
    StepSizeUnderflow,
    TmsqueezeError,
    UnphysicalState,
    UnstableDrift,
    UnstableRegime,
)
from .floquet import FloquetSolution, dc_covariance_by_ode, solve_floquet
from .gaussian import (
    TTMSSFit,
    bogoliubov_occupations,
    duan_quantity,
    fidelity_from_logneg,
    fidelity_ttmss,
    fit_ttmss,
    log_negativity,
    mechanical_block,
    purity,
    symplectic_eigenvalues,
    teleportation_fidelity,
    tmss_covariance,
    ttmss_covariance,
)
from .model import (
    DriftSet,
    DriveScheme,
    EffectiveModel,
    PhysicalSetup,
    build_collective_adiabatic,
    build_cr_harmonics,
    build_mode_operator,
    build_rwa_quadrature,
    effective_from_four_tone,
    effective_from_setup,
    effective_from_two_tone,
    validate_regime,
)
from .numerics import (
    StabilityReport,
    integrate_1d,
    integrate_lyapunov_ode,
    solve_lyapunov,
    stability_report,
)
from .spectrum import (
    SpectrumTrace,
    duan_bound,
    occupation_from_spectrum,
    output_spectrum,
    peak_values,
    spectrum_closed_form,
)
