"""Exception and warning types shared across the package."""


class TmsqueezeError(Exception):
    """Base class for all package errors."""


class UnstableDrift(TmsqueezeError):
    """Drift matrix (static or time-periodic) has no decaying steady state."""


class SingularSystem(TmsqueezeError):
    """A linear solve encountered a (numerically) rank-deficient system."""


class StepSizeUnderflow(TmsqueezeError):
    """The adaptive integrator cannot meet the tolerance with a finite step."""


class NonConvergent(TmsqueezeError):
    """Adaptive quadrature refinement stalled before reaching tolerance."""


class UnphysicalState(TmsqueezeError):
    """Covariance matrix violates the uncertainty principle or positivity."""


class DimensionMismatch(TmsqueezeError):
    """Array arguments have incompatible or unexpected dimensions."""


class NotTTMSSLike(TmsqueezeError):
    """State is outside the thermal two-mode-squeezed family (artanh domain)."""


class UnstableRegime(TmsqueezeError):
    """Requested couplings violate the stable-regime constraint G+ < G-."""


class AsymmetricParams(TmsqueezeError):
    """Closed-form result requires symmetric damping and occupations."""


class DegenerateDenominator(TmsqueezeError):
    """Closed-form expression evaluated at a vanishing denominator."""


class NegativeOccupation(TmsqueezeError):
    """An occupation inferred from data came out significantly negative."""


class ConfigError(TmsqueezeError):
    """Scenario configuration is missing, inconsistent, or malformed."""


class RegimeWarning(UserWarning):
    """Parameter regime warning (approximations may degrade)."""
