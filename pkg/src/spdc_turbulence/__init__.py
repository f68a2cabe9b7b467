"""Coincidence rate of down-converted photon pairs behind a turbulent path.

The pump is a Gaussian Schell-model beam whose transverse coherence length
delta interpolates between a fully coherent laser (delta = inf) and a
quasi-incoherent source (delta << sigma).  Both photons of each pair
propagate a distance z through Kolmogorov turbulence of strength cn2
before coincidence detection.  The headline effect: shrinking delta makes
the coincidence profile nearly immune to turbulence, at the price of a
broader, weaker profile.

The rate reduces to a four-dimensional complex Gaussian integral over the
source plane; this package assembles that quadratic form exactly and
evaluates it three ways (analytic reduction, direct quadrature, and a
verbatim transcription of the published closed form kept for diagnosis).
"""

from .errors import (
    ConfigError,
    DegenerateIntegrandError,
    EvaluationError,
    ParameterError,
    QuadratureConvergenceError,
    SingularConstantError,
    UnitParseError,
)
from .evaluators import (
    ClosedFormConstants,
    IllConditionedFormWarning,
    Method,
    RateResult,
    closed_form_constants,
    evaluate_rate,
    gaussian_integral,
    rate_closed_form_as_printed,
    rate_gaussian_engine,
    rate_quadrature,
)
from .kernels import (
    ComplexQuadraticForm,
    TurbulenceKernelMode,
    build_quadratic_form,
    gaussian_schell_correlation,
    impulse_function,
    phase_matching_surrogate,
    rate_prefactor,
    turbulence_kernel,
)
from .params import (
    FULLY_COHERENT,
    NO_TURBULENCE,
    ChannelParams,
    CrystalParams,
    DetectorScan,
    FullyCoherent,
    NoTurbulence,
    PumpParams,
    format_quantity,
    lateral_coherence_length,
    parse_quantity,
    pump_delta_from_diffuser,
    signal_idler_wavelengths,
    wavevector,
)
from .provenance import canonical_params, fingerprint
from .quadrature import QuadratureResult, integrate_gaussian_form
from .scenarios import (
    FIGURE_NAMES,
    CoincidenceProfile,
    FigurePreset,
    RobustnessCurve,
    ScanScenario,
    SweepSeries,
    default_scan,
    delta_label,
    fig5_cn2_grid,
    figure_preset,
    profile_half_width,
    robustness_curve,
    scan_profile,
    turbulence_contrast,
)
from .validation import run_validation

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChannelParams",
    "ClosedFormConstants",
    "CoincidenceProfile",
    "ComplexQuadraticForm",
    "ConfigError",
    "CrystalParams",
    "DegenerateIntegrandError",
    "DetectorScan",
    "EvaluationError",
    "FIGURE_NAMES",
    "FULLY_COHERENT",
    "FigurePreset",
    "FullyCoherent",
    "IllConditionedFormWarning",
    "Method",
    "NO_TURBULENCE",
    "NoTurbulence",
    "ParameterError",
    "PumpParams",
    "QuadratureConvergenceError",
    "QuadratureResult",
    "RateResult",
    "RobustnessCurve",
    "ScanScenario",
    "SingularConstantError",
    "SweepSeries",
    "TurbulenceKernelMode",
    "UnitParseError",
    "build_quadratic_form",
    "canonical_params",
    "closed_form_constants",
    "default_scan",
    "delta_label",
    "evaluate_rate",
    "fig5_cn2_grid",
    "figure_preset",
    "fingerprint",
    "format_quantity",
    "gaussian_integral",
    "gaussian_schell_correlation",
    "impulse_function",
    "integrate_gaussian_form",
    "lateral_coherence_length",
    "parse_quantity",
    "phase_matching_surrogate",
    "profile_half_width",
    "pump_delta_from_diffuser",
    "rate_closed_form_as_printed",
    "rate_gaussian_engine",
    "rate_prefactor",
    "rate_quadrature",
    "robustness_curve",
    "run_validation",
    "scan_profile",
    "signal_idler_wavelengths",
    "turbulence_contrast",
    "turbulence_kernel",
    "wavevector",
]
