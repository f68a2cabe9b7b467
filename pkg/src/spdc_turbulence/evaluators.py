"""Rate evaluators: analytic Gaussian engine, printed closed form, quadrature.

Three independent routes to the coincidence rate R(x1, x2):

* ``rate_gaussian_engine``  - trusted path.  Applies the n-dimensional
  Gaussian identity to the assembled quadratic form.
* ``rate_quadrature``       - oracle path.  Direct numerical integration
  of the same form (see quadrature module).
* ``rate_closed_form_as_printed`` - diagnostic only.  A verbatim
  transcription of a previously published closed-form reduction whose
  printed constants contain transcription defects; it is reconciled
  against the engine in discrepancy reports but never trusted.

The Gaussian identity used by the engine:

    int exp(-rho^T A rho + b^T rho) d^n rho
        = pi^(n/2) det(A)^(-1/2) exp(b^T A^-1 b / 4)

valid for complex symmetric A with Re(A) positive definite.  det(A)^(-1/2)
must stay on the branch continuously connected to real positive matrices:
every eigenvalue of A lies in the open right half-plane (the numerical
range of A has positive real part), so summing principal half-logs of the
eigenvalues tracks that branch continuously in the parameters, whereas a
principal square root of det(A) itself would jump when arg det crosses pi.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateIntegrandError,
    EvaluationError,
    ParameterError,
    SingularConstantError,
)
from .kernels import (
    ComplexQuadraticForm,
    TurbulenceKernelMode,
    build_quadratic_form,
)
from .params import (
    NO_TURBULENCE,
    ChannelParams,
    CrystalParams,
    PumpParams,
    lateral_coherence_length,
    signal_idler_wavelengths,
    wavevector,
)
from .quadrature import integrate_gaussian_form

__all__ = [
    "Method",
    "RateResult",
    "ClosedFormConstants",
    "IllConditionedFormWarning",
    "CONDITION_WARNING_THRESHOLD",
    "gaussian_integral",
    "rate_gaussian_engine",
    "closed_form_constants",
    "rate_closed_form_as_printed",
    "rate_quadrature",
    "evaluate_rate",
]


class IllConditionedFormWarning(UserWarning):
    """The quadratic form's matrix condition number exceeds the trust bound."""


CONDITION_WARNING_THRESHOLD = 1e12
_IMAG_RESIDUE_BOUND = 1e-8


class Method(enum.Enum):
    GAUSSIAN_ENGINE = "engine"
    CLOSED_FORM_AS_PRINTED = "closed-form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class RateResult:
    """A single evaluated coincidence rate.

    value is the (nonnegative) rate; imag_residue is the magnitude of the
    imaginary part the route discarded, a numerical-health indicator that
    the engine additionally bounds at 1e-8 relative.
    """

    value: float
    imag_residue: float
    method: Method
    note: str | None = None

    def __post_init__(self):
        if not self.value >= 0.0:
            raise EvaluationError(
                f"rate must be nonnegative, got {self.value!r} ({self.method})"
            )


def _reduce_form(form: ComplexQuadraticForm) -> tuple[complex, float]:
    """Apply the Gaussian identity; return (integral value, condition number)."""
    a = form.matrix_a
    min_real_eig = np.linalg.eigvalsh(a.real).min()
    if not min_real_eig > 0:
        raise DegenerateIntegrandError(
            f"Re(A) is not positive definite (min eigenvalue {min_real_eig:g}); "
            "the Gaussian identity does not apply"
        )
    eigs = np.linalg.eigvals(a)
    if not (eigs.real > 0).all():
        raise DegenerateIntegrandError(
            "an eigenvalue of A left the right half-plane "
            f"(min Re {eigs.real.min():g}); branch tracking is undefined"
        )
    half_log_det = 0.5 * complex(np.sum(np.log(eigs)))
    quad = 0.25 * complex(form.vector_b @ np.linalg.solve(a, form.vector_b))
    value = cmath.exp(
        form.scalar_c + 0.5 * form.dim * math.log(math.pi) - half_log_det + quad
    )
    return value, float(np.linalg.cond(a))


def gaussian_integral(form: ComplexQuadraticForm) -> complex:
    """Closed-form value of the n-dimensional complex Gaussian integral.

    Warns with IllConditionedFormWarning when cond(A) > 1e12.
    """
    value, cond = _reduce_form(form)
    if cond > CONDITION_WARNING_THRESHOLD:
        warnings.warn(
            f"quadratic form is ill-conditioned (cond(A) = {cond:.3g})",
            IllConditionedFormWarning,
            stacklevel=2,
        )
    return value


def rate_gaussian_engine(
    x1: float,
    x2: float,
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
) -> RateResult:
    """Trusted-path coincidence rate via the analytic Gaussian identity."""
    form = build_quadratic_form(x1, x2, pump, crystal, channel, mode)
    integral, cond = _reduce_form(form)
    value = integral.real
    residue = abs(integral.imag)
    if value < 0.0:
        raise EvaluationError(
            f"engine produced a negative rate {value!r} at x1={x1!r}, x2={x2!r}"
        )
    if residue > _IMAG_RESIDUE_BOUND * max(value, np.finfo(float).tiny):
        raise EvaluationError(
            f"imaginary residue {residue:g} exceeds {_IMAG_RESIDUE_BOUND:g} "
            f"of the rate {value:g} at x1={x1!r}, x2={x2!r}"
        )
    note = None
    if cond > CONDITION_WARNING_THRESHOLD:
        note = f"ill-conditioned quadratic form: cond(A) = {cond:.3g}"
    return RateResult(
        value=value, imag_residue=residue, method=Method.GAUSSIAN_ENGINE, note=note
    )


# Printed closed form (diagnostic path) --------------------------------------


@dataclass(frozen=True)
class ClosedFormConstants:
    """The thirteen printed reduction constants, transcribed verbatim.

    Known transcription defects are preserved deliberately (bare alpha
    terms with mismatched dimensions, a dimensionless -1 inside a length-
    squared group downstream); this dataclass exists for reconciliation,
    not for trusted evaluation.
    """

    a: float
    a1: complex
    a2: complex
    a3: complex
    a4: complex
    a5: complex
    a6: complex
    m1: complex
    m2: complex
    m3: complex
    m4: complex
    m5: complex
    alpha: float

    def as_dict(self) -> dict[str, complex]:
        return {
            "a": self.a,
            "a1": self.a1,
            "a2": self.a2,
            "a3": self.a3,
            "a4": self.a4,
            "a5": self.a5,
            "a6": self.a6,
            "m1": self.m1,
            "m2": self.m2,
            "m3": self.m3,
            "m4": self.m4,
            "m5": self.m5,
        }


def closed_form_constants(
    pump: PumpParams, crystal: CrystalParams, channel: ChannelParams
) -> ClosedFormConstants:
    """Evaluate the printed constants at the given parameters.

    Uses the signal-wavelength lateral coherence length for alpha (the
    printed form assumes a single alpha; the degenerate default makes the
    signal and idler values identical).  A fully coherent pump substitutes
    the structural 1/delta^2 -> 0 limit.  cn2 = 0 is rejected: alpha
    appears standalone in two constants and diverges.
    """
    k_p = wavevector(pump.wavelength)
    z = channel.z
    length = crystal.length
    gamma = crystal.gamma
    lam_s, _ = signal_idler_wavelengths(pump, crystal)
    alpha = lateral_coherence_length(channel.cn2, wavevector(lam_s), z)
    if alpha is NO_TURBULENCE:
        raise SingularConstantError(
            "the printed constants contain standalone alpha terms and are "
            "undefined for a turbulence-free channel (cn2 = 0)"
        )
    inv_d2 = 0.0 if pump.is_fully_coherent else 1.0 / pump.delta**2
    inv_16s2 = 1.0 / (16.0 * pump.sigma**2)

    a = (
        4.0 * math.pi * k_p / (length * math.sqrt(gamma * gamma + 1.0))
    ) * (k_p / (4.0 * math.pi * z)) ** 2
    a1 = -k_p / (4.0 * length * (1j + gamma)) + inv_d2 / 8.0 + inv_16s2
    a2 = -k_p / (4.0 * length * (-1j + gamma)) + inv_d2 / 8.0 + inv_16s2
    a3 = inv_d2 / 4.0 + 2.0 / (alpha * alpha)
    m1 = -1j * k_p / (4.0 * z) + k_p / (4.0 * length * (-1j + gamma)) + a3 / 2.0 + inv_16s2
    m2 = 1j * k_p / (4.0 * z) + k_p / (4.0 * length * (1j + gamma)) + a3 / 2.0 + inv_16s2
    a4 = a1 * a3 / m1 + inv_d2 / 4.0
    a5 = a3 + a1 * inv_d2 / (4.0 * m1)
    m3 = m1 - a1 * a1 / m1
    m4 = m2 - a3 * a3 / (4.0 * m1) - a4 * a4 / (4.0 * m3)
    a6 = -2.0 * a2 + a4 * a5 / (2.0 * m3) + a3 * alpha / (2.0 * m1)
    m5 = m2 - alpha * alpha / (4.0 * m1) - a6 * a6 / (4.0 * m4) - a5 * a5 / (4.0 * m3)

    constants = ClosedFormConstants(
        a=a, a1=a1, a2=a2, a3=a3, a4=a4, a5=a5, a6=a6,
        m1=m1, m2=m2, m3=m3, m4=m4, m5=m5, alpha=float(alpha),
    )
    for name, value in constants.as_dict().items():
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise SingularConstantError(f"constant {name} is not finite: {value!r}")
    for name in ("m1", "m3", "m4", "m5"):
        if abs(getattr(constants, name)) == 0.0:
            raise SingularConstantError(f"constant {name} vanishes (denominator)")
    return constants


def rate_closed_form_as_printed(
    x1: float,
    x2: float,
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
) -> RateResult:
    """Coincidence rate from the printed closed-form expression, verbatim.

    The value is the modulus of the printed complex expression.  This path
    is diagnostic: its deviation from the engine is reported, never
    asserted against.
    """
    c = closed_form_constants(pump, crystal, channel)
    k_p = wavevector(pump.wavelength)
    z = channel.z
    inv_d2 = 0.0 if pump.is_fully_coherent else 1.0 / pump.delta**2
    kz2 = k_p * k_p / (16.0 * z * z)

    f1 = -(kz2 / c.m1) * (
        x1 * x1
        + c.a1 * c.a1 * x1 * x1 / (c.m1 * c.m3)
        + x2 * x2 * c.m1 / c.m3
        + 2.0 * c.a1 * x1 * x2 / c.m3
    ) + (kz2 / c.m4) * (
        -1.0
        - c.a3 * c.a3 * x1 * x1 / (4.0 * c.m1 * c.m1)
        + c.a3 * x1 * x1 / c.m1
        + c.a4 * x1 * x2 / c.m3
        - c.a4 * c.a4 * x2 * x2 / (4.0 * c.m3 * c.m3)
    )
    f2 = (c.a4 * k_p * k_p * x1 / (16.0 * z * z * c.m1 * c.m3 * c.m4)) * (
        c.a1 * x1
        - c.a3 * x2 / 2.0
        - c.a1 * c.a1 * x1 / (4.0 * c.m1 * c.m3)
        - c.a1 * c.a3 * x1 / (2.0 * c.m1)
        - c.a1 * x2 / (2.0 * c.m3)
    ) + (1.0 / (4.0 * c.m5)) * (
        -1j * k_p * x2 / (2.0 * z)
        + 1j * k_p * x1 * inv_d2 / (16.0 * c.m1 * z)
        + (1j * c.a5 * k_p / (4.0 * c.m3 * z)) * (c.a1 * x1 / c.m1)
    ) ** 2
    f3 = (1j * c.a6 * k_p / (4.0 * c.m1 * z)) * (
        c.a1 * c.a4 * x1 / (2.0 * c.m1 * c.m3)
        + c.a4 * x2 / (2.0 * c.m3)
        - x1
        + c.a3 * x1 / (2.0 * c.m1)
    )

    exponent = f1 + f2 + f3
    log_magnitude = math.log(c.a) + exponent.real
    value = math.exp(log_magnitude) if log_magnitude < 709.0 else math.inf
    residue = value * abs(math.sin(exponent.imag)) if math.isfinite(value) else math.inf
    return RateResult(
        value=value,
        imag_residue=residue,
        method=Method.CLOSED_FORM_AS_PRINTED,
    )


def rate_quadrature(
    x1: float,
    x2: float,
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
    rel_tol: float = 1e-3,
) -> RateResult:
    """Oracle-path coincidence rate via direct numerical integration."""
    if not 1e-6 <= rel_tol <= 1e-2:
        raise ParameterError(
            f"rel_tol must lie in [1e-6, 1e-2], got {rel_tol!r}"
        )
    form = build_quadratic_form(x1, x2, pump, crystal, channel, mode)
    result = integrate_gaussian_form(form, rel_tol=rel_tol)
    value = result.value.real
    return RateResult(
        value=value,
        imag_residue=abs(result.value.imag),
        method=Method.QUADRATURE,
        note=(
            f"{result.points_per_axis} points/axis over {result.levels_used} "
            f"refinement levels; last change {result.error_bound:.3g}"
        ),
    )


def evaluate_rate(
    x1: float,
    x2: float,
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
    method: Method = Method.GAUSSIAN_ENGINE,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
    rel_tol: float = 1e-3,
) -> RateResult:
    """Dispatch to the evaluator selected by ``method``."""
    if method is Method.GAUSSIAN_ENGINE:
        return rate_gaussian_engine(x1, x2, pump, crystal, channel, mode)
    if method is Method.CLOSED_FORM_AS_PRINTED:
        return rate_closed_form_as_printed(x1, x2, pump, crystal, channel)
    if method is Method.QUADRATURE:
        return rate_quadrature(x1, x2, pump, crystal, channel, mode, rel_tol)
    raise ParameterError(f"unknown evaluation method {method!r}")
