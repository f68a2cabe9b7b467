"""Pointwise integrand kernels and the assembled complex quadratic form.

The coincidence rate is a 4-D Gaussian-type integral over the birth-plane
coordinates rho = (rho_s, rho_i, rho_s', rho_i') of the signal/idler pair
and their conjugated partners.  Every factor of the integrand is available
here as a standalone kernel, and ``build_quadratic_form`` assembles their
logs into

    exponent(rho) = -rho^T A rho + b^T rho + c

with A complex symmetric (4x4), b complex, c complex.  The factors:

* pump envelope      exp(-((rho_s+rho_i)^2 + (rho_s'+rho_i')^2) / 16 sigma^2)
* pump coherence     exp(-(rho_s+rho_i-rho_s'-rho_i')^2 / 8 delta^2)
* detector phases    exp(+(i k_p/4z)(rho_s^2 - rho_s'^2 - 2 x1 rho_s + 2 x1 rho_s'))
                     and the idler twin with x2
* turbulence         exp(-(rho_s-rho_s')^2/alpha_s^2 - (rho_i-rho_i')^2/alpha_i^2)
* phase matching     Lambda(rho_s-rho_i) Lambda*(rho_s'-rho_i')
* prefactor          (4 pi k_p / (L sqrt(gamma^2+1))) (k_p/4 pi z)^2 A_p^2,
                     absorbed into c.

The pump factors come from evaluating the Schell-model correlation at the
pair midpoints; the midpoints carry the sum coordinates, so the Gaussian
phase-matching surrogate acts on the difference coordinates (signal-idler
birth separation), which is what keeps Re(A) positive definite.

Both photons of each conjugate pair share one detector coordinate, so the
detector-side separation u of the turbulence kernel vanishes in the
assembled form and the kernel mode does not change any rate; the mode
matters only for the standalone two-point kernel.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateIntegrandError, ParameterError
from .params import (
    NO_TURBULENCE,
    ChannelParams,
    CrystalParams,
    NoTurbulence,
    PumpParams,
    lateral_coherence_length,
    signal_idler_wavelengths,
    wavevector,
)

__all__ = [
    "TurbulenceKernelMode",
    "ComplexQuadraticForm",
    "gaussian_schell_correlation",
    "turbulence_kernel",
    "impulse_function",
    "phase_matching_surrogate",
    "rate_prefactor",
    "build_quadratic_form",
]


class TurbulenceKernelMode(enum.Enum):
    """Ensemble-averaged two-point turbulence kernel variants.

    CROSS_TERM uses the quadratic structure-function approximation
    exp(-(u^2 + u v + v^2)/alpha^2).  AS_PRINTED keeps a bare (dimensionally
    inconsistent) middle term, exp(-(u^2 + u + v^2)/alpha^2), and exists as
    a diagnostic for reconciliation against the cross-term default.
    """

    CROSS_TERM = "cross-term"
    AS_PRINTED = "as-printed"


@dataclass(frozen=True, eq=False)
class ComplexQuadraticForm:
    """exp(-rho^T A rho + b^T rho + c) integrand over R^dim.

    matrix_a must be complex symmetric; positive definiteness of its real
    part is what makes the integrand absolutely integrable and is checked
    by the consumers (engine/quadrature), not here, so that deliberately
    degenerate forms can still be constructed and inspected.
    """

    matrix_a: np.ndarray
    vector_b: np.ndarray
    scalar_c: complex
    dim: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.matrix_a, dtype=complex)
        b = np.asarray(self.vector_b, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"matrix_a must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ParameterError(
                f"vector_b shape {b.shape} does not match matrix dim {a.shape[0]}"
            )
        scale = np.abs(a).max()
        if not np.isfinite(scale) or scale == 0:
            raise ParameterError("matrix_a must be finite and nonzero")
        asym = np.abs(a - a.T).max()
        if asym > 1e-12 * scale:
            raise ParameterError(
                f"matrix_a must be symmetric: max|A - A^T| = {asym:g} "
                f"exceeds 1e-12 of scale {scale:g}"
            )
        object.__setattr__(self, "matrix_a", a)
        object.__setattr__(self, "vector_b", b)
        object.__setattr__(self, "scalar_c", complex(self.scalar_c))
        object.__setattr__(self, "dim", a.shape[0])

    def exponent_at(self, rho: np.ndarray) -> complex:
        """Evaluate -rho^T A rho + b^T rho + c at a single real point."""
        rho = np.asarray(rho, dtype=float)
        return complex(
            -rho @ self.matrix_a @ rho + self.vector_b @ rho + self.scalar_c
        )


def gaussian_schell_correlation(x: float, x_prime: float, pump: PumpParams) -> float:
    """Pump mutual correlation <V*(x') V(x)> of a Gaussian Schell-model beam.

    A_p exp(-(x^2 + x'^2)/4 sigma^2) exp(-(x' - x)^2 / 2 delta^2); the
    coherence factor is dropped exactly for a fully coherent pump.
    """
    envelope = -(x * x + x_prime * x_prime) / (4.0 * pump.sigma**2)
    if pump.is_fully_coherent:
        coherence = 0.0
    else:
        d = x_prime - x
        coherence = -(d * d) / (2.0 * pump.delta**2)
    return pump.amplitude * math.exp(envelope + coherence)


def turbulence_kernel(
    u: float,
    v: float,
    alpha: float | NoTurbulence,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
) -> float:
    """Turbulence ensemble average over paired random propagation phases.

    u is the detector-side separation, v the source-side separation, and
    alpha the lateral coherence length of the channel; alpha = NO_TURBULENCE
    makes the kernel identically 1.
    """
    if alpha is NO_TURBULENCE:
        return 1.0
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha > 0):
        raise ParameterError(f"alpha must be positive finite, got {alpha!r}")
    inv = 1.0 / (alpha * alpha)
    if mode is TurbulenceKernelMode.CROSS_TERM:
        return math.exp(-(u * u + u * v + v * v) * inv)
    if mode is TurbulenceKernelMode.AS_PRINTED:
        return math.exp(-(u * u + u + v * v) * inv)
    raise ParameterError(f"unknown turbulence kernel mode {mode!r}")


def impulse_function(x_det: float, x_src: float, k: float, z: float) -> complex:
    """Deterministic paraxial point-response between source and detector planes.

    h(x_det, x_src) = sqrt(-i k / 2 pi z) exp(-(i k / 2 z)(x_det^2 + x_src^2
    - 2 x_det x_src)); |h|^2 = k / 2 pi z independent of positions.
    """
    if not (k > 0 and z > 0):
        raise ParameterError(f"impulse_function needs k > 0 and z > 0, got {k}, {z}")
    amplitude = complex(0.0, -k / (2.0 * math.pi * z)) ** 0.5
    phase = -1j * k / (2.0 * z) * (x_det * x_det + x_src * x_src - 2.0 * x_det * x_src)
    return amplitude * np.exp(phase)


def phase_matching_surrogate(
    u: float, crystal: CrystalParams, pump: PumpParams
) -> complex:
    """Gaussian surrogate for the phase-matching response.

    Lambda(u) = exp(-k_p u^2 / (4 L (gamma + i))) acting on the signal-idler
    birth separation u.  Lambda(0) = 1 and |Lambda| falls monotonically:
    |Lambda(u)|^2 = exp(-k_p u^2 gamma / (2 L (gamma^2 + 1))).
    """
    k_p = wavevector(pump.wavelength)
    return np.exp(-k_p * u * u / (4.0 * crystal.length * (crystal.gamma + 1j)))


def rate_prefactor(pump: PumpParams, crystal: CrystalParams, z: float) -> float:
    """Dimensional normalization multiplying the 4-D Gaussian integral.

    (4 pi k_p / (L sqrt(gamma^2 + 1))) (k_p / 4 pi z)^2 A_p^2: the paired
    propagator magnitudes contribute (k_p/4 pi z)^2 for degenerate photons,
    the phase-matching normalization the first factor, and the rate is
    bilinear in the pump field so the amplitude enters squared.
    """
    k_p = wavevector(pump.wavelength)
    gamma = crystal.gamma
    return (
        4.0
        * math.pi
        * k_p
        / (crystal.length * math.sqrt(gamma * gamma + 1.0))
        * (k_p / (4.0 * math.pi * z)) ** 2
        * pump.amplitude**2
    )


def _channel_alphas(
    pump: PumpParams, crystal: CrystalParams, channel: ChannelParams
) -> tuple[float | NoTurbulence, float | NoTurbulence]:
    lam_s, lam_i = signal_idler_wavelengths(pump, crystal)
    alpha_s = lateral_coherence_length(channel.cn2, wavevector(lam_s), channel.z)
    alpha_i = lateral_coherence_length(channel.cn2, wavevector(lam_i), channel.z)
    return alpha_s, alpha_i


def build_quadratic_form(
    x1: float,
    x2: float,
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
) -> ComplexQuadraticForm:
    """Assemble the 4-D integrand exponent for detectors at (x1, x2).

    Coordinate order is rho = (rho_s, rho_i, rho_s', rho_i').  The matrix
    is independent of the detector positions, which enter only through the
    linear term b (odd under (x1, x2) -> (-x1, -x2)).  Structural limits:
    a fully coherent pump contributes no 1/delta^2 term and cn2 = 0
    contributes no 1/alpha^2 terms - the entries are never built from
    large floats.

    Raises DegenerateIntegrandError if Re(A) is not positive definite
    (e.g. gamma <= 0), since the integrand is then not absolutely
    integrable.
    """
    if not isinstance(mode, TurbulenceKernelMode):
        raise ParameterError(f"unknown turbulence kernel mode {mode!r}")
    k_p = wavevector(pump.wavelength)
    z = channel.z
    envelope = 1.0 / (16.0 * pump.sigma**2)
    lam_plus = k_p / (4.0 * crystal.length * (crystal.gamma + 1j))
    phi = k_p / (4.0 * z)

    sum_unprimed = np.array([1.0, 1.0, 0.0, 0.0])
    sum_primed = np.array([0.0, 0.0, 1.0, 1.0])
    coherence_dir = np.array([1.0, 1.0, -1.0, -1.0])
    signal_pair = np.array([1.0, 0.0, -1.0, 0.0])
    idler_pair = np.array([0.0, 1.0, 0.0, -1.0])
    diff_unprimed = np.array([1.0, -1.0, 0.0, 0.0])
    diff_primed = np.array([0.0, 0.0, 1.0, -1.0])

    a = np.zeros((4, 4), dtype=complex)
    a += envelope * (np.outer(sum_unprimed, sum_unprimed) + np.outer(sum_primed, sum_primed))
    if not pump.is_fully_coherent:
        a += np.outer(coherence_dir, coherence_dir) / (8.0 * pump.delta**2)
    alpha_s, alpha_i = _channel_alphas(pump, crystal, channel)
    if alpha_s is not NO_TURBULENCE:
        a += np.outer(signal_pair, signal_pair) / (alpha_s * alpha_s)
    if alpha_i is not NO_TURBULENCE:
        a += np.outer(idler_pair, idler_pair) / (alpha_i * alpha_i)
    a += lam_plus * np.outer(diff_unprimed, diff_unprimed)
    a += np.conj(lam_plus) * np.outer(diff_primed, diff_primed)
    a += -1j * phi * np.diag([1.0, 1.0, -1.0, -1.0])

    b = -2j * phi * np.array([x1, x2, -x1, -x2], dtype=complex)
    c = complex(math.log(rate_prefactor(pump, crystal, z)))

    min_eig = np.linalg.eigvalsh(a.real).min()
    if not min_eig > 0:
        raise DegenerateIntegrandError(
            "Re(A) is not positive definite (min eigenvalue "
            f"{min_eig:g}); the integrand is not absolutely integrable for "
            f"gamma={crystal.gamma!r}, sigma={pump.sigma!r}, "
            f"delta={pump.delta!r}, cn2={channel.cn2!r}, z={channel.z!r}"
        )
    return ComplexQuadraticForm(matrix_a=a, vector_b=b, scalar_c=c)
