"""Direct numerical integration of complex Gaussian quadratic forms.

This is the slow-but-trustable route against which the analytic engine is
reconciled, so it deliberately avoids the engine's machinery: no complex
determinants, no branch choices, no closed-form Gaussian identity.  The
integrand exp(-y^T A y + b^T y) is whitened by the (real) eigenbasis of
Re(A), which turns the real part of the quadratic form into the identity.
A second real orthogonal rotation diagonalises the remaining imaginary
part, so in the rotated frame the integrand factorises exactly into 1D
profiles exp(-(1 + i m_j) w^2 + beta_j w).  Each factor is integrated by
composite Gauss-Legendre panels on a box of +-6 Gaussian 1/e half-widths
(truncation below e^-36 of the peak), recentred on the magnitude maximum.
Panel counts climb a fixed ladder until two successive refinements of the
product agree to the requested relative tolerance.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateIntegrandError, ParameterError, QuadratureConvergenceError
from .kernels import ComplexQuadraticForm

__all__ = ["QuadratureResult", "integrate_gaussian_form"]

_PANEL_ORDER = 8
_PANEL_LADDER = (1, 2, 3, 4, 6, 8, 12, 16, 24, 32)
_BOX_HALF_WIDTH = 6.0
_COUPLING_BOUND = 1e-6


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_bound: float
    levels_used: int
    points_per_axis: int


def _panel_axis(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [lo, hi] split into panels."""
    x, w = np.polynomial.legendre.leggauss(_PANEL_ORDER)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _axis_value(alpha: complex, beta: complex, panels: int) -> complex:
    center = beta.real / (2.0 * alpha.real)
    nodes, weights = _panel_axis(
        center - _BOX_HALF_WIDTH, center + _BOX_HALF_WIDTH, panels
    )
    return complex(np.sum(weights * np.exp(-alpha * nodes * nodes + beta * nodes)))


def integrate_gaussian_form(
    form: ComplexQuadraticForm, rel_tol: float = 1e-3
) -> QuadratureResult:
    """Integrate exp(-rho^T A rho + b^T rho + c) over R^dim numerically.

    Requires Re(A) positive definite (otherwise the truncation box is
    undefined).  Raises QuadratureConvergenceError when the panel ladder
    runs out before two successive refinements agree within rel_tol.
    """
    if not (isinstance(rel_tol, float) and 0.0 < rel_tol):
        raise ParameterError(f"rel_tol must be positive, got {rel_tol!r}")
    a = form.matrix_a
    n = form.dim
    if n > 4:
        raise ParameterError(f"quadrature supports dim <= 4, got {n}")
    lam, q = np.linalg.eigh(a.real)
    if not lam.min() > 0:
        raise DegenerateIntegrandError(
            f"Re(A) is not positive definite (min eigenvalue {lam.min():g}); "
            "the quadrature box is undefined"
        )
    scale = q @ np.diag(lam**-0.5)
    white = scale.T @ a @ scale
    log_jacobian = -0.5 * float(np.sum(np.log(lam)))

    # Rotate so the (symmetric) imaginary part becomes diagonal; the real
    # part stays the identity under any orthogonal rotation.
    imag_sym = 0.5 * (white.imag + white.imag.T)
    m_diag, rot = np.linalg.eigh(imag_sym)
    rotated = rot.T @ white @ rot
    beta = rot.T @ (scale.T @ form.vector_b)
    off = rotated - np.diag(np.diag(rotated))
    coupling = float(np.max(np.abs(off))) if n > 1 else 0.0
    if coupling > _COUPLING_BOUND * (1.0 + float(np.max(np.abs(np.diag(rotated))))):
        raise DegenerateIntegrandError(
            f"residual cross-coupling {coupling:g} after whitening; "
            "the quadratic form is too ill-conditioned to integrate"
        )
    alphas = np.diag(rotated)

    prefactor = cmath.exp(form.scalar_c + log_jacobian)
    prev = None
    value = None
    err = np.inf
    for level, panels in enumerate(_PANEL_LADDER, start=1):
        value = 1.0 + 0.0j
        for alpha, b_j in zip(alphas, beta):
            value *= _axis_value(complex(alpha), complex(b_j), panels)
        if prev is not None:
            err = abs(value - prev)
            if err <= rel_tol * max(abs(value), np.finfo(float).tiny):
                return QuadratureResult(
                    value=prefactor * value,
                    error_bound=err * abs(prefactor),
                    levels_used=level,
                    points_per_axis=panels * _PANEL_ORDER,
                )
        prev = value
    raise QuadratureConvergenceError(
        f"quadrature did not reach rel_tol={rel_tol:g} after "
        f"{_PANEL_LADDER[-1] * _PANEL_ORDER} points per axis "
        f"(last relative change {err / max(abs(value), np.finfo(float).tiny):g})",
        estimate=prefactor * value,
        error_bound=err * abs(prefactor),
    )
