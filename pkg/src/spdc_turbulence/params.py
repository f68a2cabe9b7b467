"""Physical parameters, units, and derived coherence scales.

All lengths are SI meters internally; unit suffixes exist only at the
text/CLI boundary (``parse_quantity`` / ``format_quantity``).  Turbulence
strength C_n^2 carries its usual m^(-2/3) and is read as a bare number.

Two structural sentinels replace "infinity as a big float":

* ``FULLY_COHERENT``  - pump transverse coherence length delta = infinity.
* ``NO_TURBULENCE``   - lateral coherence length alpha = infinity (C_n^2 = 0).

Downstream kernels branch on the sentinels and drop the corresponding
1/delta^2 and 1/alpha^2 terms exactly instead of evaluating them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnitParseError

__all__ = [
    "FULLY_COHERENT",
    "FullyCoherent",
    "NO_TURBULENCE",
    "NoTurbulence",
    "PumpParams",
    "CrystalParams",
    "ChannelParams",
    "DetectorScan",
    "wavevector",
    "lateral_coherence_length",
    "pump_delta_from_diffuser",
    "parse_quantity",
    "format_quantity",
    "signal_idler_wavelengths",
    "LENGTH_UNITS",
]


class FullyCoherent:
    """Singleton flag: the pump Schell-model coherence length is infinite."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FULLY_COHERENT"


class NoTurbulence:
    """Singleton flag: the channel is turbulence-free (alpha = infinity)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NO_TURBULENCE"


FULLY_COHERENT = FullyCoherent()
NO_TURBULENCE = NoTurbulence()


def _require_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


def _require_finite(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PumpParams:
    """Gaussian Schell-model pump beam at the crystal plane.

    wavelength: vacuum pump wavelength (m)
    sigma:      transverse intensity RMS width sigma (m)
    delta:      transverse coherence length (m), or FULLY_COHERENT
    amplitude:  dimensionless pump field amplitude A_p
    """

    wavelength: float = 405e-9
    sigma: float = 1.0e-3
    delta: float | FullyCoherent = FULLY_COHERENT
    amplitude: float = 1.0

    def __post_init__(self):
        _require_positive("pump wavelength", self.wavelength)
        _require_positive("pump sigma", self.sigma)
        if not isinstance(self.delta, FullyCoherent):
            _require_positive("pump delta", self.delta)
        _require_finite("pump amplitude", self.amplitude)
        if self.amplitude <= 0:
            raise ParameterError(
                f"pump amplitude must be positive, got {self.amplitude!r}"
            )

    @property
    def is_fully_coherent(self) -> bool:
        return isinstance(self.delta, FullyCoherent)


@dataclass(frozen=True)
class CrystalParams:
    """Thin nonlinear crystal emitting degenerate signal/idler pairs.

    length:  crystal thickness L along propagation (m)
    gamma:   dimensionless phase-matching shape parameter; the Gaussian
             surrogate for the longitudinal phase-matching response is
             exp(-k_p u^2 / (4 L (gamma + i))), so gamma controls the
             damping-to-chirp ratio.  Must be > 0 for an integrable rate.
    wavelength_signal / wavelength_idler: vacuum wavelengths (m); None
             means degenerate, i.e. twice the pump wavelength.
    """

    length: float = 2.0e-3
    gamma: float = 1.0
    wavelength_signal: float | None = None
    wavelength_idler: float | None = None

    def __post_init__(self):
        _require_positive("crystal length", self.length)
        _require_finite("crystal gamma", self.gamma)
        if self.wavelength_signal is not None:
            _require_positive("signal wavelength", self.wavelength_signal)
        if self.wavelength_idler is not None:
            _require_positive("idler wavelength", self.wavelength_idler)


def signal_idler_wavelengths(
    pump: PumpParams, crystal: CrystalParams
) -> tuple[float, float]:
    """Resolve signal/idler wavelengths, defaulting to degenerate 2*lambda_p."""
    lam_s = crystal.wavelength_signal
    lam_i = crystal.wavelength_idler
    if lam_s is None:
        lam_s = 2.0 * pump.wavelength
    if lam_i is None:
        lam_i = 2.0 * pump.wavelength
    return lam_s, lam_i


@dataclass(frozen=True)
class ChannelParams:
    """Atmospheric link shared by signal and idler.

    cn2: refractive-index structure constant C_n^2 (m^(-2/3)); 0 disables
         turbulence structurally.
    z:   propagation distance crystal -> detection plane (m).
    """

    cn2: float = 0.0
    z: float = 20.0e3

    def __post_init__(self):
        if not (isinstance(self.cn2, (int, float)) and math.isfinite(self.cn2)):
            raise ParameterError(f"cn2 must be finite, got {self.cn2!r}")
        if self.cn2 < 0:
            raise ParameterError(f"cn2 must be >= 0, got {self.cn2!r}")
        _require_positive("link distance z", self.z)


@dataclass(frozen=True)
class DetectorScan:
    """Transverse detector-position grid: x1 fixed, x2 swept."""

    x1: float = 0.0
    x2_min: float = -1.0
    x2_max: float = 1.0
    n_points: int = 201

    def __post_init__(self):
        _require_finite("x1", self.x1)
        _require_finite("x2_min", self.x2_min)
        _require_finite("x2_max", self.x2_max)
        if not self.x2_min < self.x2_max:
            raise ParameterError(
                f"x2_min must be < x2_max, got {self.x2_min!r} >= {self.x2_max!r}"
            )
        if not (isinstance(self.n_points, int) and self.n_points >= 2):
            raise ParameterError(f"n_points must be an int >= 2, got {self.n_points!r}")

    def positions(self) -> np.ndarray:
        return np.linspace(self.x2_min, self.x2_max, self.n_points)


def wavevector(wavelength: float) -> float:
    """Vacuum wavevector magnitude k = 2 pi / lambda (rad/m)."""
    _require_positive("wavelength", wavelength)
    return 2.0 * math.pi / wavelength


def lateral_coherence_length(
    cn2: float, k: float, z: float
) -> float | NoTurbulence:
    """Lateral coherence length of a wave after a Kolmogorov channel.

    alpha = (0.55 C_n^2 k^2 z)^(-3/5).  Decreasing in each of cn2, k, z:
    stronger turbulence, shorter wavelength, or a longer path all shrink
    the transverse patch over which the channel stays phase-coherent.
    cn2 = 0 returns the NO_TURBULENCE flag rather than a float.
    """
    if not (isinstance(cn2, (int, float)) and math.isfinite(cn2) and cn2 >= 0):
        raise ParameterError(f"cn2 must be >= 0 and finite, got {cn2!r}")
    _require_positive("wavevector k", k)
    _require_positive("distance z", z)
    if cn2 == 0:
        return NO_TURBULENCE
    return (0.55 * cn2 * k * k * z) ** -0.6


def pump_delta_from_diffuser(
    wavelength: float, focal_length: float, grain_size: float
) -> float:
    """Coherence length synthesized by a rotating ground-glass diffuser.

    delta = 3.832 lambda f / (2 pi d): the first Bessel-J1 zero sets the
    speckle correlation width that a lens of focal length f images onto
    the crystal plane from grains of size d.
    """
    _require_positive("wavelength", wavelength)
    _require_positive("focal length", focal_length)
    _require_positive("grain size", grain_size)
    return 3.832 * wavelength * focal_length / (2.0 * math.pi * grain_size)


# Text/CLI quantity handling ------------------------------------------------

LENGTH_UNITS: dict[str, float] = {
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "nm": 1e-9,
    "km": 1e3,
}


def parse_quantity(text: str, allow_infinite: bool = False) -> float | FullyCoherent:
    """Parse ``<number><unit>`` into SI meters, or a bare number.

    Unit suffixes: m, mm, um, nm, km.  A bare number (no suffix) is taken
    as already-SI (used for C_n^2 and dimensionless values).  The token
    "inf" is accepted only when allow_infinite is set (pump delta) and
    yields FULLY_COHERENT.
    """
    if not isinstance(text, str):
        raise UnitParseError(f"expected a string quantity, got {text!r}")
    token = text.strip()
    if token.lower() in ("inf", "infinity"):
        if allow_infinite:
            return FULLY_COHERENT
        raise UnitParseError(f"'inf' is not accepted for this quantity: {text!r}")
    unit = ""
    for suffix in sorted(LENGTH_UNITS, key=len, reverse=True):
        if token.endswith(suffix):
            unit = suffix
            break
    number_part = token[: len(token) - len(unit)].strip() if unit else token
    # Guard: "1e-14" ends with "m" lexically but the "m" belongs to the
    # exponent only when stripping it leaves a dangling exponent marker.
    if unit and (number_part.endswith(("e", "E", "+", "-")) or number_part == ""):
        unit = ""
        number_part = token
    try:
        value = float(number_part)
    except ValueError:
        raise UnitParseError(f"cannot parse quantity {text!r}") from None
    if not math.isfinite(value):
        raise UnitParseError(f"quantity must be finite, got {text!r}")
    return value * LENGTH_UNITS[unit] if unit else value


def format_quantity(value_si: float, unit: str = "m") -> str:
    """Render an SI value in the given unit so that parse_quantity round-trips."""
    if unit not in LENGTH_UNITS:
        raise UnitParseError(f"unknown unit {unit!r}")
    return f"{value_si / LENGTH_UNITS[unit]!r}{unit}"
