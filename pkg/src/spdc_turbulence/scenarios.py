"""Measurement scenarios: detector scans, robustness sweeps, figure presets.

A *scan* fixes the signal detector at x1 and sweeps the idler detector x2,
producing the transverse coincidence profile.  A *robustness curve* sits
both detectors at the origin and sweeps the turbulence strength, reporting
the peak rate normalized to the structurally turbulence-free baseline.

The presets reproduce the four standard theory configurations: scans for
a fully coherent pump and two partially coherent pumps across four link
distances and two turbulence strengths, and origin-rate robustness curves
for four coherence lengths at the longest link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EvaluationError, ParameterError
from .evaluators import Method, evaluate_rate
from .kernels import TurbulenceKernelMode
from .params import (
    FULLY_COHERENT,
    ChannelParams,
    CrystalParams,
    DetectorScan,
    FullyCoherent,
    PumpParams,
)
from .provenance import canonical_params, fingerprint

__all__ = [
    "CoincidenceProfile",
    "RobustnessCurve",
    "ScanScenario",
    "SweepSeries",
    "FigurePreset",
    "FIGURE_NAMES",
    "profile_half_width",
    "fig5_cn2_grid",
    "default_scan",
    "scan_profile",
    "robustness_curve",
    "figure_preset",
    "turbulence_contrast",
    "delta_label",
]

_FIG_DISTANCES_KM = (1.0, 5.0, 7.0, 20.0)
_FIG_CN2 = (1e-14, 5e-14)
_FIG_DELTAS: dict[str, float | FullyCoherent] = {
    "fig2": FULLY_COHERENT,
    "fig3": 0.0876e-3,
    "fig4": 0.0417e-3,
}
_FIG5_DELTAS: tuple[float | FullyCoherent, ...] = (
    FULLY_COHERENT,
    0.0876e-3,
    0.0417e-3,
    0.0253e-3,
)
_FIG5_Z = 20.0e3
_FIG5_GRID_SPAN = (1e-15, 5e-14)
_FIG5_GRID_POINTS = 10

FIGURE_NAMES = ("fig2", "fig3", "fig4", "fig5")


@dataclass(frozen=True)
class CoincidenceProfile:
    """Transverse coincidence profile R(x1, x2) over an x2 grid."""

    x1: float
    x2: np.ndarray
    raw: np.ndarray
    normalized: np.ndarray
    params_fingerprint: str
    method: Method


@dataclass(frozen=True)
class RobustnessCurve:
    """Origin rate vs turbulence strength, normalized to the cn2 = 0 baseline."""

    cn2: np.ndarray
    values: np.ndarray
    baseline: float
    z: float
    params_fingerprint: str
    method: Method


@dataclass(frozen=True)
class ScanScenario:
    label: str
    pump: PumpParams
    crystal: CrystalParams
    channel: ChannelParams


@dataclass(frozen=True)
class SweepSeries:
    label: str
    pump: PumpParams
    crystal: CrystalParams
    z: float
    cn2_values: tuple[float, ...]


@dataclass(frozen=True)
class FigurePreset:
    name: str
    kind: str  # "scan" or "sweep"
    scans: tuple[ScanScenario, ...] = ()
    sweeps: tuple[SweepSeries, ...] = ()


def delta_label(delta: float | FullyCoherent) -> str:
    if isinstance(delta, FullyCoherent):
        return "inf"
    return f"{delta * 1e3:g}mm"


def profile_half_width(
    pump: PumpParams, crystal: CrystalParams, z: float
) -> float:
    """1/e half-width of the turbulence-free profile R(0, x2), by bisection.

    The turbulence-free profile is exactly Gaussian in x2, so the 1/e
    crossing is a single root; a plain bracketing bisection keeps the
    width deterministic to ~1e-12 relative.
    """
    channel = ChannelParams(cn2=0.0, z=z)

    def rate(x2: float) -> float:
        return evaluate_rate(0.0, x2, pump, crystal, channel).value

    peak = rate(0.0)
    if not peak > 0:
        raise EvaluationError("turbulence-free peak rate vanished; no width exists")
    target = peak / math.e
    hi = pump.sigma
    for _ in range(80):
        if rate(hi) < target:
            break
        hi *= 2.0
    else:
        raise EvaluationError("profile does not decay to 1/e within bracket range")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rate(mid) >= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


def default_scan(
    pump: PumpParams,
    crystal: CrystalParams,
    z: float,
    x1: float = 0.0,
    n_points: int = 201,
) -> DetectorScan:
    """Scan covering +-5 turbulence-free half-widths around the axis."""
    w = profile_half_width(pump, crystal, z)
    return DetectorScan(x1=x1, x2_min=-5.0 * w, x2_max=5.0 * w, n_points=n_points)


def scan_profile(
    scan: DetectorScan,
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
    method: Method = Method.GAUSSIAN_ENGINE,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
    rel_tol: float = 1e-3,
) -> CoincidenceProfile:
    """Evaluate the coincidence profile over the scan grid."""
    x2 = scan.positions()
    raw = np.array(
        [
            evaluate_rate(scan.x1, float(x), pump, crystal, channel, method, mode, rel_tol).value
            for x in x2
        ]
    )
    peak = raw.max()
    if not peak > 0:
        raise EvaluationError("profile peak is not positive; cannot normalize")
    fp = fingerprint(
        canonical_params(
            pump,
            crystal,
            channel,
            x1=scan.x1,
            x2_min=scan.x2_min,
            x2_max=scan.x2_max,
            n_points=scan.n_points,
            method=method.value,
            kernel_mode=mode.value,
        )
    )
    return CoincidenceProfile(
        x1=scan.x1,
        x2=x2,
        raw=raw,
        normalized=raw / peak,
        params_fingerprint=fp,
        method=method,
    )


def robustness_curve(
    cn2_values,
    z: float,
    pump: PumpParams,
    crystal: CrystalParams,
    method: Method = Method.GAUSSIAN_ENGINE,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
    rel_tol: float = 1e-3,
) -> RobustnessCurve:
    """Origin coincidence rate vs cn2, normalized to the cn2 = 0 baseline.

    The baseline is the structural turbulence-free evaluation (no 1/alpha^2
    terms in the form), not a small-cn2 stand-in.
    """
    cn2_values = np.asarray(list(cn2_values), dtype=float)
    if cn2_values.ndim != 1 or cn2_values.size == 0:
        raise ParameterError("cn2_values must be a nonempty 1-D sequence")
    if (cn2_values < 0).any():
        raise ParameterError("cn2 grid values must be nonnegative")
    if not (np.diff(cn2_values) > 0).all():
        raise ParameterError("cn2 grid must be strictly increasing")
    baseline = evaluate_rate(
        0.0, 0.0, pump, crystal, ChannelParams(cn2=0.0, z=z), method, mode, rel_tol
    ).value
    if not baseline > 0:
        raise EvaluationError("turbulence-free baseline rate is not positive")
    values = np.array(
        [
            evaluate_rate(
                0.0, 0.0, pump, crystal, ChannelParams(cn2=float(c), z=z), method, mode, rel_tol
            ).value
            / baseline
            for c in cn2_values
        ]
    )
    fp = fingerprint(
        canonical_params(
            pump,
            crystal,
            None,
            z_m=z,
            cn2_grid=[float(c) for c in cn2_values],
            method=method.value,
            kernel_mode=mode.value,
        )
    )
    return RobustnessCurve(
        cn2=cn2_values,
        values=values,
        baseline=baseline,
        z=z,
        params_fingerprint=fp,
        method=method,
    )


def fig5_cn2_grid() -> tuple[float, ...]:
    lo, hi = _FIG5_GRID_SPAN
    return tuple(float(c) for c in np.geomspace(lo, hi, _FIG5_GRID_POINTS))


def figure_preset(
    name: str,
    pump: PumpParams | None = None,
    crystal: CrystalParams | None = None,
) -> FigurePreset:
    """Fully resolved parameter sets for one of the standard figures.

    fig2/fig3/fig4: coincidence scans at delta = inf / 0.0876 mm / 0.0417 mm,
    four link distances x two turbulence strengths (8 scenarios each).
    fig5: robustness sweeps for four coherence lengths over a 10-point log
    grid of cn2 at z = 20 km.  Pump sigma/amplitude and crystal parameters
    default to the standard values but can be overridden.
    """
    base_pump = pump if pump is not None else PumpParams()
    crystal = crystal if crystal is not None else CrystalParams()
    if name in _FIG_DELTAS:
        delta = _FIG_DELTAS[name]
        pump_for = PumpParams(
            wavelength=base_pump.wavelength,
            sigma=base_pump.sigma,
            delta=delta,
            amplitude=base_pump.amplitude,
        )
        scans = tuple(
            ScanScenario(
                label=f"z{z_km:g}km_cn2{cn2:g}_delta{delta_label(delta)}",
                pump=pump_for,
                crystal=crystal,
                channel=ChannelParams(cn2=cn2, z=z_km * 1e3),
            )
            for z_km in _FIG_DISTANCES_KM
            for cn2 in _FIG_CN2
        )
        return FigurePreset(name=name, kind="scan", scans=scans)
    if name == "fig5":
        grid = fig5_cn2_grid()
        sweeps = tuple(
            SweepSeries(
                label=f"delta{delta_label(delta)}",
                pump=PumpParams(
                    wavelength=base_pump.wavelength,
                    sigma=base_pump.sigma,
                    delta=delta,
                    amplitude=base_pump.amplitude,
                ),
                crystal=crystal,
                z=_FIG5_Z,
                cn2_values=grid,
            )
            for delta in _FIG5_DELTAS
        )
        return FigurePreset(name=name, kind="sweep", sweeps=sweeps)
    raise ConfigError(
        f"unknown figure preset {name!r}; valid names: {', '.join(FIGURE_NAMES)}"
    )


def turbulence_contrast(
    pump: PumpParams,
    crystal: CrystalParams,
    z: float,
    cn2_weak: float = 1e-14,
    cn2_strong: float = 5e-14,
    method: Method = Method.GAUSSIAN_ENGINE,
) -> float:
    """Fractional on-axis rate drop between weak and strong turbulence.

    (R_weak(0,0) - R_strong(0,0)) / R_weak(0,0); in (0, 1) whenever
    cn2_weak < cn2_strong.
    """
    if not 0 < cn2_weak < cn2_strong:
        raise ParameterError(
            f"need 0 < cn2_weak < cn2_strong, got {cn2_weak!r}, {cn2_strong!r}"
        )
    weak = evaluate_rate(
        0.0, 0.0, pump, crystal, ChannelParams(cn2=cn2_weak, z=z), method
    ).value
    strong = evaluate_rate(
        0.0, 0.0, pump, crystal, ChannelParams(cn2=cn2_strong, z=z), method
    ).value
    if not weak > 0:
        raise EvaluationError("weak-turbulence rate is not positive")
    return (weak - strong) / weak
