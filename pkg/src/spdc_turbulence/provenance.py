"""Canonical parameter serialization and fingerprinting for outputs."""

from __future__ import annotations

import hashlib
import json

from .kernels import TurbulenceKernelMode
from .params import ChannelParams, CrystalParams, PumpParams, signal_idler_wavelengths

__all__ = ["canonical_params", "fingerprint"]


def canonical_params(
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams | None = None,
    **extra,
) -> dict:
    """Flatten parameters into a JSON-safe dict of resolved SI values."""
    lam_s, lam_i = signal_idler_wavelengths(pump, crystal)
    out = {
        "wavelength_p_m": pump.wavelength,
        "sigma_m": pump.sigma,
        "delta": "fully_coherent" if pump.is_fully_coherent else pump.delta,
        "amplitude": pump.amplitude,
        "crystal_length_m": crystal.length,
        "gamma": crystal.gamma,
        "wavelength_s_m": lam_s,
        "wavelength_i_m": lam_i,
    }
    if channel is not None:
        out["cn2_m_to_minus_2_3"] = channel.cn2
        out["z_m"] = channel.z
    for key, value in extra.items():
        if isinstance(value, TurbulenceKernelMode):
            value = value.value
        out[key] = value
    return out


def fingerprint(params: dict) -> str:
    """SHA-256 over the canonical JSON serialization of a parameter dict."""
    text = json.dumps(params, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
