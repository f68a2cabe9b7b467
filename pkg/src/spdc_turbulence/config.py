"""Flat key = value run configuration with unit suffixes.

Example::

    # link and turbulence
    z = 20km
    cn2 = 5e-14
    delta = inf
    sigma = 1mm
    method = engine

Unknown keys are rejected.  Command-line flags of the same names override
file values.  ``delta`` accepts a comma-separated list for sweeps;
``cn2_grid`` accepts either ``start:stop:n`` (log-spaced) or a comma list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParameterError, UnitParseError
from .evaluators import Method
from .kernels import TurbulenceKernelMode
from .params import (
    FULLY_COHERENT,
    ChannelParams,
    CrystalParams,
    DetectorScan,
    FullyCoherent,
    PumpParams,
    parse_quantity,
)
from .scenarios import fig5_cn2_grid

__all__ = ["RunConfig", "parse_config_text", "config_text_from_meta", "KNOWN_KEYS"]

_LENGTH_KEYS = (
    "wavelength_p",
    "sigma",
    "crystal_length",
    "wavelength_s",
    "wavelength_i",
    "z",
    "x1",
    "x2_min",
    "x2_max",
)
_BARE_FLOAT_KEYS = ("amplitude", "gamma", "cn2", "rel_tol")
_OTHER_KEYS = (
    "delta",
    "n_points",
    "method",
    "kernel",
    "out",
    "cn2_grid",
    "oracle_sets",
)
KNOWN_KEYS = frozenset(_LENGTH_KEYS) | frozenset(_BARE_FLOAT_KEYS) | frozenset(_OTHER_KEYS)

_METHODS = {m.value: m for m in Method}
_KERNELS = {m.value: m for m in TurbulenceKernelMode}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines into a raw string mapping."""
    values: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = value
    return values


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"config key {key!r}: cannot parse number {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"config key {key!r}: value must be finite, got {text!r}")
    return value


@dataclass
class RunConfig:
    """Resolved run configuration (SI units, typed fields)."""

    pump: PumpParams = field(default_factory=PumpParams)
    crystal: CrystalParams = field(default_factory=CrystalParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    deltas: tuple[float | FullyCoherent, ...] = (FULLY_COHERENT,)
    x1: float = 0.0
    x2_min: float | None = None
    x2_max: float | None = None
    n_points: int = 201
    method: Method = Method.GAUSSIAN_ENGINE
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM
    rel_tol: float = 1e-3
    out_dir: str = "."
    cn2_grid: tuple[float, ...] | None = None
    oracle_sets: int = 20

    @classmethod
    def from_values(cls, values: dict[str, str]) -> "RunConfig":
        """Build from raw string values (config file merged with CLI flags)."""
        unknown = set(values) - KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        def length(key: str, default: float | None) -> float | None:
            if key not in values:
                return default
            try:
                parsed = parse_quantity(values[key])
            except UnitParseError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from None
            return float(parsed)

        deltas: tuple[float | FullyCoherent, ...] = (FULLY_COHERENT,)
        if "delta" in values:
            parts = [p.strip() for p in values["delta"].split(",") if p.strip()]
            if not parts:
                raise ConfigError("config key 'delta': empty list")
            parsed_deltas = []
            for part in parts:
                try:
                    parsed_deltas.append(parse_quantity(part, allow_infinite=True))
                except UnitParseError as exc:
                    raise ConfigError(f"config key 'delta': {exc}") from None
            deltas = tuple(parsed_deltas)

        try:
            pump = PumpParams(
                wavelength=length("wavelength_p", 405e-9),
                sigma=length("sigma", 1.0e-3),
                delta=deltas[0],
                amplitude=(
                    _parse_float("amplitude", values["amplitude"])
                    if "amplitude" in values
                    else 1.0
                ),
            )
            crystal = CrystalParams(
                length=length("crystal_length", 2.0e-3),
                gamma=(
                    _parse_float("gamma", values["gamma"]) if "gamma" in values else 1.0
                ),
                wavelength_signal=length("wavelength_s", None),
                wavelength_idler=length("wavelength_i", None),
            )
            channel = ChannelParams(
                cn2=_parse_float("cn2", values["cn2"]) if "cn2" in values else 0.0,
                z=length("z", 20.0e3),
            )
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None

        n_points = 201
        if "n_points" in values:
            try:
                n_points = int(values["n_points"])
            except ValueError:
                raise ConfigError(
                    f"config key 'n_points': expected an integer, got {values['n_points']!r}"
                ) from None

        method_text = values.get("method", Method.GAUSSIAN_ENGINE.value)
        if method_text not in _METHODS:
            raise ConfigError(
                f"config key 'method': expected one of {sorted(_METHODS)}, got {method_text!r}"
            )
        kernel_text = values.get("kernel", TurbulenceKernelMode.CROSS_TERM.value)
        if kernel_text not in _KERNELS:
            raise ConfigError(
                f"config key 'kernel': expected one of {sorted(_KERNELS)}, got {kernel_text!r}"
            )

        rel_tol = (
            _parse_float("rel_tol", values["rel_tol"]) if "rel_tol" in values else 1e-3
        )

        cn2_grid: tuple[float, ...] | None = None
        if "cn2_grid" in values:
            cn2_grid = _parse_cn2_grid(values["cn2_grid"])

        oracle_sets = 20
        if "oracle_sets" in values:
            try:
                oracle_sets = int(values["oracle_sets"])
            except ValueError:
                raise ConfigError(
                    f"config key 'oracle_sets': expected an integer, got {values['oracle_sets']!r}"
                ) from None
            if oracle_sets < 1:
                raise ConfigError("config key 'oracle_sets': must be >= 1")

        return cls(
            pump=pump,
            crystal=crystal,
            channel=channel,
            deltas=deltas,
            x1=length("x1", 0.0),
            x2_min=length("x2_min", None),
            x2_max=length("x2_max", None),
            n_points=n_points,
            method=_METHODS[method_text],
            mode=_KERNELS[kernel_text],
            rel_tol=rel_tol,
            out_dir=values.get("out", "."),
            cn2_grid=cn2_grid,
            oracle_sets=oracle_sets,
        )

    def scan(self, auto_bounds: tuple[float, float] | None = None) -> DetectorScan:
        """Detector scan from explicit bounds or a supplied automatic range."""
        x2_min, x2_max = self.x2_min, self.x2_max
        if x2_min is None or x2_max is None:
            if auto_bounds is None:
                raise ConfigError(
                    "x2_min/x2_max are not set and no automatic range was provided"
                )
            x2_min, x2_max = auto_bounds
        try:
            return DetectorScan(
                x1=self.x1, x2_min=x2_min, x2_max=x2_max, n_points=self.n_points
            )
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None


def _parse_cn2_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"config key 'cn2_grid': expected start:stop:n, got {text!r}"
            )
        start = _parse_float("cn2_grid", parts[0])
        stop = _parse_float("cn2_grid", parts[1])
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(
                f"config key 'cn2_grid': point count must be an integer, got {parts[2]!r}"
            ) from None
        if not (0 < start < stop and count >= 2):
            raise ConfigError(
                "config key 'cn2_grid': need 0 < start < stop and n >= 2"
            )
        return tuple(float(c) for c in np.geomspace(start, stop, count))
    try:
        grid = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"config key 'cn2_grid': cannot parse {text!r}") from None
    if not grid:
        raise ConfigError("config key 'cn2_grid': empty grid")
    if grid[0] < 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(
            "config key 'cn2_grid': values must be nonnegative and strictly increasing"
        )
    return grid


def default_cn2_grid() -> tuple[float, ...]:
    return fig5_cn2_grid()


def config_text_from_meta(meta: dict) -> str:
    """Reconstruct a config file from emitted scan metadata (round-trip aid)."""
    params = meta["params"]
    lines = [
        f"wavelength_p = {params['wavelength_p_m']!r}m",
        f"sigma = {params['sigma_m']!r}m",
        (
            "delta = inf"
            if params["delta"] == "fully_coherent"
            else f"delta = {params['delta']!r}m"
        ),
        f"amplitude = {params['amplitude']!r}",
        f"crystal_length = {params['crystal_length_m']!r}m",
        f"gamma = {params['gamma']!r}",
        f"wavelength_s = {params['wavelength_s_m']!r}m",
        f"wavelength_i = {params['wavelength_i_m']!r}m",
        f"cn2 = {params['cn2_m_to_minus_2_3']!r}",
        f"z = {params['z_m']!r}m",
        f"method = {meta['method']}",
        f"kernel = {meta['kernel_mode']}",
    ]
    scan = meta.get("scan")
    if scan is not None:
        lines += [
            f"x1 = {scan['x1_m']!r}m",
            f"x2_min = {scan['x2_min_m']!r}m",
            f"x2_max = {scan['x2_max_m']!r}m",
            f"n_points = {scan['n_points']}",
        ]
    return "\n".join(lines) + "\n"
