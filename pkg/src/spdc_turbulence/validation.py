"""Cross-checks between the trusted evaluator, the quadrature oracle, and
the printed closed form.

Two jobs live here.  First, the trusted-path suite: Gaussian-integral
identities, engine-vs-quadrature agreement on randomized physical
parameter sets, structural-limit consistency (nearly coherent pump vs the
fully coherent path, vanishing turbulence vs the turbulence-free path),
parity, and turbulence monotonicity.  These checks gate the exit code of
the ``validate`` command.  Second, the closed-form reconciliation: the
verbatim transcription is compared against the engine over the standard
figure grids and its deviations and parity violation are *documented* in
a schema-versioned report; they never fail the run.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EvaluationError, QuadratureConvergenceError
from .evaluators import (
    Method,
    gaussian_integral,
    rate_closed_form_as_printed,
    rate_gaussian_engine,
    rate_quadrature,
)
from .kernels import ComplexQuadraticForm, TurbulenceKernelMode
from .params import (
    FULLY_COHERENT,
    ChannelParams,
    CrystalParams,
    PumpParams,
)
from .provenance import canonical_params, fingerprint
from .scenarios import figure_preset, profile_half_width

__all__ = [
    "REFERENCE_PUMP",
    "REFERENCE_CRYSTAL",
    "REFERENCE_CHANNEL",
    "DEFAULT_SEED",
    "REPORT_SCHEMA",
    "draw_parameter_sets",
    "oracle_equivalence_deviation",
    "coherent_limit_deviation",
    "turbulence_free_deviation",
    "closed_form_discrepancy_entries",
    "run_validation",
]

# Shared reference point: 405 nm pump, 1 mm beam, diffuser-grade coherence,
# 2 mm crystal, moderate turbulence over a 20 km path.
REFERENCE_PUMP = PumpParams(wavelength=405e-9, sigma=1.0e-3, delta=0.0876e-3)
REFERENCE_CRYSTAL = CrystalParams(length=2.0e-3, gamma=1.0)
REFERENCE_CHANNEL = ChannelParams(cn2=1e-14, z=20.0e3)

DEFAULT_SEED = 20260814

_ORACLE_REL_TOL = 1e-4

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "schema_version",
        "tool",
        "passed",
        "checks",
        "closed_form_discrepancy",
    ],
    "properties": {
        "schema_version": {"const": 1},
        "tool": {
            "type": "object",
            "required": ["name", "version"],
            "properties": {
                "name": {"type": "string"},
                "version": {"type": "string"},
            },
        },
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "detail"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                    "worst_rel": {"type": ["number", "null"]},
                },
            },
        },
        "closed_form_discrepancy": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "label",
                    "fingerprint",
                    "n_points",
                    "max_rel_deviation",
                    "mean_rel_deviation",
                    "parity_violation",
                    "overflow_points",
                ],
                "properties": {
                    "label": {"type": "string"},
                    "fingerprint": {"type": "string"},
                    "n_points": {"type": "integer", "minimum": 1},
                    "max_rel_deviation": {"type": ["number", "null"], "minimum": 0},
                    "mean_rel_deviation": {"type": ["number", "null"], "minimum": 0},
                    "parity_violation": {"type": ["number", "null"], "minimum": 0},
                    "overflow_points": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


def draw_parameter_sets(
    n: int, seed: int = DEFAULT_SEED
) -> list[tuple[PumpParams, CrystalParams, ChannelParams]]:
    """Randomized physical parameter sets for the oracle-equivalence suite.

    Log-uniform draws: sigma in [0.2, 2] mm, delta in [0.02, 1] mm with a
    25% chance of a fully coherent pump, cn2 in [1e-15, 1e-13], z in
    [1, 20] km, gamma in [0.2, 5], crystal length in [0.5, 5] mm.
    """
    rng = np.random.default_rng(seed)

    def log_uniform(lo: float, hi: float) -> float:
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))

    sets = []
    for _ in range(n):
        sigma = log_uniform(0.2e-3, 2.0e-3)
        if rng.random() < 0.25:
            delta = FULLY_COHERENT
        else:
            delta = log_uniform(0.02e-3, 1.0e-3)
        pump = PumpParams(wavelength=405e-9, sigma=sigma, delta=delta)
        crystal = CrystalParams(
            length=log_uniform(0.5e-3, 5.0e-3), gamma=log_uniform(0.2, 5.0)
        )
        channel = ChannelParams(
            cn2=log_uniform(1e-15, 1e-13), z=log_uniform(1.0e3, 20.0e3)
        )
        sets.append((pump, crystal, channel))
    return sets


def oracle_equivalence_deviation(
    pump: PumpParams,
    crystal: CrystalParams,
    channel: ChannelParams,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
    rel_tol: float = _ORACLE_REL_TOL,
) -> float:
    """Worst |engine - quadrature| / quadrature at x1 = 0, x2 in {0, w, 2w}."""
    w = profile_half_width(pump, crystal, channel.z)
    worst = 0.0
    for x2 in (0.0, w, 2.0 * w):
        engine = rate_gaussian_engine(0.0, x2, pump, crystal, channel, mode).value
        oracle = rate_quadrature(
            0.0, x2, pump, crystal, channel, mode, rel_tol=rel_tol
        ).value
        worst = max(worst, abs(engine - oracle) / oracle)
    return worst


def coherent_limit_deviation(
    pump: PumpParams | None = None,
    crystal: CrystalParams | None = None,
    channel: ChannelParams | None = None,
    ratio: float = 100.0,
) -> float:
    """Relative gap between delta = ratio*sigma and the fully coherent path."""
    pump = pump if pump is not None else REFERENCE_PUMP
    crystal = crystal if crystal is not None else REFERENCE_CRYSTAL
    channel = channel if channel is not None else ChannelParams(cn2=5e-14, z=20.0e3)
    wide = PumpParams(
        wavelength=pump.wavelength,
        sigma=pump.sigma,
        delta=ratio * pump.sigma,
        amplitude=pump.amplitude,
    )
    coherent = PumpParams(
        wavelength=pump.wavelength,
        sigma=pump.sigma,
        delta=FULLY_COHERENT,
        amplitude=pump.amplitude,
    )
    r_wide = rate_gaussian_engine(0.0, 0.0, wide, crystal, channel).value
    r_coherent = rate_gaussian_engine(0.0, 0.0, coherent, crystal, channel).value
    return abs(r_wide - r_coherent) / r_coherent


def turbulence_free_deviation(
    pump: PumpParams | None = None,
    crystal: CrystalParams | None = None,
    z: float = 20.0e3,
    cn2_small: float = 1e-20,
) -> float:
    """Relative gap between cn2 = cn2_small and the structural cn2 = 0 path."""
    pump = pump if pump is not None else REFERENCE_PUMP
    crystal = crystal if crystal is not None else REFERENCE_CRYSTAL
    r_small = rate_gaussian_engine(
        0.0, 0.0, pump, crystal, ChannelParams(cn2=cn2_small, z=z)
    ).value
    r_zero = rate_gaussian_engine(
        0.0, 0.0, pump, crystal, ChannelParams(cn2=0.0, z=z)
    ).value
    return abs(r_small - r_zero) / r_zero


def _identity_forms() -> list[tuple[ComplexQuadraticForm, float]]:
    return [
        (
            ComplexQuadraticForm(
                matrix_a=np.array([[1.0 + 0.0j]]),
                vector_b=np.zeros(1, dtype=complex),
                scalar_c=0.0 + 0.0j,
            ),
            math.sqrt(math.pi),
        ),
        (
            ComplexQuadraticForm(
                matrix_a=np.array([[1.0 + 0.0j]]),
                vector_b=np.array([2.0 + 0.0j]),
                scalar_c=0.0 + 0.0j,
            ),
            math.sqrt(math.pi) * math.e,
        ),
        (
            ComplexQuadraticForm(
                matrix_a=np.array([[1.0 + 0.0j, 0.0j], [0.0j, 2.0 + 0.0j]]),
                vector_b=np.zeros(2, dtype=complex),
                scalar_c=0.0 + 0.0j,
            ),
            math.pi / math.sqrt(2.0),
        ),
    ]


def _check(name: str, passed: bool, detail: str, worst_rel: float | None) -> dict:
    entry = {"name": name, "passed": bool(passed), "detail": detail}
    entry["worst_rel"] = None if worst_rel is None else float(worst_rel)
    return entry


def _scenario_x2_grid(w: float, n: int = 9) -> np.ndarray:
    return np.linspace(-2.0 * w, 2.0 * w, n)


def closed_form_discrepancy_entries(
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
) -> list[dict]:
    """Engine vs printed closed form over the fig2-fig4 scan grids.

    Points where the printed transcription overflows or vanishes are
    counted instead of folded into the statistics.
    """
    entries = []
    for name in ("fig2", "fig3", "fig4"):
        preset = figure_preset(name)
        width_cache: dict[float, float] = {}
        for scenario in preset.scans:
            z = scenario.channel.z
            if z not in width_cache:
                width_cache[z] = profile_half_width(
                    scenario.pump, scenario.crystal, z
                )
            xs = _scenario_x2_grid(width_cache[z])
            engine_vals = np.array(
                [
                    rate_gaussian_engine(
                        0.0, float(x), scenario.pump, scenario.crystal,
                        scenario.channel, mode,
                    ).value
                    for x in xs
                ]
            )
            printed_vals = np.array(
                [
                    rate_closed_form_as_printed(
                        0.0, float(x), scenario.pump, scenario.crystal,
                        scenario.channel,
                    ).value
                    for x in xs
                ]
            )
            finite = np.isfinite(printed_vals) & (printed_vals > 0)
            overflow = int(np.size(finite) - np.count_nonzero(finite))
            if np.count_nonzero(finite):
                devs = (
                    np.abs(printed_vals[finite] - engine_vals[finite])
                    / engine_vals[finite]
                )
                max_dev = float(devs.max())
                mean_dev = float(devs.mean())
            else:
                max_dev = None
                mean_dev = None
            both_finite = finite & finite[::-1]
            if np.count_nonzero(both_finite):
                mirrored = printed_vals[::-1]
                scale = float(printed_vals[both_finite].max())
                parity = float(
                    np.max(
                        np.abs(printed_vals[both_finite] - mirrored[both_finite])
                    )
                    / scale
                )
            else:
                parity = None
            fp = fingerprint(
                canonical_params(
                    scenario.pump,
                    scenario.crystal,
                    scenario.channel,
                    x2_grid=[float(x) for x in xs],
                    kernel_mode=mode.value,
                    comparison="engine-vs-printed",
                )
            )
            entries.append(
                {
                    "label": f"{name}_{scenario.label}",
                    "fingerprint": fp,
                    "n_points": int(xs.size),
                    "max_rel_deviation": max_dev,
                    "mean_rel_deviation": mean_dev,
                    "parity_violation": parity,
                    "overflow_points": overflow,
                }
            )
    return entries


def run_validation(
    oracle_sets: int = 20,
    rel_tol: float = 1e-3,
    seed: int = DEFAULT_SEED,
    mode: TurbulenceKernelMode = TurbulenceKernelMode.CROSS_TERM,
    include_discrepancy: bool = True,
) -> dict:
    """Run the trusted-path suite and the closed-form reconciliation.

    Returns the schema-versioned report dict; ``report["passed"]`` gates
    the CLI exit code.  The closed-form discrepancy entries are
    informational only.
    """
    from . import __version__

    checks = []

    worst = 0.0
    for form, exact in _identity_forms():
        value = gaussian_integral(form)
        worst = max(worst, abs(value.real - exact) / exact)
    checks.append(
        _check(
            "gaussian_identities",
            worst < 1e-12,
            "three analytic Gaussian integrals reproduced by the engine",
            worst,
        )
    )

    from .quadrature import integrate_gaussian_form

    worst = 0.0
    for form, exact in _identity_forms():
        value = integrate_gaussian_form(form, rel_tol=1e-6).value
        worst = max(worst, abs(value.real - exact) / exact)
    checks.append(
        _check(
            "quadrature_identities",
            worst < 1e-5,
            "the same integrals reproduced by direct quadrature",
            worst,
        )
    )

    sets = draw_parameter_sets(oracle_sets, seed)
    worst = 0.0
    failure = None
    for idx, (pump, crystal, channel) in enumerate(sets):
        try:
            dev = oracle_equivalence_deviation(pump, crystal, channel, mode)
        except (EvaluationError, QuadratureConvergenceError) as exc:
            failure = f"set {idx}: {exc}"
            break
        worst = max(worst, dev)
    checks.append(
        _check(
            "oracle_equivalence",
            failure is None and worst < 1e-3,
            failure
            or f"{len(sets)} randomized parameter sets, x2 in {{0, w, 2w}}",
            None if failure else worst,
        )
    )

    try:
        dev = oracle_equivalence_deviation(
            REFERENCE_PUMP, REFERENCE_CRYSTAL, REFERENCE_CHANNEL, mode,
            rel_tol=min(rel_tol, _ORACLE_REL_TOL),
        )
        checks.append(
            _check(
                "reference_point",
                dev < 1e-3,
                "engine vs quadrature at the reference parameter point",
                dev,
            )
        )
    except (EvaluationError, QuadratureConvergenceError) as exc:
        checks.append(_check("reference_point", False, str(exc), None))

    dev = coherent_limit_deviation()
    checks.append(
        _check(
            "coherent_limit",
            dev < 1e-4,
            "delta = 100 sigma against the fully coherent structural path",
            dev,
        )
    )

    dev = turbulence_free_deviation()
    checks.append(
        _check(
            "turbulence_free_limit",
            dev < 1e-4,
            "cn2 = 1e-20 against the turbulence-free structural path",
            dev,
        )
    )

    worst = 0.0
    for pump, crystal, channel in sets[: min(5, len(sets))]:
        w = profile_half_width(pump, crystal, channel.z)
        plus = rate_gaussian_engine(0.0, w, pump, crystal, channel, mode).value
        minus = rate_gaussian_engine(0.0, -w, pump, crystal, channel, mode).value
        peak = rate_gaussian_engine(0.0, 0.0, pump, crystal, channel, mode).value
        worst = max(worst, abs(plus - minus) / peak)
    checks.append(
        _check(
            "engine_parity",
            worst < 1e-9,
            "R(0, x2) even in x2 for the first five randomized sets",
            worst,
        )
    )

    grid = np.geomspace(1e-15, 5e-14, 5)
    rates = [
        rate_gaussian_engine(
            0.0,
            0.0,
            PumpParams(wavelength=405e-9, sigma=1e-3, delta=FULLY_COHERENT),
            REFERENCE_CRYSTAL,
            ChannelParams(cn2=float(c), z=20.0e3),
            mode,
        ).value
        for c in grid
    ]
    decreasing = all(b < a for a, b in zip(rates, rates[1:]))
    checks.append(
        _check(
            "turbulence_monotonicity",
            decreasing,
            "fully coherent origin rate strictly decreasing in cn2 at 20 km",
            None,
        )
    )

    report = {
        "schema_version": 1,
        "tool": {"name": "spdc-turbulence", "version": __version__},
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "closed_form_discrepancy": (
            closed_form_discrepancy_entries(mode) if include_discrepancy else []
        ),
    }

    import jsonschema

    jsonschema.validate(report, REPORT_SCHEMA)
    return report
