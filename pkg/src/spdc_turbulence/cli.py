"""Command-line entry point.

Subcommands: ``scan`` (coincidence profile over detector position),
``sweep`` (normalized origin rate over turbulence strength), ``validate``
(evaluator cross-check suite plus closed-form reconciliation report) and
``figure <name>`` (the canonical scenario matrices).  Parameters come from
an optional flat key = value config file overridden by flags of the same
names; all lengths take unit suffixes (``--z 20km``, ``--delta inf``).

Exit codes: 0 success, 1 validation/evaluation failure, 2 usage or config
error, 3 I/O error.  Outputs are deterministic; rerunning with unchanged
parameters rewrites byte-identical files, while changed parameters against
existing outputs require --overwrite.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import KNOWN_KEYS, RunConfig, default_cn2_grid, parse_config_text
from .errors import (
    ConfigError,
    DegenerateIntegrandError,
    EvaluationError,
    ParameterError,
    QuadratureConvergenceError,
    SingularConstantError,
    UnitParseError,
)
from .evaluators import Method
from .io import (
    build_figure_manifest,
    build_scan_meta,
    build_sweep_meta,
    json_text,
    scan_csv_text,
    sweep_csv_text,
    write_text,
)
from .kernels import TurbulenceKernelMode
from .params import PumpParams
from .provenance import canonical_params
from .scenarios import (
    FIGURE_NAMES,
    delta_label,
    figure_preset,
    profile_half_width,
    robustness_curve,
    scan_profile,
)
from .validation import run_validation

__all__ = ["main"]

_VALUE_FLAGS = (
    ("wavelength_p", "pump wavelength, e.g. 405nm"),
    ("sigma", "pump beam width, e.g. 1mm"),
    ("delta", "pump coherence length, e.g. 0.0876mm or inf (comma list for sweeps)"),
    ("amplitude", "pump amplitude (dimensionless)"),
    ("crystal_length", "crystal length, e.g. 2mm"),
    ("gamma", "collinear phase mismatch parameter"),
    ("wavelength_s", "signal wavelength (defaults to 2x pump)"),
    ("wavelength_i", "idler wavelength (defaults to 2x pump)"),
    ("cn2", "refractive-index structure constant in m^(-2/3)"),
    ("z", "propagation distance, e.g. 20km"),
    ("x1", "fixed detector position, e.g. 0mm"),
    ("x2_min", "scan start (default: -5 profile half-widths)"),
    ("x2_max", "scan end (default: +5 profile half-widths)"),
    ("n_points", "number of scan samples"),
    ("cn2_grid", "sweep grid: start:stop:n (log-spaced) or comma list"),
    ("oracle_sets", "randomized parameter sets for validate"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spdc-turbulence",
        description=(
            "Coincidence rate of photon pairs from a partially coherent pump "
            "after propagation through atmospheric turbulence"
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="output directory (default: current)")
    common.add_argument(
        "--method",
        choices=[m.value for m in Method],
        help="rate evaluator (default: engine)",
    )
    common.add_argument(
        "--kernel",
        choices=[m.value for m in TurbulenceKernelMode],
        help="turbulence kernel transcription (default: cross-term)",
    )
    common.add_argument("--rel-tol", dest="rel_tol", help="quadrature tolerance")
    common.add_argument(
        "--overwrite",
        action="store_true",
        help="replace outputs produced with different parameters",
    )
    for key, help_text in _VALUE_FLAGS:
        common.add_argument(f"--{key.replace('_', '-')}", dest=key, help=help_text)

    sub = parser.add_subparsers(dest="command", required=True)
    p_scan = sub.add_parser(
        "scan", parents=[common], help="coincidence profile vs detector position"
    )
    p_scan.set_defaults(handler=_cmd_scan)
    p_sweep = sub.add_parser(
        "sweep", parents=[common], help="normalized origin rate vs cn2"
    )
    p_sweep.set_defaults(handler=_cmd_sweep)
    p_validate = sub.add_parser(
        "validate", parents=[common], help="run evaluator cross-checks"
    )
    p_validate.set_defaults(handler=_cmd_validate)
    p_figure = sub.add_parser(
        "figure", parents=[common], help="emit a canonical scenario matrix"
    )
    p_figure.add_argument("name", choices=FIGURE_NAMES)
    p_figure.set_defaults(handler=_cmd_figure)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, str] = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            values = parse_config_text(handle.read())
    for key in KNOWN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = str(flag)
    return RunConfig.from_values(values)


def _path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out_dir, name)


def _guard_outputs(
    cfg: RunConfig, meta_name: str, fingerprint_value: str, overwrite: bool
) -> None:
    """Refuse to clobber outputs produced with different parameters."""
    if overwrite:
        return
    meta_path = _path(cfg, meta_name)
    if not os.path.exists(meta_path):
        return
    try:
        with open(meta_path, "r", encoding="utf-8") as handle:
            existing = json.load(handle)
        existing_fp = existing.get("fingerprint")
    except (OSError, json.JSONDecodeError):
        existing_fp = None
    if existing_fp != fingerprint_value:
        raise ConfigError(
            f"{meta_path} was produced with different parameters "
            "(fingerprint mismatch); pass --overwrite to replace it"
        )


def _cmd_scan(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    auto = None
    if cfg.x2_min is None or cfg.x2_max is None:
        w = profile_half_width(cfg.pump, cfg.crystal, cfg.channel.z)
        auto = (-5.0 * w, 5.0 * w)
    scan = cfg.scan(auto)
    profile = scan_profile(
        scan, cfg.pump, cfg.crystal, cfg.channel, cfg.method, cfg.mode, cfg.rel_tol
    )
    params = canonical_params(
        cfg.pump, cfg.crystal, cfg.channel, kernel_mode=cfg.mode.value
    )
    meta = build_scan_meta(
        profile,
        params,
        rel_tol=cfg.rel_tol if cfg.method is Method.QUADRATURE else None,
        outputs=["scan.csv"],
    )
    _guard_outputs(cfg, "scan.meta.json", meta["fingerprint"], args.overwrite)
    write_text(_path(cfg, "scan.csv"), scan_csv_text(profile))
    write_text(_path(cfg, "scan.meta.json"), json_text(meta))
    print(f"wrote {_path(cfg, 'scan.csv')} ({scan.n_points} rows)")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    grid = cfg.cn2_grid if cfg.cn2_grid is not None else default_cn2_grid()
    curves = {}
    params_by_label = {}
    outputs = []
    for delta in cfg.deltas:
        pump = PumpParams(
            wavelength=cfg.pump.wavelength,
            sigma=cfg.pump.sigma,
            delta=delta,
            amplitude=cfg.pump.amplitude,
        )
        label = delta_label(delta)
        curves[label] = robustness_curve(
            grid, cfg.channel.z, pump, cfg.crystal, cfg.method, cfg.mode, cfg.rel_tol
        )
        params_by_label[label] = canonical_params(
            pump, cfg.crystal, None, z_m=cfg.channel.z, kernel_mode=cfg.mode.value
        )
        outputs.append(f"sweep_delta{label}.csv")
    meta = build_sweep_meta(curves, params_by_label, outputs=outputs)
    _guard_outputs(cfg, "sweep.meta.json", meta["fingerprint"], args.overwrite)
    for label, curve in curves.items():
        write_text(_path(cfg, f"sweep_delta{label}.csv"), sweep_csv_text(curve))
    write_text(_path(cfg, "sweep.meta.json"), json_text(meta))
    print(f"wrote {len(curves)} sweep series to {cfg.out_dir}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    report = run_validation(
        oracle_sets=cfg.oracle_sets, rel_tol=cfg.rel_tol, mode=cfg.mode
    )
    path = _path(cfg, "validation_report.json")
    write_text(path, json_text(report))
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        worst = check.get("worst_rel")
        suffix = f" (worst {worst:.3g})" if worst is not None else ""
        print(f"{status} {check['name']}{suffix}")
    print(f"report: {path}")
    return 0 if report["passed"] else 1


def _cmd_figure(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    name = args.name
    preset = figure_preset(name)
    entries = []
    outputs = []
    if preset.kind == "scan":
        width_cache: dict[float, float] = {}
        for scenario in preset.scans:
            z = scenario.channel.z
            if z not in width_cache:
                width_cache[z] = profile_half_width(
                    scenario.pump, scenario.crystal, z
                )
            w = width_cache[z]
            scan = cfg.scan((-5.0 * w, 5.0 * w))
            profile = scan_profile(
                scan,
                scenario.pump,
                scenario.crystal,
                scenario.channel,
                cfg.method,
                cfg.mode,
                cfg.rel_tol,
            )
            filename = f"{name}_{scenario.label}.csv"
            entries.append(
                {
                    "label": scenario.label,
                    "file": filename,
                    "delta": delta_label(scenario.pump.delta),
                    "z_m": scenario.channel.z,
                    "cn2_m_to_minus_2_3": scenario.channel.cn2,
                    "axes": {"x": "x2_m", "y": "rate_norm"},
                    "fingerprint": profile.params_fingerprint,
                }
            )
            outputs.append((filename, scan_csv_text(profile)))
    else:
        for series in preset.sweeps:
            curve = robustness_curve(
                series.cn2_values,
                series.z,
                series.pump,
                series.crystal,
                cfg.method,
                cfg.mode,
                cfg.rel_tol,
            )
            filename = f"{name}_{series.label}.csv"
            entries.append(
                {
                    "label": series.label,
                    "file": filename,
                    "delta": series.label.removeprefix("delta"),
                    "z_m": series.z,
                    "cn2_grid": [float(c) for c in series.cn2_values],
                    "axes": {"x": "cn2_m_to_minus_2_3", "y": "rate_norm"},
                    "fingerprint": curve.params_fingerprint,
                }
            )
            outputs.append((filename, sweep_csv_text(curve)))
    manifest = build_figure_manifest(
        name, entries, outputs=[filename for filename, _ in outputs]
    )
    _guard_outputs(cfg, f"{name}.manifest.json", manifest["fingerprint"], args.overwrite)
    for filename, text in outputs:
        write_text(_path(cfg, filename), text)
    write_text(_path(cfg, f"{name}.manifest.json"), json_text(manifest))
    print(f"wrote {len(outputs)} series and {name}.manifest.json to {cfg.out_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return 0
        return int(code) if isinstance(code, int) else 2
    try:
        return args.handler(args)
    except (ConfigError, UnitParseError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except (
        EvaluationError,
        DegenerateIntegrandError,
        SingularConstantError,
        QuadratureConvergenceError,
    ) as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
