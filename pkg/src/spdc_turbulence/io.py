"""Deterministic CSV / JSON emission for scans, sweeps and figure sets.

All floats are written with ``repr``, JSON keys are sorted, and no
timestamps or hostnames appear anywhere, so rerunning a command with the
same parameters produces byte-identical files.
"""

from __future__ import annotations

import json
import os

from .provenance import fingerprint
from .scenarios import CoincidenceProfile, RobustnessCurve

SCHEMA_VERSION = 1
TOOL_NAME = "spdc-turbulence"

__all__ = [
    "SCHEMA_VERSION",
    "scan_csv_text",
    "sweep_csv_text",
    "json_text",
    "build_scan_meta",
    "build_sweep_meta",
    "build_figure_manifest",
    "write_text",
]


def scan_csv_text(profile: CoincidenceProfile) -> str:
    lines = ["x2_m,rate_raw,rate_norm"]
    for x2, raw, norm in zip(profile.x2, profile.raw, profile.normalized):
        lines.append(f"{float(x2)!r},{float(raw)!r},{float(norm)!r}")
    lines.append(f"# fingerprint={profile.params_fingerprint}")
    return "\n".join(lines) + "\n"


def sweep_csv_text(curve: RobustnessCurve) -> str:
    lines = ["cn2_m_to_minus_2_3,rate_norm"]
    for cn2, value in zip(curve.cn2, curve.values):
        lines.append(f"{float(cn2)!r},{float(value)!r}")
    lines.append(f"# fingerprint={curve.params_fingerprint}")
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _tool_block() -> dict:
    from . import __version__

    return {"name": TOOL_NAME, "version": __version__}


def build_scan_meta(
    profile: CoincidenceProfile,
    params: dict,
    *,
    rel_tol: float | None,
    outputs: list[str],
) -> dict:
    meta = {
        "schema_version": SCHEMA_VERSION,
        "kind": "scan",
        "tool": _tool_block(),
        "params": params,
        "method": profile.method.value,
        "kernel_mode": params.get("kernel_mode", "cross-term"),
        "scan": {
            "x1_m": float(profile.x1),
            "x2_min_m": float(profile.x2[0]),
            "x2_max_m": float(profile.x2[-1]),
            "n_points": int(profile.x2.size),
        },
        "fingerprint": profile.params_fingerprint,
        "outputs": sorted(outputs),
    }
    if rel_tol is not None:
        meta["rel_tol"] = rel_tol
    return meta


def build_sweep_meta(
    curves: dict[str, RobustnessCurve],
    params_by_label: dict[str, dict],
    *,
    outputs: list[str],
) -> dict:
    series = {}
    for label, curve in sorted(curves.items()):
        series[label] = {
            "params": params_by_label[label],
            "method": curve.method.value,
            "baseline_rate": float(curve.baseline),
            "fingerprint": curve.params_fingerprint,
            "cn2_min": float(curve.cn2[0]),
            "cn2_max": float(curve.cn2[-1]),
            "n_points": int(curve.cn2.size),
        }
    meta = {
        "schema_version": SCHEMA_VERSION,
        "kind": "sweep",
        "tool": _tool_block(),
        "series": series,
        "outputs": sorted(outputs),
    }
    meta["fingerprint"] = fingerprint(
        {label: block["fingerprint"] for label, block in series.items()}
    )
    return meta


def build_figure_manifest(
    name: str,
    entries: list[dict],
    *,
    outputs: list[str],
) -> dict:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": "figure",
        "tool": _tool_block(),
        "figure": name,
        "entries": sorted(entries, key=lambda e: e["label"]),
        "outputs": sorted(outputs),
    }
    manifest["fingerprint"] = fingerprint(
        {entry["label"]: entry["fingerprint"] for entry in manifest["entries"]}
    )
    return manifest


def write_text(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
