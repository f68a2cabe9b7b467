"""Config parsing, run configuration resolution, CSV/JSON serialization."""

import json

import numpy as np
import pytest

from spdc_turbulence import (
    FULLY_COHERENT,
    ChannelParams,
    ConfigError,
    CrystalParams,
    Method,
    PumpParams,
    TurbulenceKernelMode,
    canonical_params,
    default_scan,
    fig5_cn2_grid,
    robustness_curve,
    scan_profile,
)
from spdc_turbulence.config import KNOWN_KEYS, RunConfig, config_text_from_meta, parse_config_text
from spdc_turbulence.io import (
    build_scan_meta,
    build_sweep_meta,
    json_text,
    scan_csv_text,
    sweep_csv_text,
)

SAMPLE = """\
# pump and crystal
wavelength_p = 405nm
sigma = 1mm
delta = 0.0876mm

cn2 = 1e-14   # moderate daytime value
z = 20km
n_points = 5
"""


def test_parse_config_text_basic():
    values = parse_config_text(SAMPLE)
    assert values == {
        "wavelength_p": "405nm",
        "sigma": "1mm",
        "delta": "0.0876mm",
        "cn2": "1e-14",
        "z": "20km",
        "n_points": "5",
    }


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError) as err:
        parse_config_text("wavelenght_p = 405nm\n")
    assert "line 1" in str(err.value)


def test_parse_config_rejects_duplicate_key():
    with pytest.raises(ConfigError) as err:
        parse_config_text("z = 1km\nz = 2km\n")
    assert "line 2" in str(err.value)


def test_parse_config_rejects_missing_separator():
    with pytest.raises(ConfigError):
        parse_config_text("z 20km\n")


def test_parse_config_rejects_empty_value():
    with pytest.raises(ConfigError):
        parse_config_text("z =\n")


def test_run_config_resolution():
    cfg = RunConfig.from_values(parse_config_text(SAMPLE))
    assert cfg.pump.wavelength == pytest.approx(405e-9)
    assert cfg.pump.sigma == pytest.approx(1e-3)
    assert cfg.pump.delta == pytest.approx(0.0876e-3)
    assert cfg.channel.cn2 == 1e-14
    assert cfg.channel.z == pytest.approx(20e3)
    assert cfg.n_points == 5
    assert cfg.method is Method.GAUSSIAN_ENGINE
    assert cfg.mode is TurbulenceKernelMode.CROSS_TERM


def test_run_config_delta_list_and_infinity():
    cfg = RunConfig.from_values({"delta": "inf, 0.0876mm, 0.0253mm"})
    assert cfg.deltas[0] is FULLY_COHERENT
    assert cfg.deltas[1] == pytest.approx(0.0876e-3)
    assert cfg.deltas[2] == pytest.approx(0.0253e-3)
    assert cfg.pump.delta is FULLY_COHERENT


def test_run_config_method_and_kernel():
    cfg = RunConfig.from_values({"method": "quadrature", "kernel": "as-printed"})
    assert cfg.method is Method.QUADRATURE
    assert cfg.mode is TurbulenceKernelMode.AS_PRINTED
    with pytest.raises(ConfigError):
        RunConfig.from_values({"method": "magic"})
    with pytest.raises(ConfigError):
        RunConfig.from_values({"kernel": "smooth"})


def test_run_config_bad_quantity_reported_as_config_error():
    with pytest.raises(ConfigError):
        RunConfig.from_values({"sigma": "fast"})
    with pytest.raises(ConfigError):
        RunConfig.from_values({"sigma": "-1mm"})


def test_run_config_cn2_grid_geometric():
    cfg = RunConfig.from_values({"cn2_grid": "1e-15:5e-14:4"})
    grid = np.asarray(cfg.cn2_grid)
    assert grid.shape == (4,)
    assert grid[0] == pytest.approx(1e-15)
    assert grid[-1] == pytest.approx(5e-14)
    ratios = grid[1:] / grid[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)


def test_run_config_cn2_grid_comma_list_allows_zero():
    cfg = RunConfig.from_values({"cn2_grid": "0, 1e-15, 1e-14"})
    assert cfg.cn2_grid == (0.0, 1e-15, 1e-14)


def test_run_config_cn2_grid_validation():
    with pytest.raises(ConfigError):
        RunConfig.from_values({"cn2_grid": "0:5e-14:4"})  # geometric from zero
    with pytest.raises(ConfigError):
        RunConfig.from_values({"cn2_grid": "1e-15:5e-14:1"})  # too few points
    with pytest.raises(ConfigError):
        RunConfig.from_values({"cn2_grid": "1e-14, 1e-15"})  # decreasing


def test_run_config_scan_explicit_and_auto_bounds():
    cfg = RunConfig.from_values({"x2_min": "-10", "x2_max": "10", "n_points": "11"})
    scan = cfg.scan()
    assert scan.x2_min == -10.0 and scan.x2_max == 10.0 and scan.n_points == 11
    auto = RunConfig.from_values({"n_points": "11"}).scan(auto_bounds=(-3.0, 3.0))
    assert auto.x2_min == -3.0 and auto.x2_max == 3.0
    with pytest.raises(ConfigError):
        RunConfig.from_values({"n_points": "11"}).scan()


def test_known_keys_cover_sample():
    assert set(parse_config_text(SAMPLE)) <= KNOWN_KEYS


def _small_profile():
    pump = PumpParams(delta=0.0876e-3)
    crystal = CrystalParams()
    channel = ChannelParams(cn2=1e-14, z=20e3)
    scan = default_scan(pump, crystal, channel.z, n_points=5)
    profile = scan_profile(scan, pump, crystal, channel)
    return profile, pump, crystal, channel, scan


def test_scan_csv_round_trip():
    profile, *_ = _small_profile()
    text = scan_csv_text(profile)
    lines = text.strip().split("\n")
    assert lines[0] == "x2_m,rate_raw,rate_norm"
    assert lines[-1] == f"# fingerprint={profile.params_fingerprint}"
    rows = [line.split(",") for line in lines[1:-1]]
    assert len(rows) == 5
    for i, (x2, raw, norm) in enumerate(rows):
        assert float(x2) == profile.x2[i]
        assert float(raw) == profile.raw[i]
        assert float(norm) == profile.normalized[i]


def test_sweep_csv_round_trip():
    curve = robustness_curve(fig5_cn2_grid()[:3], 20e3, PumpParams(delta=0.0876e-3), CrystalParams())
    text = sweep_csv_text(curve)
    lines = text.strip().split("\n")
    assert lines[0] == "cn2_m_to_minus_2_3,rate_norm"
    assert lines[-1].startswith("# fingerprint=")
    assert len(lines) == 5
    for i, line in enumerate(lines[1:-1]):
        cn2, value = line.split(",")
        assert float(cn2) == curve.cn2[i]
        assert float(value) == curve.values[i]


def test_json_text_deterministic_and_sorted():
    obj = {"b": 2.0, "a": [1, 2], "nested": {"y": 1, "x": 2}}
    text = json_text(obj)
    assert text == json_text(dict(reversed(list(obj.items()))))
    assert text.endswith("\n")
    parsed = json.loads(text)
    assert parsed == obj
    assert list(parsed) == sorted(parsed)


def test_json_text_rejects_nan():
    with pytest.raises(ValueError):
        json_text({"value": float("nan")})


def test_scan_meta_contents():
    profile, pump, crystal, channel, scan = _small_profile()
    params = canonical_params(pump, crystal, channel)
    meta = build_scan_meta(
        profile, params, rel_tol=None, outputs=["scan.csv"]
    )
    assert meta["schema_version"] == 1
    assert meta["kind"] == "scan"
    assert meta["method"] == "engine"
    assert meta["fingerprint"] == profile.params_fingerprint
    assert meta["scan"]["n_points"] == 5
    assert meta["params"]["cn2_m_to_minus_2_3"] == 1e-14
    assert meta["outputs"] == ["scan.csv"]
    # must be JSON serializable as-is
    json_text(meta)


def test_sweep_meta_contents():
    pump = PumpParams(delta=0.0876e-3)
    curve = robustness_curve((1e-15, 1e-14), 20e3, pump, CrystalParams())
    params = canonical_params(pump, CrystalParams(), ChannelParams(cn2=0.0, z=20e3))
    meta = build_sweep_meta(
        {"delta0.0876mm": curve},
        {"delta0.0876mm": params},
        outputs=["sweep.csv"],
    )
    assert meta["schema_version"] == 1
    assert meta["kind"] == "sweep"
    series = meta["series"]["delta0.0876mm"]
    assert series["method"] == "engine"
    assert series["baseline_rate"] == curve.baseline
    assert series["fingerprint"] == curve.params_fingerprint
    json_text(meta)


def test_config_round_trip_through_meta():
    profile, pump, crystal, channel, scan = _small_profile()
    params = canonical_params(pump, crystal, channel)
    meta = build_scan_meta(profile, params, rel_tol=1e-3, outputs=["scan.csv"])
    text = config_text_from_meta(meta)
    resolved = RunConfig.from_values(parse_config_text(text))
    assert resolved.pump == pump
    # the meta pins the resolved degenerate wavelengths explicitly
    assert resolved.crystal.length == crystal.length
    assert resolved.crystal.gamma == crystal.gamma
    assert resolved.crystal.wavelength_signal == pytest.approx(810e-9)
    assert resolved.channel == channel
    assert resolved.n_points == scan.n_points
    assert resolved.scan().x2_min == pytest.approx(scan.x2_min, rel=1e-12)


def test_config_round_trip_fully_coherent():
    pump = PumpParams(delta=FULLY_COHERENT)
    crystal = CrystalParams()
    channel = ChannelParams(cn2=5e-14, z=1e3)
    scan = default_scan(pump, crystal, channel.z, n_points=3)
    profile = scan_profile(scan, pump, crystal, channel)
    meta = build_scan_meta(
        profile, canonical_params(pump, crystal, channel), rel_tol=None, outputs=[]
    )
    assert meta["params"]["delta"] == "fully_coherent"
    resolved = RunConfig.from_values(parse_config_text(config_text_from_meta(meta)))
    assert resolved.pump.delta is FULLY_COHERENT
