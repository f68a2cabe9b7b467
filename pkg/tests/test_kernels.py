"""Integrand kernels and assembly of the 4-D complex quadratic form.

The heart of this module is a consistency test that rebuilds the integrand
pointwise from the five physical factors (pump correlation at the pair
midpoints, turbulence kernels, phase-matching surrogate pair, detector
phase pairs, dimensional prefactor) and checks the assembled quadratic
form reproduces it at random points.  The composition here is written out
independently rather than calling the assembly code.
"""

import cmath
import math

import numpy as np
import pytest

from spdc_turbulence import (
    FULLY_COHERENT,
    NO_TURBULENCE,
    ChannelParams,
    ComplexQuadraticForm,
    CrystalParams,
    DegenerateIntegrandError,
    ParameterError,
    PumpParams,
    TurbulenceKernelMode,
    build_quadratic_form,
    gaussian_schell_correlation,
    impulse_function,
    lateral_coherence_length,
    phase_matching_surrogate,
    rate_prefactor,
    turbulence_kernel,
    wavevector,
)

PUMP = PumpParams(wavelength=405e-9, sigma=1e-3, delta=0.0876e-3, amplitude=1.0)
CRYSTAL = CrystalParams(length=2e-3, gamma=1.0)
CHANNEL = ChannelParams(cn2=1e-14, z=20e3)


def test_schell_correlation_peak_and_symmetry():
    pump = PumpParams(delta=0.2e-3, amplitude=2.5)
    assert gaussian_schell_correlation(0.0, 0.0, pump) == pytest.approx(2.5, rel=1e-15)
    a = gaussian_schell_correlation(1e-4, -3e-4, pump)
    b = gaussian_schell_correlation(-3e-4, 1e-4, pump)
    assert a == pytest.approx(b, rel=1e-14)


def test_schell_correlation_numeric_point():
    pump = PumpParams(sigma=1e-3, delta=1e-4, amplitude=1.0)
    x, xp = 5e-4, -2e-4
    expected = math.exp(
        -(x * x + xp * xp) / (4e-6) - (xp - x) ** 2 / (2e-8)
    )
    assert gaussian_schell_correlation(x, xp, pump) == pytest.approx(expected, rel=1e-13)


def test_schell_correlation_fully_coherent_drops_coherence_factor():
    coherent = PumpParams(delta=FULLY_COHERENT)
    x, xp = 4e-4, -7e-4
    expected = math.exp(-(x * x + xp * xp) / (4.0 * coherent.sigma**2))
    assert gaussian_schell_correlation(x, xp, coherent) == pytest.approx(expected, rel=1e-14)


def test_turbulence_kernel_modes_differ_off_axis():
    # u = 1, v = 2, alpha = 1: quadratic cross-term 1 + 2 + 4, bare middle 1 + 1 + 4
    cross = turbulence_kernel(1.0, 2.0, 1.0, TurbulenceKernelMode.CROSS_TERM)
    printed = turbulence_kernel(1.0, 2.0, 1.0, TurbulenceKernelMode.AS_PRINTED)
    assert cross == pytest.approx(math.exp(-7.0), rel=1e-14)
    assert printed == pytest.approx(math.exp(-6.0), rel=1e-14)


def test_turbulence_kernel_modes_agree_at_zero_detector_separation():
    for v in (0.0, 0.5, -1.7):
        cross = turbulence_kernel(0.0, v, 2.0, TurbulenceKernelMode.CROSS_TERM)
        printed = turbulence_kernel(0.0, v, 2.0, TurbulenceKernelMode.AS_PRINTED)
        assert cross == pytest.approx(math.exp(-(v * v) / 4.0), rel=1e-14)
        assert cross == printed


def test_turbulence_kernel_no_turbulence_is_unity():
    assert turbulence_kernel(0.3, -0.8, NO_TURBULENCE) == 1.0


def test_turbulence_kernel_rejects_bad_alpha():
    with pytest.raises(ParameterError):
        turbulence_kernel(0.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        turbulence_kernel(0.0, 0.0, -1.0)


def test_impulse_magnitude_position_independent():
    k, z = wavevector(810e-9), 20e3
    rng = np.random.default_rng(7)
    for _ in range(5):
        xd, xs = rng.normal(scale=10.0, size=2)
        h = impulse_function(xd, xs, k, z)
        assert abs(h) ** 2 == pytest.approx(k / (2.0 * math.pi * z), rel=1e-12)


def test_impulse_on_axis_value():
    k, z = wavevector(810e-9), 1e3
    expected = cmath.sqrt(-1j * k / (2.0 * math.pi * z))
    got = impulse_function(0.0, 0.0, k, z)
    assert got == pytest.approx(expected, rel=1e-12)


def test_phase_matching_at_zero_is_one():
    assert phase_matching_surrogate(0.0, CRYSTAL, PUMP) == pytest.approx(1.0 + 0j, abs=1e-15)


def test_phase_matching_analytic_point():
    # At u = sqrt(L/k_p) with gamma = 1 the exponent collapses to -1/(4(1+i)).
    k_p = wavevector(PUMP.wavelength)
    u = math.sqrt(CRYSTAL.length / k_p)
    expected = cmath.exp(-1.0 / (4.0 * (1.0 + 1j)))
    got = phase_matching_surrogate(u, CRYSTAL, PUMP)
    assert got == pytest.approx(expected, rel=1e-12)
    # frozen decimal of the same quantity, as a regression anchor
    assert got == pytest.approx(0.875611368081544 + 0.1100250660430237j, rel=1e-12)


def test_phase_matching_modulus_decay():
    crystal = CrystalParams(length=2e-3, gamma=0.4)
    k_p = wavevector(PUMP.wavelength)
    for u in (1e-5, 5e-5, 2e-4):
        expected = math.exp(
            -k_p * u * u * crystal.gamma / (2.0 * crystal.length * (crystal.gamma**2 + 1.0))
        )
        assert abs(phase_matching_surrogate(u, crystal, PUMP)) ** 2 == pytest.approx(
            expected, rel=1e-12
        )


def test_rate_prefactor_independent_product():
    k_p = 2.0 * math.pi / 405e-9
    expected = (
        4.0 * math.pi * k_p / (2e-3 * math.sqrt(2.0))
        * (k_p / (4.0 * math.pi * 20e3)) ** 2
    )
    assert rate_prefactor(PUMP, CRYSTAL, 20e3) == pytest.approx(expected, rel=1e-13)


def test_rate_prefactor_amplitude_squared():
    bright = PumpParams(delta=PUMP.delta, amplitude=3.0)
    assert rate_prefactor(bright, CRYSTAL, 20e3) == pytest.approx(
        9.0 * rate_prefactor(PUMP, CRYSTAL, 20e3), rel=1e-14
    )


def _pointwise_exponent(rho, x1, x2, pump, crystal, channel):
    """Sum of factor logs, written out independently of the assembly code."""
    rs, ri, rsp, rip = rho
    k_p = wavevector(pump.wavelength)
    k_s = wavevector(810e-9)
    k_i = k_s
    phi = k_p / (4.0 * channel.z)

    envelope = -((rs + ri) ** 2 + (rsp + rip) ** 2) / (16.0 * pump.sigma**2)
    coherence = 0.0
    if not pump.is_fully_coherent:
        coherence = -((rsp + rip) - (rs + ri)) ** 2 / (8.0 * pump.delta**2)

    alpha_s = lateral_coherence_length(channel.cn2, k_s, channel.z)
    alpha_i = lateral_coherence_length(channel.cn2, k_i, channel.z)
    turb = 0.0
    if alpha_s is not NO_TURBULENCE:
        turb = -((rs - rsp) ** 2) / alpha_s**2 - ((ri - rip) ** 2) / alpha_i**2

    lam = k_p / (4.0 * crystal.length * (crystal.gamma + 1j))
    matching = -lam * (rs - ri) ** 2 - np.conj(lam) * (rsp - rip) ** 2

    detector = 1j * phi * (
        rs * rs - rsp * rsp - 2.0 * x1 * rs + 2.0 * x1 * rsp
        + ri * ri - rip * rip - 2.0 * x2 * ri + 2.0 * x2 * rip
    )
    return envelope + coherence + turb + matching + detector + math.log(
        rate_prefactor(pump, crystal, channel.z)
    )


def test_form_matches_pointwise_factor_logs():
    rng = np.random.default_rng(42)
    cases = [
        (PUMP, CRYSTAL, CHANNEL, 0.3, -17.2),
        (PumpParams(delta=FULLY_COHERENT), CRYSTAL, ChannelParams(cn2=0.0, z=1e3), 0.0, 40.0),
        (PumpParams(delta=0.0253e-3), CrystalParams(gamma=0.2), ChannelParams(cn2=5e-14, z=7e3), -2.0, 5.0),
    ]
    for pump, crystal, channel, x1, x2 in cases:
        form = build_quadratic_form(x1, x2, pump, crystal, channel)
        for _ in range(60):
            rho = rng.normal(scale=3e-5, size=4)
            got = form.exponent_at(rho)
            want = _pointwise_exponent(rho, x1, x2, pump, crystal, channel)
            assert got == pytest.approx(want, abs=1e-9 * max(1.0, abs(want)))


def test_form_exponential_matches_kernel_products():
    """exp(exponent) equals the literal product of kernel evaluations."""
    x1, x2 = 0.5, -12.0
    k_s = wavevector(810e-9)
    alpha = lateral_coherence_length(CHANNEL.cn2, k_s, CHANNEL.z)
    form = build_quadratic_form(x1, x2, PUMP, CRYSTAL, CHANNEL)
    propagator_sq = (k_s / (2.0 * math.pi * CHANNEL.z)) ** 2
    rng = np.random.default_rng(3)
    for _ in range(20):
        rs, ri, rsp, rip = rng.normal(scale=2e-5, size=4)
        product = (
            gaussian_schell_correlation((rs + ri) / 2.0, (rsp + rip) / 2.0, PUMP)
            * turbulence_kernel(0.0, rs - rsp, alpha)
            * turbulence_kernel(0.0, ri - rip, alpha)
            * phase_matching_surrogate(rs - ri, CRYSTAL, PUMP)
            * np.conj(phase_matching_surrogate(rsp - rip, CRYSTAL, PUMP))
            * np.conj(impulse_function(x1, rs, k_s, CHANNEL.z))
            * impulse_function(x1, rsp, k_s, CHANNEL.z)
            * np.conj(impulse_function(x2, ri, k_s, CHANNEL.z))
            * impulse_function(x2, rip, k_s, CHANNEL.z)
            * rate_prefactor(PUMP, CRYSTAL, CHANNEL.z) / propagator_sq
        )
        got = cmath.exp(form.exponent_at(np.array([rs, ri, rsp, rip])))
        assert got == pytest.approx(complex(product), rel=1e-9)


def test_matrix_independent_of_detectors():
    f0 = build_quadratic_form(0.0, 0.0, PUMP, CRYSTAL, CHANNEL)
    f1 = build_quadratic_form(5.0, -3.0, PUMP, CRYSTAL, CHANNEL)
    assert np.array_equal(f0.matrix_a, f1.matrix_a)
    assert f0.scalar_c == f1.scalar_c


def test_linear_term_odd_in_detectors():
    fp = build_quadratic_form(1.5, -2.5, PUMP, CRYSTAL, CHANNEL)
    fm = build_quadratic_form(-1.5, 2.5, PUMP, CRYSTAL, CHANNEL)
    assert np.array_equal(fp.vector_b, -fm.vector_b)
    np.testing.assert_array_equal(
        build_quadratic_form(0.0, 0.0, PUMP, CRYSTAL, CHANNEL).vector_b,
        np.zeros(4, dtype=complex),
    )


def test_turbulence_terms_enter_exactly_as_pair_separations():
    """cn2 = 0 leaves no residue; cn2 > 0 adds exactly the two dyads."""
    quiet = build_quadratic_form(0.0, 0.0, PUMP, CRYSTAL, ChannelParams(cn2=0.0, z=20e3))
    stormy = build_quadratic_form(0.0, 0.0, PUMP, CRYSTAL, CHANNEL)
    k_s = wavevector(810e-9)
    alpha = lateral_coherence_length(CHANNEL.cn2, k_s, CHANNEL.z)
    sig = np.array([1.0, 0.0, -1.0, 0.0])
    idl = np.array([0.0, 1.0, 0.0, -1.0])
    expected = (np.outer(sig, sig) + np.outer(idl, idl)) / alpha**2
    np.testing.assert_allclose(stormy.matrix_a - quiet.matrix_a, expected, rtol=1e-12, atol=0)


def test_coherence_term_enters_exactly_as_sum_difference():
    coherent = build_quadratic_form(
        0.0, 0.0, PumpParams(delta=FULLY_COHERENT), CRYSTAL, CHANNEL
    )
    partial = build_quadratic_form(0.0, 0.0, PUMP, CRYSTAL, CHANNEL)
    direction = np.array([1.0, 1.0, -1.0, -1.0])
    expected = np.outer(direction, direction) / (8.0 * PUMP.delta**2)
    np.testing.assert_allclose(
        partial.matrix_a - coherent.matrix_a, expected, rtol=1e-12, atol=0
    )


def test_constant_term_is_log_prefactor():
    form = build_quadratic_form(0.0, 0.0, PUMP, CRYSTAL, CHANNEL)
    assert form.scalar_c.imag == 0.0
    assert math.exp(form.scalar_c.real) == pytest.approx(
        rate_prefactor(PUMP, CRYSTAL, CHANNEL.z), rel=1e-12
    )


def test_kernel_mode_does_not_change_the_form():
    """Detector-side separations vanish in the pairing, so both turbulence
    kernel variants assemble to identical forms."""
    f_cross = build_quadratic_form(
        1.0, -4.0, PUMP, CRYSTAL, CHANNEL, TurbulenceKernelMode.CROSS_TERM
    )
    f_printed = build_quadratic_form(
        1.0, -4.0, PUMP, CRYSTAL, CHANNEL, TurbulenceKernelMode.AS_PRINTED
    )
    assert np.array_equal(f_cross.matrix_a, f_printed.matrix_a)
    assert np.array_equal(f_cross.vector_b, f_printed.vector_b)
    assert f_cross.scalar_c == f_printed.scalar_c


def test_degenerate_form_rejected():
    flat = CrystalParams(length=2e-3, gamma=0.0)
    with pytest.raises(DegenerateIntegrandError):
        build_quadratic_form(
            0.0, 0.0, PumpParams(delta=FULLY_COHERENT), flat, ChannelParams(cn2=0.0, z=20e3)
        )
    with pytest.raises(DegenerateIntegrandError):
        build_quadratic_form(0.0, 0.0, PUMP, CrystalParams(gamma=-0.5), CHANNEL)


def test_form_validation():
    with pytest.raises(ParameterError):
        ComplexQuadraticForm(
            matrix_a=np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex),
            vector_b=np.zeros(2, dtype=complex),
            scalar_c=0.0,
        )
    with pytest.raises(ParameterError):
        ComplexQuadraticForm(
            matrix_a=np.eye(2, dtype=complex),
            vector_b=np.zeros(3, dtype=complex),
            scalar_c=0.0,
        )


def test_form_exponent_evaluation():
    form = ComplexQuadraticForm(
        matrix_a=np.array([[2.0 + 1j]]),
        vector_b=np.array([3.0 + 0j]),
        scalar_c=0.5,
    )
    rho = np.array([1.5])
    expected = -(2.0 + 1j) * 2.25 + 3.0 * 1.5 + 0.5
    assert form.exponent_at(rho) == pytest.approx(expected, rel=1e-14)
