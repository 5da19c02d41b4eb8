"""Slow-time analysis: unwrap, displacement, spectra, waterfall.

Validation targets:
  - unwrap folds steps into (-pi, pi] and reconstructs any path whose
    true steps stay under pi
  - a 2*pi phase decrease maps to lambda/2 = 26.0466 mm; 1.2062 rad to
    5.000 mm
  - a 12 Hz tone at PRF 100 / N=256 lands in bin 31 (12.109 Hz),
    resolution 0.390625 Hz
  - complex-input spectra carry Bessel sideband structure; displacement-
    input spectra are amplitude-calibrated
"""

import numpy as np
import pytest

from prrx.constants import SPEED_OF_LIGHT_M_S as C
from prrx.oracle import pm_harmonics
from prrx.slowtime import (
    BinSeries,
    DisplacementTracker,
    Waterfall,
    displacement,
    mean_displacement,
    peak_to_peak,
    unwrap_phase,
    vibration_spectrum,
)

F0 = 5.755e9
PRF = 100.0


# -- unwrap ------------------------------------------------------------------


def test_unwrap_no_wraps_passthrough():
    x = np.array([0.0, 0.1, 0.2])
    assert np.array_equal(unwrap_phase(x), x)


def test_unwrap_single_wrap():
    out = unwrap_phase(np.array([3.0, -3.0]))
    assert out == pytest.approx([3.0, 3.0 + (2 * np.pi - 6.0)])
    assert out[1] == pytest.approx(3.28319, abs=1e-5)


def test_unwrap_near_boundary():
    out = unwrap_phase(np.array([0.0, np.pi * 0.999, -np.pi * 0.999]))
    assert out[2] == pytest.approx(1.001 * np.pi, rel=1e-6)


def test_unwrap_half_turn_goes_positive():
    # the (-pi, pi] step interval maps an exact half-turn to +pi
    assert unwrap_phase(np.array([0.0, np.pi]))[1] == pytest.approx(np.pi)
    assert unwrap_phase(np.array([0.0, -np.pi]))[1] == pytest.approx(np.pi)


def test_unwrap_reconstructs_any_subpi_path():
    rng = np.random.default_rng(31337)
    for _ in range(50):
        steps = rng.uniform(-np.pi * 0.999, np.pi * 0.999, 300)
        path = np.concatenate([[rng.uniform(-np.pi, np.pi)], steps]).cumsum()
        wrapped = np.angle(np.exp(1j * path))
        rebuilt = unwrap_phase(wrapped)
        # identical up to the global 2*pi*k of the first sample
        offset = path[0] - rebuilt[0]
        assert offset / (2 * np.pi) == pytest.approx(round(offset / (2 * np.pi)), abs=1e-9)
        assert np.max(np.abs((rebuilt + offset) - path)) < 1e-9


# -- displacement ------------------------------------------------------------


def test_displacement_constant_phase_is_zero():
    trace = displacement(np.full(16, 0.7), F0)
    assert np.all(trace.values_m == 0.0)
    assert trace.unwrap_corrections == 0


def test_displacement_full_turn_is_half_wavelength():
    # phase ramps DOWN by 2*pi in sub-pi steps -> +lambda/2 displacement
    phase = np.linspace(0.0, -2 * np.pi, 9)
    trace = displacement(np.angle(np.exp(1j * phase)), F0)
    lam_half = C / (2 * F0)
    assert trace.values_m[-1] == pytest.approx(lam_half, rel=1e-12)
    assert lam_half == pytest.approx(26.04626e-3, abs=1e-8)


def test_displacement_reference_point():
    trace = displacement(np.array([0.5, 0.5 - 1.2062]), F0)
    expected = C * 1.2062 / (4 * np.pi * F0)
    assert trace.values_m[1] == pytest.approx(expected, rel=1e-12)
    assert trace.values_m[1] == pytest.approx(5.000e-3, abs=5e-7)
    assert trace.values_m[0] == 0.0


def test_displacement_linearity():
    rng = np.random.default_rng(4)
    steps = rng.uniform(-1.0, 1.0, 64)
    base = np.concatenate([[0.1], steps]).cumsum()
    one = displacement(np.angle(np.exp(1j * base)), F0)
    # scaling the (unwrapped) path scales the trace; 0.5x keeps steps sub-pi
    half = displacement(np.angle(np.exp(1j * (0.5 * base))), F0)
    ref = one.values_m - one.values_m[0]
    assert np.allclose(half.values_m, 0.5 * ref, atol=1e-15)


def test_displacement_from_bin_series_counts_corrections():
    # every step here crosses the boundary: -6.0, +5.8, -5.7
    phase = np.array([3.0, -3.0, 2.8, -2.9])
    series = BinSeries(24, np.exp(1j * phase), PRF, first_pulse=10)
    trace = displacement(series, F0)
    assert trace.unwrap_corrections == 3
    assert trace.first_pulse == 10
    assert trace.pulse_indices.tolist() == [10, 11, 12, 13]


def test_mean_displacement_and_errors():
    trace = displacement(np.zeros(10), F0)
    trace.values_m[:] = 5e-3
    assert mean_displacement(trace, 4) == pytest.approx(5e-3)
    trace.values_m[::2] = 1e-3
    trace.values_m[1::2] = -1e-3
    assert mean_displacement(trace, 10) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        mean_displacement(trace, 11)


def test_peak_to_peak():
    trace = displacement(np.zeros(256), F0)
    t = np.arange(256) / PRF
    trace.values_m[:] = 5e-3 * np.sin(2 * np.pi * 12 * t)
    p2p = peak_to_peak(trace, 256)
    sampled_truth = trace.values_m.max() - trace.values_m.min()
    assert p2p == sampled_truth
    assert p2p == pytest.approx(10e-3, abs=0.1e-3)

    flat = displacement(np.zeros(8), F0)
    assert peak_to_peak(flat) == 0.0
    with pytest.raises(ValueError):
        peak_to_peak(flat, 9)


def test_tracker_matches_batch_unwrap():
    rng = np.random.default_rng(12)
    steps = rng.uniform(-3.0, 3.0, 400)
    path = np.concatenate([[0.3], steps]).cumsum()
    wrapped = np.angle(np.exp(1j * path))
    batch = displacement(wrapped, F0)
    tracker = DisplacementTracker(F0)
    streamed = np.array([tracker.push(p) for p in wrapped])
    assert np.allclose(streamed, batch.values_m, atol=1e-12)
    assert tracker.unwrap_corrections == batch.unwrap_corrections
    assert tracker.count == 401


def test_tracker_flags_boundary_steps():
    tracker = DisplacementTracker(F0)
    tracker.push(0.0)
    tracker.push(3.14)  # just inside the ambiguity boundary
    assert tracker.suspect_steps == 1
    tracker.reset()
    assert tracker.count == 0 and tracker.displacement_m == 0.0


# -- spectra -----------------------------------------------------------------


def _tone_series(freq_hz, n=256, amp=1e-3, phase=0.0):
    t = np.arange(n) / PRF
    return amp * np.sin(2 * np.pi * freq_hz * t + phase)


def test_spectrum_bin_placement_12hz():
    # small modulation index keeps the complex series essentially a tone
    disp = _tone_series(12.0, amp=2e-4)
    series = np.exp(1j * (-4 * np.pi * F0 / C) * disp)
    spec = vibration_spectrum(series, PRF)
    assert spec.resolution_hz == pytest.approx(0.390625)
    f_peak, _ = spec.peak(f_lo=1.0)
    assert f_peak == pytest.approx(31 * 0.390625)  # 12.109 Hz
    assert abs(f_peak - 12.0) <= spec.resolution_hz
    assert len(spec.freq_hz) == 129


def test_spectrum_static_residual_floor():
    static = np.full(256, 0.3 + 0.4j)
    spec = vibration_spectrum(static, PRF)
    tone = vibration_spectrum(np.exp(1j * _tone_series(12.0, amp=5e-3) * 4 * np.pi * F0 / C), PRF)
    _, peak_level = tone.peak(f_lo=1.0)
    assert np.max(spec.magnitude) < peak_level * 10 ** (-40 / 20)


def test_spectrum_displacement_mode_is_amplitude_calibrated():
    # on-grid tone: 12.5 Hz is exactly bin 32 at N=256, no scalloping
    disp = _tone_series(12.5, amp=3e-3)
    spec = vibration_spectrum(disp, PRF, input_mode="displacement")
    f_peak, level = spec.peak(f_lo=1.0)
    assert f_peak == pytest.approx(12.5)
    assert level == pytest.approx(3e-3, rel=1e-9)


def test_spectrum_hann_window_mode():
    disp = _tone_series(12.5, amp=3e-3)
    spec = vibration_spectrum(disp, PRF, input_mode="displacement", window="hann")
    _, level = spec.peak(f_lo=1.0)
    assert level == pytest.approx(3e-3, rel=1e-6)
    with pytest.raises(ValueError):
        vibration_spectrum(disp, PRF, window="flattop")


def test_spectrum_complex_mode_bessel_sidebands():
    m = 1.2062  # 5 mm peak at lambda = 52.09 mm
    t = np.arange(256) / PRF
    series = np.exp(1j * m * np.sin(2 * np.pi * 12.0 * t))
    spec = vibration_spectrum(series, PRF)
    levels = dict(pm_harmonics(m))
    for k in (2, 3):
        got_db = 20 * np.log10(spec.band_level(12.0 * k) / spec.band_level(12.0))
        want_db = 20 * np.log10(levels[k] / levels[1])
        assert abs(got_db - want_db) < 1.0


def test_spectrum_parseval_two_sided():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    spec = vibration_spectrum(x, PRF, remove_mean=False, one_sided=False)
    lhs = np.sum(spec.magnitude**2)
    rhs = np.sum(np.abs(x) ** 2) / len(x)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_spectrum_nyquist_alias_folds():
    # 70 Hz sampled at 100 Hz folds onto 30 Hz
    disp = _tone_series(70.0, amp=1e-3)
    spec = vibration_spectrum(disp, PRF, input_mode="displacement")
    f_peak, _ = spec.peak(f_lo=1.0)
    assert abs(f_peak - 30.0) <= spec.resolution_hz


def test_spectrum_velocity_axis():
    spec = vibration_spectrum(_tone_series(10.0), PRF, input_mode="displacement")
    lam = C / F0
    v = spec.velocity_axis_mm_s(lam)
    assert v[0] == 0.0
    k = int(round(10.0 / spec.resolution_hz))
    assert v[k] == pytest.approx(spec.freq_hz[k] * lam / 2 * 1e3)


def test_spectrum_input_validation():
    with pytest.raises(ValueError):
        vibration_spectrum(np.array([]), PRF)
    with pytest.raises(ValueError):
        vibration_spectrum(np.ones(8), PRF, input_mode="cepstrum")


# -- waterfall ---------------------------------------------------------------


def test_waterfall_push_and_eviction():
    wf = Waterfall(capacity=100)
    spec = vibration_spectrum(np.ones(64) + 0j, PRF)
    wf.push(spec)
    assert len(wf) == 1
    assert np.array_equal(wf.rows[0], spec.magnitude)  # bit-exact row

    for i in range(101):
        wf.push(np.full(33, float(i)))
    assert len(wf) == 100
    assert wf.rows[0][0] == 1.0  # first pushed row evicted
    assert wf.rows[-1][0] == 100.0


def test_waterfall_width_mismatch():
    wf = Waterfall(capacity=4)
    wf.push(np.ones(16))
    with pytest.raises(ValueError):
        wf.push(np.ones(8))


def test_waterfall_normalized_db():
    wf = Waterfall(capacity=4)
    wf.push(np.array([1.0, 10.0, 100.0]))
    db = wf.normalized_db(floor_db=-60.0)
    assert db[0].tolist() == [-40.0, -20.0, 0.0]
    empty = Waterfall(capacity=2)
    empty.push(np.zeros(3))
    assert np.all(empty.normalized_db() == -60.0)
