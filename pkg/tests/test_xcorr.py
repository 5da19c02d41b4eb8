"""Fixed-point range compressor.

Validation targets:
  - lag m=0 of an aligned copy is the signal energy; an embedded copy at
    offset d peaks at lag d
  - integer lags match the double-precision direct-sum oracle bit-exactly
  - magnitude path: uniform 21-LSB drop, exact integer square root,
    checked against big-integer arithmetic
  - DC chain: round-half-away integer means, previous-PRI application
"""

import math

import numpy as np
import pytest

from prrx.oracle import float_xcorr
from prrx.waveform import ChirpParams, IqBuffer, quantize, synthesize_chirp
from prrx.xcorr import (
    DC_ZERO,
    DcEstimate,
    EngineConfig,
    compress,
    cross_correlate,
    dc_estimate,
    magnitude,
    peak_bin,
    phase,
)

ENG = EngineConfig()


def _embed(rx1: IqBuffer, offset: int, window: int = 3136) -> IqBuffer:
    i = np.zeros(window, dtype=np.int16)
    q = np.zeros(window, dtype=np.int16)
    i[offset : offset + len(rx1)] = rx1.i
    q[offset : offset + len(rx1)] = rx1.q
    return IqBuffer(i, q)


@pytest.fixture(scope="module")
def rx1():
    return quantize(synthesize_chirp(ChirpParams()))


def test_zero_lag_is_energy(rx1):
    re, im = cross_correlate(rx1, _embed(rx1, 0))
    energy = int((rx1.i.astype(np.int64) ** 2 + rx1.q.astype(np.int64) ** 2).sum())
    assert re[0] == energy
    assert im[0] == 0
    assert peak_bin(magnitude(re, im)) == 0


def test_embedded_copy_peaks_at_offset(rx1):
    re, im = cross_correlate(rx1, _embed(rx1, 24))
    assert peak_bin(magnitude(re, im)) == 24


def test_profile_length(rx1):
    re, im = cross_correlate(rx1, _embed(rx1, 100))
    assert len(re) == len(im) == ENG.num_lags == 2688


def test_length_mismatch_rejected(rx1):
    with pytest.raises(ValueError):
        cross_correlate(rx1, IqBuffer.zeros(1000))
    with pytest.raises(ValueError):
        cross_correlate(IqBuffer.zeros(447), IqBuffer.zeros(3136))


def test_matches_float_oracle_fuzz():
    rng = np.random.default_rng(0xC0FFEE)
    for _ in range(30):
        a = IqBuffer(
            rng.integers(-32768, 32768, 448).astype(np.int16),
            rng.integers(-32768, 32768, 448).astype(np.int16),
        )
        b = IqBuffer(
            rng.integers(-32768, 32768, 3136).astype(np.int16),
            rng.integers(-32768, 32768, 3136).astype(np.int16),
        )
        re, im = cross_correlate(a, b)
        ref = float_xcorr(a, b).lags
        assert np.array_equal(re.astype(np.float64), ref.real)
        assert np.array_equal(im.astype(np.float64), ref.imag)


def test_dc_correction_equals_pre_subtracted_input():
    rng = np.random.default_rng(11)
    a_i = rng.integers(-2000, 2000, 448).astype(np.int16) + 500
    a_q = rng.integers(-2000, 2000, 448).astype(np.int16) - 300
    b_i = rng.integers(-2000, 2000, 3136).astype(np.int16) + 120
    b_q = rng.integers(-2000, 2000, 3136).astype(np.int16) + 77
    re1, im1 = cross_correlate(
        IqBuffer(a_i, a_q), IqBuffer(b_i, b_q), DcEstimate(500, -300), DcEstimate(120, 77)
    )
    re2, im2 = cross_correlate(
        IqBuffer(a_i - 500, a_q + 300), IqBuffer(b_i - 120, b_q - 77)
    )
    assert np.array_equal(re1, re2)
    assert np.array_equal(im1, im2)


def test_accumulator_guard_fires_on_contract_violation(rx1):
    # an absurd DC estimate pushes samples far past 17 bits
    huge = DcEstimate(-1_000_000, 1_000_000)
    with pytest.raises(OverflowError):
        cross_correlate(rx1, _embed(rx1, 0), huge, huge)


# -- dc_estimate -------------------------------------------------------------


def test_dc_estimate_zero_and_constant():
    assert dc_estimate(IqBuffer.zeros(64)) == DcEstimate(0, 0)
    buf = IqBuffer(np.full(32, 100, np.int16), np.full(32, -7, np.int16))
    assert dc_estimate(buf) == DcEstimate(100, -7)


def test_dc_estimate_rounds_half_away_from_zero():
    buf = IqBuffer(np.array([1, 2], np.int16), np.array([-1, -2], np.int16))
    assert dc_estimate(buf) == DcEstimate(2, -2)  # 1.5 -> 2, -1.5 -> -2


def test_dc_estimate_matches_float_mean(rx1):
    est = dc_estimate(rx1)
    assert abs(est.mean_i - float(np.mean(rx1.i))) <= 0.5
    assert abs(est.mean_q - float(np.mean(rx1.q))) <= 0.5


# -- magnitude ---------------------------------------------------------------


def test_magnitude_small_values_floor_to_zero():
    # uniform 21-LSB drop: 3^2 + 4^2 = 25 -> 25 >> 21 = 0
    out = magnitude(np.array([3], np.int64), np.array([4], np.int64))
    assert out[0] == 0


def test_magnitude_big_value_against_bigint():
    out = magnitude(np.array([1 << 41], np.int64), np.array([0], np.int64))
    assert int(out[0]) == math.isqrt((1 << 82) >> 21)
    assert int(out[0]) == math.isqrt(1 << 61)


def test_magnitude_zero_vector():
    z = np.zeros(8, np.int64)
    assert np.array_equal(magnitude(z, z), np.zeros(8, np.uint64))


def test_magnitude_fuzz_against_bigint_oracle():
    rng = np.random.default_rng(2024)
    top = (1 << 42) - 1
    re = rng.integers(-top, top + 1, 4000)
    im = rng.integers(-top, top + 1, 4000)
    # salt with exact edge cases
    re[:4] = [top, -top, 0, 1 << 41]
    im[:4] = [top, top, 0, 1 << 41]
    got = magnitude(re, im)
    for r, i, g in zip(re.tolist(), im.tolist(), got.tolist()):
        assert g == math.isqrt((r * r + i * i) >> 21)


def test_magnitude_msb_mode_keeps_small_values_and_saturates():
    re = np.array([3, (1 << 42) - 1], np.int64)
    im = np.array([4, (1 << 42) - 1], np.int64)
    out = magnitude(re, im, truncation="msb")
    assert out[0] == 5  # exact at small scale
    assert out[1] == 0xFFFFFFFF  # squared sum >= 2^64 saturates
    with pytest.raises(ValueError):
        magnitude(re, im, truncation="nope")


def test_magnitude_rejects_out_of_contract_components():
    with pytest.raises(OverflowError):
        magnitude(np.array([1 << 42], np.int64), np.array([0], np.int64))


# -- phase / peak ------------------------------------------------------------


def test_phase_quadrants():
    re = np.array([1, 0, -1, 0], np.int64)
    im = np.array([0, 5, -1, 0], np.int64)
    out = phase(re, im)
    assert out[0] == 0.0
    assert out[1] == pytest.approx(np.pi / 2)
    assert out[2] == pytest.approx(-3 * np.pi / 4)
    assert out[3] == 0.0  # atan2(0, 0) convention


def test_peak_bin_tie_break_and_edge_cases():
    assert peak_bin(np.array([0, 7, 7, 3])) == 1
    assert peak_bin(np.ones(16)) == 0
    with pytest.raises(ValueError):
        peak_bin(np.array([]))


def test_compress_bundles_everything(rx1):
    prof = compress(rx1, _embed(rx1, 42), pulse_index=9)
    assert prof.pulse_index == 9
    assert peak_bin(prof.magnitude) == 42
    assert len(prof) == 2688
    assert np.array_equal(prof.lags.real, prof.lags_re.astype(np.float64))
