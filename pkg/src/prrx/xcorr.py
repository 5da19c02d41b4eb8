"""Fixed-point range compressor mirroring the FPGA datapath contract.

Per PRI: the previous pulse's I/Q mean is subtracted from both channels
(DC offset correction, first pulse uses zero), the 448-tap conjugated
cross-correlation sweeps the 3136-sample receive window, and magnitude and
phase are extracted per lag. All correlation arithmetic is integer and
exact; the bit-growth ledger is

    16-bit samples -> 17-bit after DC correction -> 42-bit lag components
    -> 85-bit magnitude-squared -> 64-bit after dropping the 21 LSBs
    -> integer square root.

The 42-bit component bound holds even with worst-case DC correction:
corrected samples stay within +-65535, so |Re|, |Im| <= 448 * 2 * 65535^2
= 3.85e12 < 2^42. A defensive 48-bit accumulator bound is asserted on
every pulse; it can only fire on a contract violation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import IqBuffer

ACCUM_GUARD_BITS = 47  # |component| must stay below 2^47 (48-bit signed headroom)
MAGSQ_DROP_BITS = 21  # 85-bit squared magnitude truncated to 64 bits


@dataclass(frozen=True)
class EngineConfig:
    """Correlator geometry and the documented bit-depth contract."""

    taps: int = 448
    window_len: int = 3136
    sample_bits: int = 16
    accum_bits_expected: int = 42
    magsq_bits_expected: int = 85
    truncate_to_bits: int = 64

    def __post_init__(self):
        if self.taps < 1 or self.window_len < 1:
            raise ValueError("taps and window_len must be positive")
        if self.taps > self.window_len:
            raise ValueError("taps cannot exceed window_len")

    @property
    def num_lags(self) -> int:
        """Output profile length (2688 for paper defaults)."""
        return self.window_len - self.taps

    def to_json(self) -> dict:
        return {"taps": self.taps, "window_len": self.window_len}

    @classmethod
    def from_json(cls, obj: dict) -> "EngineConfig":
        return cls(**obj)


@dataclass(frozen=True)
class DcEstimate:
    """Per-channel integer I/Q mean, applied to the *next* pulse."""

    mean_i: int = 0
    mean_q: int = 0


DC_ZERO = DcEstimate(0, 0)


def _round_half_away_ratio(total: int, count: int) -> int:
    # Exact round-half-away-from-zero of total/count in integers.
    if total >= 0:
        return (2 * total + count) // (2 * count)
    return -((-2 * total + count) // (2 * count))


def dc_estimate(buffer: IqBuffer) -> DcEstimate:
    """Arithmetic I/Q mean of one pulse, rounded to the nearest integer."""
    n = len(buffer)
    if n == 0:
        raise ValueError("empty buffer")
    return DcEstimate(
        _round_half_away_ratio(int(buffer.i.sum(dtype=np.int64)), n),
        _round_half_away_ratio(int(buffer.q.sum(dtype=np.int64)), n),
    )


def cross_correlate(
    rx1: IqBuffer,
    rx2: IqBuffer,
    dc1: DcEstimate = DC_ZERO,
    dc2: DcEstimate = DC_ZERO,
    config: EngineConfig = EngineConfig(),
) -> tuple[np.ndarray, np.ndarray]:
    """Conjugated integer cross-correlation of the DC-corrected buffers.

    Returns (re, im) int64 vectors of length window_len - taps where
    out[m] = sum_k conj(rx1'[k]) * rx2'[k+m], m = 0 .. num_lags-1, so a
    target at integer sample delay d peaks at lag m = d.
    """
    if len(rx1) != config.taps:
        raise ValueError(f"rx1 length {len(rx1)} != taps {config.taps}")
    if len(rx2) != config.window_len:
        raise ValueError(f"rx2 length {len(rx2)} != window_len {config.window_len}")

    i1 = rx1.i.astype(np.int64) - dc1.mean_i
    q1 = rx1.q.astype(np.int64) - dc1.mean_q
    i2 = rx2.i.astype(np.int64) - dc2.mean_i
    q2 = rx2.q.astype(np.int64) - dc2.mean_q

    n = config.num_lags
    # conj(rx1)*rx2 expanded into four real correlations, all exact in int64
    re = np.correlate(i2, i1, "valid")[:n] + np.correlate(q2, q1, "valid")[:n]
    im = np.correlate(q2, i1, "valid")[:n] - np.correlate(i2, q1, "valid")[:n]

    peak = max(int(np.abs(re).max(initial=0)), int(np.abs(im).max(initial=0)))
    if peak >= 1 << ACCUM_GUARD_BITS:
        raise OverflowError(
            f"accumulator reached {peak.bit_length()} bits; "
            f"inputs violate the {config.sample_bits}-bit sample contract"
        )
    return re, im


def magnitude(
    re: np.ndarray,
    im: np.ndarray,
    truncation: str = "lsb",
) -> np.ndarray:
    """Per-lag integer magnitude: isqrt of the truncated squared sum.

    The 85-bit re^2 + im^2 is reduced to 64 bits before the square root.
    `truncation="lsb"` (default, matches the shipped datapath) drops the
    21 least-significant bits uniformly, so small squared sums (< 2^21)
    floor to zero; `"msb"` instead saturates values at 2^64 - 1, keeping
    small-signal precision at the cost of clipping full-scale peaks.
    Exact to the last bit; done in uint64 limbs to avoid big-int cost.
    """
    re = np.asarray(re, dtype=np.int64)
    im = np.asarray(im, dtype=np.int64)
    ur = np.abs(re).astype(np.uint64)
    ui = np.abs(im).astype(np.uint64)
    # beyond 42-bit components the squared sum would exceed the 85-bit
    # contract and the limb arithmetic below would wrap silently
    top = np.uint64(1) << np.uint64(42)
    if bool(np.any(ur >= top)) or bool(np.any(ui >= top)):
        raise OverflowError("lag components exceed the 42-bit contract")

    shift = np.uint64(MAGSQ_DROP_BITS)
    mask = np.uint64((1 << MAGSQ_DROP_BITS) - 1)
    # |re| < 2^43, so re^2 needs 86 bits: split at 21 bits and recombine the
    # >>21 result limb-wise. s = (a*2^21 + b)^2 summed over re/im gives
    # s >> 21 = P*2^21 + Q + (R >> 21) with P,Q,R below.
    ar, br = ur >> shift, ur & mask
    ai, bi = ui >> shift, ui & mask
    P = ar * ar + ai * ai
    Q = np.uint64(2) * (ar * br + ai * bi)
    R = br * br + bi * bi

    if truncation == "lsb":
        t = (P << shift) + Q + (R >> shift)
    elif truncation == "msb":
        s_hi = (P << shift) + Q + (R >> shift)  # s >> 21, exact
        s_mod = (P << (np.uint64(2) * shift)) + (Q << shift) + R  # s mod 2^64
        overflow = s_hi >= (np.uint64(1) << np.uint64(64 - MAGSQ_DROP_BITS))
        t = np.where(overflow, np.uint64(0xFFFFFFFFFFFFFFFF), s_mod)
    else:
        raise ValueError(f"unknown truncation mode {truncation!r}")

    return _isqrt_u64(t)


def _isqrt_u64(t: np.ndarray) -> np.ndarray:
    """Exact floor square root of uint64 values, vectorized."""
    y = np.sqrt(t.astype(np.float64)).astype(np.uint64)
    y = np.minimum(y, np.uint64(0xFFFFFFFF))
    # float seed is within +-1 of the true root; settle with two guarded steps
    for _ in range(2):
        y = np.where(y * y > t, y - np.uint64(1), y)
    yp = y + np.uint64(1)
    bump = (yp <= np.uint64(0xFFFFFFFF)) & (yp * yp <= t)
    return np.where(bump, yp, y)


def phase(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    """Per-lag phase via exact atan2, in (-pi, pi]; (0, 0) maps to 0.

    Lag components stay below 2^43 so the float64 conversion is exact.
    """
    return np.arctan2(
        np.asarray(im, dtype=np.float64), np.asarray(re, dtype=np.float64)
    )


def peak_bin(mag: np.ndarray) -> int:
    """Index of the profile maximum; ties break to the lowest index."""
    mag = np.asarray(mag)
    if mag.size == 0:
        raise ValueError("empty magnitude vector")
    return int(np.argmax(mag))


@dataclass
class RangeProfile:
    """One compressed pulse: complex integer lags plus derived vectors."""

    lags_re: np.ndarray
    lags_im: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray
    pulse_index: int

    @property
    def lags(self) -> np.ndarray:
        """Exact complex128 view of the integer lags."""
        return self.lags_re.astype(np.float64) + 1j * self.lags_im.astype(np.float64)

    def __len__(self) -> int:
        return len(self.lags_re)


def compress(
    rx1: IqBuffer,
    rx2: IqBuffer,
    dc1: DcEstimate = DC_ZERO,
    dc2: DcEstimate = DC_ZERO,
    pulse_index: int = 0,
    config: EngineConfig = EngineConfig(),
) -> RangeProfile:
    """Full per-pulse compression: correlate, magnitude, phase."""
    re, im = cross_correlate(rx1, rx2, dc1, dc2, config)
    return RangeProfile(
        lags_re=re,
        lags_im=im,
        magnitude=magnitude(re, im),
        phase=phase(re, im),
        pulse_index=pulse_index,
    )
