"""Baseband linear-FM chirp synthesis and 16-bit I/Q quantization.

The transmit pulse is a constant-modulus complex chirp. At baseband the
sweep is centered: instantaneous frequency runs from -bandwidth/2 at the
pulse start to +bandwidth/2 at the pulse end (an optional offset shifts
the whole sweep for experiments). Quantization mirrors a 16-bit converter:
round-half-away-from-zero, saturating, with a configurable drive headroom.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT_M_S

INT16_MIN = -32768
INT16_MAX = 32767
FULL_SCALE = 32767.0

DEFAULT_HEADROOM = 0.9


@dataclass(frozen=True)
class ChirpParams:
    """Linear-FM pulse description (paper-default values)."""

    carrier_hz: float = 5.755e9
    bandwidth_hz: float = 40e6
    duration_s: float = 3.73e-6
    sample_rate_hz: float = 120e6
    initial_phase_rad: float = 0.0
    sweep_offset_hz: float = 0.0

    def __post_init__(self):
        for name in ("carrier_hz", "bandwidth_hz", "duration_s", "sample_rate_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.bandwidth_hz > self.sample_rate_hz:
            raise ValueError(
                f"bandwidth {self.bandwidth_hz} Hz exceeds complex Nyquist at "
                f"sample rate {self.sample_rate_hz} Hz"
            )
        if self.num_samples < 2:
            raise ValueError("pulse shorter than 2 samples")

    @property
    def num_samples(self) -> int:
        """Sample count of the pulse (448 for paper defaults)."""
        return round(self.duration_s * self.sample_rate_hz)

    @property
    def angular_rate(self) -> float:
        """Chirp angular rate, rad/s^2."""
        return 2.0 * np.pi * self.bandwidth_hz / self.duration_s

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.carrier_hz

    @property
    def range_per_sample_m(self) -> float:
        """Range-bin spacing of the compressed profile."""
        return SPEED_OF_LIGHT_M_S / (2.0 * self.sample_rate_hz)

    def to_json(self) -> dict:
        return {
            "carrier_hz": self.carrier_hz,
            "bandwidth_hz": self.bandwidth_hz,
            "duration_s": self.duration_s,
            "sample_rate_hz": self.sample_rate_hz,
            "initial_phase_rad": self.initial_phase_rad,
            "sweep_offset_hz": self.sweep_offset_hz,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChirpParams":
        return cls(**obj)


@dataclass
class IqBuffer:
    """Fixed-point 16-bit I/Q sample vector.

    `saturation_count` records how many components clipped during
    quantization (saturation is defined behavior, not an error).
    """

    i: np.ndarray
    q: np.ndarray
    saturation_count: int = 0

    def __post_init__(self):
        self.i = np.asarray(self.i, dtype=np.int16)
        self.q = np.asarray(self.q, dtype=np.int16)
        if self.i.shape != self.q.shape or self.i.ndim != 1:
            raise ValueError("I and Q must be 1-D vectors of equal length")

    def __len__(self) -> int:
        return len(self.i)

    @classmethod
    def zeros(cls, n: int) -> "IqBuffer":
        return cls(np.zeros(n, dtype=np.int16), np.zeros(n, dtype=np.int16))

    def as_complex(self) -> np.ndarray:
        """Exact complex128 view of the integer samples."""
        return self.i.astype(np.float64) + 1j * self.q.astype(np.float64)


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, halves away from zero (converter-style)."""
    x = np.asarray(x, dtype=np.float64)
    return np.trunc(x + np.copysign(0.5, x))


def synthesize_chirp(params: ChirpParams) -> np.ndarray:
    """Synthesize the unit-amplitude baseband chirp.

    Sample n sits at t = n / sample_rate; the phase polynomial is
    2*pi*(-B/2 + offset)*t + (alpha/2)*t^2 + phi0 with alpha = 2*pi*B/tau.
    """
    n = params.num_samples
    t = np.arange(n, dtype=np.float64) / params.sample_rate_hz
    f_start = -0.5 * params.bandwidth_hz + params.sweep_offset_hz
    phase = (
        2.0 * np.pi * f_start * t
        + 0.5 * params.angular_rate * t * t
        + params.initial_phase_rad
    )
    return np.exp(1j * phase)


def quantize(samples: np.ndarray, headroom: float = DEFAULT_HEADROOM) -> IqBuffer:
    """Map complex floats to int16 I/Q at the given drive level.

    Each component becomes round(v * headroom * 32767), saturating at the
    int16 bounds; clipped components are counted on the returned buffer.
    """
    if not 0.0 < headroom <= 1.0:
        raise ValueError("headroom must be in (0, 1]")
    samples = np.asarray(samples, dtype=np.complex128)
    scale = headroom * FULL_SCALE
    i_raw = round_half_away(samples.real * scale)
    q_raw = round_half_away(samples.imag * scale)
    n_sat = int(
        np.count_nonzero((i_raw < INT16_MIN) | (i_raw > INT16_MAX))
        + np.count_nonzero((q_raw < INT16_MIN) | (q_raw > INT16_MAX))
    )
    i16 = np.clip(i_raw, INT16_MIN, INT16_MAX).astype(np.int16)
    q16 = np.clip(q_raw, INT16_MIN, INT16_MAX).astype(np.int16)
    return IqBuffer(i16, q16, saturation_count=n_sat)


def dequantize(buf: IqBuffer, headroom: float = DEFAULT_HEADROOM) -> np.ndarray:
    """Inverse of `quantize` up to rounding, back to +-1.0 full scale."""
    scale = headroom * FULL_SCALE
    return buf.as_complex() / scale
