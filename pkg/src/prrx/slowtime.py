"""Slow-time processing: interferometric phase to displacement, vibration
spectra of the monitored bin, and the spectrum-history waterfall.

Displacement convention: with the echo phase phi = -4*pi*f0*(R0+dR)/c, a
range increase makes the wrapped phase decrease, so
dR = c * (phi_0 - phi_n) / (4*pi*f0) after unwrapping. At f0 = 5.755 GHz
one radian of phase change is 4.1455 mm and the unambiguous span per
pulse-to-pulse step is +/- lambda/4 = +/- 13.02 mm.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT_M_S


def unwrap_phase(phase: np.ndarray) -> np.ndarray:
    """Cumulative unwrap with steps folded into (-pi, pi].

    Same contract as np.unwrap except the half-turn boundary goes to +pi
    (k = ceil((d - pi) / (2*pi)) per step), keeping an exact +pi jump a
    positive step regardless of sign noise.
    """
    phase = np.asarray(phase, dtype=np.float64)
    if phase.ndim != 1:
        raise ValueError("phase must be 1-D")
    if len(phase) == 0:
        return phase.copy()
    d = np.diff(phase)
    k = np.ceil((d - np.pi) / (2.0 * np.pi))
    out = np.empty_like(phase)
    out[0] = phase[0]
    out[1:] = phase[0] + np.cumsum(d - 2.0 * np.pi * k)
    return out


def displacement_scale_m_per_rad(carrier_hz: float) -> float:
    return SPEED_OF_LIGHT_M_S / (4.0 * np.pi * carrier_hz)


@dataclass(frozen=True)
class BinSeries:
    """Complex samples of one range bin, one per PRI, gap-free."""

    bin_index: int
    samples: np.ndarray
    prf_hz: float
    first_pulse: int = 0

    def __post_init__(self):
        if self.prf_hz <= 0:
            raise ValueError("prf_hz must be positive")
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1:
            raise ValueError("samples must be 1-D")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def phase(self) -> np.ndarray:
        return np.arctan2(self.samples.imag, self.samples.real)


@dataclass
class DisplacementTrace:
    values_m: np.ndarray              # relative to the first pulse
    unwrap_corrections: int = 0       # steps that needed a +/- 2*pi*k fix
    first_pulse: int = 0

    def __post_init__(self):
        self.values_m = np.asarray(self.values_m, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.values_m)

    @property
    def pulse_indices(self) -> np.ndarray:
        return self.first_pulse + np.arange(len(self.values_m))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["pulse_index", "displacement_m"])
            for p, d in zip(self.pulse_indices, self.values_m):
                w.writerow([int(p), repr(float(d))])


def displacement(series, carrier_hz: float) -> DisplacementTrace:
    """Bin series (or raw wrapped-phase array) -> relative displacement.

    delta_phi_n = -(unwrapped_n - unwrapped_0); dR_n = c*delta_phi_n/(4*pi*f0),
    so values_m[0] is exactly 0 and a receding target gives positive values.
    """
    if isinstance(series, BinSeries):
        phase = series.phase
        first = series.first_pulse
    else:
        phase = np.asarray(series, dtype=np.float64)
        first = 0
    unwrapped = unwrap_phase(phase)
    corrections = 0
    if len(phase) > 1:
        corrections = int(np.count_nonzero(
            np.round((np.diff(phase) - np.diff(unwrapped)) / (2.0 * np.pi))
        ))
    rel = unwrapped - unwrapped[0] if len(unwrapped) else unwrapped
    return DisplacementTrace(
        values_m=-displacement_scale_m_per_rad(carrier_hz) * rel,
        unwrap_corrections=corrections,
        first_pulse=first,
    )


def mean_displacement(trace: DisplacementTrace, window: int = 128) -> float:
    """Mean of the last `window` values (settled-value estimate)."""
    if not 1 <= window <= len(trace):
        raise ValueError("window out of range")
    return float(np.mean(trace.values_m[-window:]))


def peak_to_peak(trace: DisplacementTrace, window: int | None = None) -> float:
    """max - min over the last `window` values (whole trace when None)."""
    n = len(trace) if window is None else window
    if not 2 <= n <= len(trace):
        raise ValueError("window out of range")
    tail = trace.values_m[-n:]
    return float(np.max(tail) - np.min(tail))


class DisplacementTracker:
    """Incremental unwrapping tracker for streaming use.

    Feeds one wrapped phase per pulse; maintains the running unwrapped
    phase relative to the first sample so a long session never has to
    retain the full history. Steps landing within 5% of the +/- pi
    ambiguity boundary are counted in `suspect_steps` (motion faster than
    ~lambda/4 per PRI cannot be distinguished from its alias).
    """

    def __init__(self, carrier_hz: float):
        self.carrier_hz = carrier_hz
        self._scale = displacement_scale_m_per_rad(carrier_hz)
        self._prev_wrapped: float | None = None
        self._unwrapped = 0.0
        self._origin = 0.0
        self.count = 0
        self.unwrap_corrections = 0
        self.suspect_steps = 0

    def reset(self) -> None:
        self._prev_wrapped = None
        self._unwrapped = 0.0
        self._origin = 0.0
        self.count = 0
        self.unwrap_corrections = 0
        self.suspect_steps = 0

    def push(self, wrapped_phase: float) -> float:
        """Returns displacement in metres relative to the first pushed pulse."""
        phi = float(wrapped_phase)
        if self._prev_wrapped is None:
            self._origin = phi
            self._unwrapped = phi
        else:
            d = phi - self._prev_wrapped
            k = np.ceil((d - np.pi) / (2.0 * np.pi))
            if k != 0:
                self.unwrap_corrections += 1
            step = d - 2.0 * np.pi * k
            if abs(step) > 0.95 * np.pi:
                self.suspect_steps += 1
            self._unwrapped += step
        self._prev_wrapped = phi
        self.count += 1
        return -self._scale * (self._unwrapped - self._origin)

    @property
    def displacement_m(self) -> float:
        if self._prev_wrapped is None:
            return 0.0
        return -self._scale * (self._unwrapped - self._origin)


# --------------------------------------------------------------------------
# Spectra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VibrationSpectrum:
    freq_hz: np.ndarray
    magnitude: np.ndarray
    prf_hz: float
    n_fft: int
    input_mode: str = "complex"

    @property
    def resolution_hz(self) -> float:
        return self.prf_hz / self.n_fft

    def velocity_axis_mm_s(self, wavelength_m: float) -> np.ndarray:
        """Axis rescale for velocity mode: v = f * lambda / 2."""
        return self.freq_hz * wavelength_m / 2.0 * 1e3

    def peak(self, f_lo: float = 0.0, f_hi: float | None = None) -> tuple:
        """(freq_hz, magnitude) of the largest bin within [f_lo, f_hi]."""
        hi = self.freq_hz[-1] if f_hi is None else f_hi
        mask = (self.freq_hz >= f_lo) & (self.freq_hz <= hi)
        if not np.any(mask):
            raise ValueError("empty frequency range")
        idx = np.flatnonzero(mask)
        best = idx[np.argmax(self.magnitude[idx])]
        return float(self.freq_hz[best]), float(self.magnitude[best])

    def band_level(self, f_center: float, half_bins: int = 2) -> float:
        """Root-sum-square magnitude in a +/- half_bins window around the
        bin nearest f_center; robust to rectangular-window scalloping."""
        center = int(round(f_center / self.resolution_hz))
        lo = max(0, center - half_bins)
        hi = min(len(self.magnitude), center + half_bins + 1)
        return float(np.sqrt(np.sum(self.magnitude[lo:hi] ** 2)))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["freq_hz", "magnitude"])
            for fq, a in zip(self.freq_hz, self.magnitude):
                w.writerow([repr(float(fq)), repr(float(a))])


def vibration_spectrum(
    samples: np.ndarray,
    prf_hz: float,
    input_mode: str = "complex",
    remove_mean: bool = True,
    one_sided: bool = True,
    window: str = "rect",
) -> VibrationSpectrum:
    """Magnitude spectrum of one pack of the monitored bin.

    input_mode="complex" transforms the raw complex bin samples: a target
    vibrating with modulation index m carries Bessel sidebands |J_k(m)| at
    the k-th harmonic, as on the operator display. input_mode="displacement"
    transforms the real displacement trace instead, scaled so a pure tone
    a*sin(2*pi*f*t) lands (scalloping aside) at magnitude a in its bin.

    One-sided output covers 0..PRF/2; real input doubles interior bins to
    keep tone calibration, complex input reports the positive-frequency
    half as-is. window="hann" trades scalloping for leakage; coherent gain
    is normalized out so tone calibration holds either way.
    """
    x = np.asarray(samples)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("pack must be a non-empty 1-D array")
    if input_mode == "complex":
        x = x.astype(np.complex128)
    elif input_mode == "displacement":
        x = x.astype(np.float64)
    else:
        raise ValueError("input_mode must be 'complex' or 'displacement'")
    n = len(x)
    if remove_mean:
        x = x - np.mean(x)
    if window == "rect":
        w = np.ones(n)
    elif window == "hann":
        w = np.hanning(n)
    else:
        raise ValueError("window must be 'rect' or 'hann'")
    spec = np.abs(np.fft.fft(x * w)) / np.sum(w)
    if not one_sided:
        freqs = np.fft.fftfreq(n, d=1.0 / prf_hz)
        order = np.argsort(freqs)
        return VibrationSpectrum(freqs[order], spec[order], prf_hz, n, input_mode)
    half = n // 2 + 1
    freqs = np.arange(half) * (prf_hz / n)  # 0 .. PRF/2 inclusive for even n
    mag = spec[:half].copy()
    if input_mode == "displacement":
        hi = half - 1 if n % 2 == 0 else half
        mag[1:hi] *= 2.0
    return VibrationSpectrum(freqs, mag, prf_hz, n, input_mode)


# --------------------------------------------------------------------------
# Waterfall
# --------------------------------------------------------------------------


class Waterfall:
    """Bounded history of vibration-spectrum rows, oldest evicted first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._rows: list = []
        self._width: int | None = None

    def push(self, spectrum) -> None:
        row = np.asarray(
            spectrum.magnitude if isinstance(spectrum, VibrationSpectrum) else spectrum,
            dtype=np.float64,
        ).copy()
        if self._width is None:
            self._width = len(row)
        elif len(row) != self._width:
            raise ValueError(f"expected {self._width} bins, got {len(row)}")
        self._rows.append(row)
        if len(self._rows) > self.capacity:
            del self._rows[0]

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, 0))
        return np.stack(self._rows)

    def normalized_db(self, floor_db: float = -60.0) -> np.ndarray:
        """Rows in dB relative to the buffer peak, clamped at floor_db."""
        r = self.rows
        peak = np.max(r) if r.size else 0.0
        if peak <= 0.0:
            return np.full_like(r, floor_db)
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(r / peak)
        return np.maximum(db, floor_db)
