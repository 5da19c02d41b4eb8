"""Independent floating-point references used only by the test suite.

Nothing here is allowed on the streaming path: these are the slow,
obviously-correct formulations the engine is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .waveform import ChirpParams, IqBuffer


@dataclass
class OracleProfile:
    lags: np.ndarray  # complex128

    def __len__(self) -> int:
        return len(self.lags)


def _as_complex(x) -> np.ndarray:
    if isinstance(x, IqBuffer):
        return x.as_complex()
    return np.asarray(x, dtype=np.complex128)


def float_xcorr(rx1, rx2, num_lags: int | None = None) -> OracleProfile:
    """Direct-sum double-precision cross-correlation (no FFT).

    lags[m] = sum_k conj(rx1[k]) * rx2[k+m]. For 16-bit integer inputs the
    result components stay far below 2^53, so this is exact.
    """
    a = _as_complex(rx1)
    b = _as_complex(rx2)
    if num_lags is None:
        num_lags = len(b) - len(a)
    ac = np.conj(a)
    out = np.empty(num_lags, dtype=np.complex128)
    for m in range(num_lags):
        out[m] = np.dot(ac, b[m : m + len(a)])
    return OracleProfile(out)


def float_xcorr_conv(rx1, rx2, num_lags: int | None = None) -> OracleProfile:
    """Same operation written as convolution with the conjugate-reversed
    reference; algebraically identical to `float_xcorr`."""
    a = _as_complex(rx1)
    b = _as_complex(rx2)
    if num_lags is None:
        num_lags = len(b) - len(a)
    h = np.conj(a[::-1])
    full = np.convolve(h, b)
    return OracleProfile(full[len(a) - 1 : len(a) - 1 + num_lags])


def analytic_psf(lag_offset_s: float, params: ChirpParams) -> complex:
    """Closed-form autocorrelation of the chirp's complex envelope.

    At offset D (seconds) the value is (tau - |D|) * sinc(B*D*(1 - |D|/tau))
    times exp(j*2*pi*f_off*D) for a sweep shifted by f_off; zero outside
    |D| > tau. Peak value is tau at D = 0.
    """
    tau = params.duration_s
    d = float(lag_offset_s)
    if abs(d) > tau:
        return 0.0 + 0.0j
    tri = tau - abs(d)
    x = params.bandwidth_hz * d * (1.0 - abs(d) / tau)
    env = tri * np.sinc(x)
    return complex(env * np.exp(2j * np.pi * params.sweep_offset_hz * d))


def pm_harmonics(mod_index: float, harmonics=(0, 1, 2, 3, 4, 5)) -> list[tuple[int, float]]:
    """Bessel-series line levels of exp(j*m*sin(w*t)).

    Returns (k, |J_k(m)|) pairs; k=0 is the carrier, k>=1 the harmonics of
    the modulating frequency. These are the expected slow-time spectrum
    levels of a sinusoidally vibrating point target with phase-modulation
    index m, relative to unit signal amplitude.
    """
    if mod_index < 0:
        raise ValueError("modulation index must be non-negative")
    return [(int(k), float(abs(jv(k, mod_index)))) for k in harmonics]


def dense_dft(samples: np.ndarray, freqs_hz: np.ndarray, sample_rate_hz: float) -> np.ndarray:
    """Amplitude of the series at arbitrary analysis frequencies.

    (1/N) * sum_n x[n] * exp(-j*2*pi*f*n/fs): a brute-force DFT used to
    localize spectral lines off the FFT grid.
    """
    x = np.asarray(samples, dtype=np.complex128)
    n = np.arange(len(x))
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    ph = np.exp(-2j * np.pi * np.outer(freqs, n) / sample_rate_hz)
    return (ph @ x) / len(x)
