"""Synthetic targets, motion programs, and the propagation channel.

Per pulse the renderer produces the RX1 reference (the quantized chirp,
zero delay by construction) and the RX2 scene echo: each target's chirp is
fractionally delayed by its round-trip time, rotated by the carrier phase
exp(-j*2*pi*f0*t_del), summed, degraded with seeded complex Gaussian
noise, and quantized to 16 bits.

Motion follows stop-and-hop: the variable range component is sampled once
at each pulse's transmit instant and held for the pulse.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import SPEED_OF_LIGHT_M_S
from .waveform import ChirpParams, IqBuffer, quantize, DEFAULT_HEADROOM


class SceneError(ValueError):
    """Invalid scene description or a target outside the receive window."""


# --------------------------------------------------------------------------
# Motion programs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Static:
    def offset_m(self, pulse_index: int, prf_hz: float) -> float:
        return 0.0

    def to_json(self) -> dict:
        return {"kind": "static"}


@dataclass(frozen=True)
class StepSchedule:
    """Piecewise-constant offsets: each (pulse_index, offset_m) entry takes
    effect at that pulse and holds until the next entry."""

    steps: tuple = ()

    def __post_init__(self):
        steps = tuple((int(p), float(o)) for p, o in self.steps)
        if any(not np.isfinite(o) for _, o in steps):
            raise SceneError("step offsets must be finite")
        if list(p for p, _ in steps) != sorted(p for p, _ in steps):
            raise SceneError("step schedule must be sorted by pulse index")
        object.__setattr__(self, "steps", steps)

    def offset_m(self, pulse_index: int, prf_hz: float) -> float:
        current = 0.0
        for p, o in self.steps:
            if p > pulse_index:
                break
            current = o
        return current

    def to_json(self) -> dict:
        return {"kind": "steps", "steps": [[p, o] for p, o in self.steps]}


@dataclass(frozen=True)
class Sinusoid:
    freq_hz: float
    peak_amp_m: float
    phase_rad: float = 0.0

    def offset_m(self, pulse_index: int, prf_hz: float) -> float:
        t = pulse_index / prf_hz
        return self.peak_amp_m * np.sin(2.0 * np.pi * self.freq_hz * t + self.phase_rad)

    def to_json(self) -> dict:
        return {
            "kind": "sinusoid",
            "freq_hz": self.freq_hz,
            "peak_amp_m": self.peak_amp_m,
            "phase_rad": self.phase_rad,
        }


@dataclass(frozen=True)
class LinearRamp:
    rate_m_per_pulse: float

    def offset_m(self, pulse_index: int, prf_hz: float) -> float:
        return self.rate_m_per_pulse * pulse_index

    def to_json(self) -> dict:
        return {"kind": "ramp", "rate_m_per_pulse": self.rate_m_per_pulse}


def motion_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "static":
        return Static()
    if kind == "steps":
        return StepSchedule(tuple((p, o) for p, o in obj["steps"]))
    if kind == "sinusoid":
        return Sinusoid(obj["freq_hz"], obj["peak_amp_m"], obj.get("phase_rad", 0.0))
    if kind == "ramp":
        return LinearRamp(obj["rate_m_per_pulse"])
    raise SceneError(f"unknown motion kind {kind!r}")


# --------------------------------------------------------------------------
# Scene description
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetSpec:
    range0_m: float
    amplitude: float = 1.0
    motion: object = field(default_factory=Static)

    def __post_init__(self):
        if self.range0_m < 0:
            raise SceneError("range0_m must be non-negative")
        if not 0.0 < self.amplitude <= 1.0:
            raise SceneError("amplitude must be in (0, 1]")

    def to_json(self) -> dict:
        return {
            "range0_m": self.range0_m,
            "amplitude": self.amplitude,
            "motion": self.motion.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TargetSpec":
        return cls(
            range0_m=obj["range0_m"],
            amplitude=obj.get("amplitude", 1.0),
            motion=motion_from_json(obj.get("motion", {"kind": "static"})),
        )


@dataclass(frozen=True)
class ChannelSpec:
    """Noise model. snr_db is per-sample echo power over noise power in the
    raw RX2 window (pre-compression), referenced to the strongest target;
    None disables noise. With no targets the reference is full-scale unit
    power. Generation is fully determined by (noise_seed, pulse index)."""

    snr_db: float | None = None
    noise_seed: int = 0
    rx1_noise_db: float | None = None

    def to_json(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "noise_seed": self.noise_seed,
            "rx1_noise_db": self.rx1_noise_db,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChannelSpec":
        return cls(
            snr_db=obj.get("snr_db"),
            noise_seed=obj.get("noise_seed", 0),
            rx1_noise_db=obj.get("rx1_noise_db"),
        )


@dataclass
class Scene:
    targets: list
    channel: ChannelSpec = field(default_factory=ChannelSpec)

    def to_json(self) -> dict:
        return {
            "targets": [t.to_json() for t in self.targets],
            "channel": self.channel.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Scene":
        try:
            targets = [TargetSpec.from_json(t) for t in obj.get("targets", [])]
            channel = ChannelSpec.from_json(obj.get("channel", {}))
        except (KeyError, TypeError) as e:
            raise SceneError(f"malformed scene: {e}") from e
        return cls(targets=targets, channel=channel)


def load_scene(path) -> Scene:
    with open(path) as f:
        return Scene.from_json(json.load(f))


@dataclass(frozen=True)
class PulsePair:
    """One PRI of raw capture plus the motion ground truth."""

    rx1: IqBuffer
    rx2: IqBuffer
    pulse_index: int
    truth: tuple  # ((target_id, delta_r_m), ...)


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def delay_of(target: TargetSpec, pulse_index: int, prf_hz: float) -> float:
    """Round-trip delay 2*(R0 + dR)/c at the pulse transmit instant."""
    dr = target.motion.offset_m(pulse_index, prf_hz)
    return 2.0 * (target.range0_m + dr) / SPEED_OF_LIGHT_M_S


def _noise(power: float, seed_key: tuple, n: int) -> np.ndarray:
    # Circularly-symmetric complex Gaussian, per-component variance power/2.
    # PRNG fixed to PCG64 seeded from (noise_seed, pulse_index, channel tag)
    # so every pulse reproduces independently of render order.
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    sigma = np.sqrt(power / 2.0)
    return sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def render_rx2_float(
    chirp: np.ndarray,
    params: ChirpParams,
    targets: list,
    channel: ChannelSpec,
    pulse_index: int,
    prf_hz: float,
    window_len: int = 3136,
    chirp_spectrum: np.ndarray | None = None,
) -> np.ndarray:
    """Pre-quantization RX2 window: delayed, phase-rotated echoes plus noise.

    The fractional delay is a frequency-domain linear phase on the
    zero-padded chirp (exact for the band-limited pulse); integer delays
    reduce to exact circular shifts. chirp_spectrum short-circuits the
    per-pulse FFT of the padded chirp when the caller has it cached.
    """
    window_s = window_len / params.sample_rate_hz
    acc = np.zeros(window_len, dtype=np.complex128)

    spectrum = np.fft.fft(chirp, n=window_len) if chirp_spectrum is None else chirp_spectrum
    fbins = np.fft.fftfreq(window_len) * window_len  # signed integer bins

    for tid, target in enumerate(targets):
        t_del = delay_of(target, pulse_index, prf_hz)
        if t_del + params.duration_s > window_s:
            raise SceneError(
                f"target {tid} at t_del={t_del * 1e6:.3f} us does not fit the "
                f"{window_s * 1e6:.2f} us receive window"
            )
        d = t_del * params.sample_rate_hz
        shifted = np.fft.ifft(spectrum * np.exp(-2j * np.pi * fbins * d / window_len))
        acc += target.amplitude * np.exp(-2j * np.pi * params.carrier_hz * t_del) * shifted

    if channel.snr_db is not None:
        ref_power = max((t.amplitude**2 for t in targets), default=1.0)
        noise_power = ref_power / 10.0 ** (channel.snr_db / 10.0)
        acc += _noise(noise_power, (channel.noise_seed, pulse_index, 2), window_len)
    return acc


def render_rx2(
    chirp: np.ndarray,
    params: ChirpParams,
    targets: list,
    channel: ChannelSpec,
    pulse_index: int,
    prf_hz: float,
    window_len: int = 3136,
    headroom: float = DEFAULT_HEADROOM,
    chirp_spectrum: np.ndarray | None = None,
) -> IqBuffer:
    return quantize(
        render_rx2_float(
            chirp, params, targets, channel, pulse_index, prf_hz, window_len, chirp_spectrum
        ),
        headroom,
    )


def render_rx1(
    chirp: np.ndarray,
    channel: ChannelSpec,
    pulse_index: int = 0,
    headroom: float = DEFAULT_HEADROOM,
) -> IqBuffer:
    """Quantized reference replica; optional receiver noise at rx1_noise_db
    below the unit chirp power."""
    samples = chirp
    if channel.rx1_noise_db is not None:
        power = 10.0 ** (-channel.rx1_noise_db / 10.0)
        samples = chirp + _noise(power, (channel.noise_seed, pulse_index, 1), len(chirp))
    return quantize(samples, headroom)


class SceneRenderer:
    """Stateful per-pulse renderer; precomputes the chirp and warns once on
    slow-time-aliased sinusoid motion."""

    def __init__(
        self,
        params: ChirpParams,
        scene: Scene,
        prf_hz: float,
        window_len: int = 3136,
        headroom: float = DEFAULT_HEADROOM,
    ):
        from .waveform import synthesize_chirp

        self.params = params
        self.scene = scene
        self.prf_hz = prf_hz
        self.window_len = window_len
        self.headroom = headroom
        self.chirp = synthesize_chirp(params)
        self._chirp_spectrum = np.fft.fft(self.chirp, n=window_len)
        self._check_aliasing()

    def _check_aliasing(self):
        for tid, t in enumerate(self.scene.targets):
            if isinstance(t.motion, Sinusoid) and t.motion.freq_hz >= self.prf_hz / 2.0:
                warnings.warn(
                    f"target {tid}: vibration at {t.motion.freq_hz} Hz is at or above "
                    f"PRF/2 = {self.prf_hz / 2.0} Hz and will alias",
                    stacklevel=3,
                )

    def set_motion(self, target_id: int, motion) -> None:
        if not 0 <= target_id < len(self.scene.targets):
            raise SceneError(f"no target {target_id}")
        t = self.scene.targets[target_id]
        self.scene.targets[target_id] = TargetSpec(t.range0_m, t.amplitude, motion)
        self._check_aliasing()

    def set_snr(self, snr_db: float | None) -> None:
        ch = self.scene.channel
        self.scene.channel = ChannelSpec(snr_db, ch.noise_seed, ch.rx1_noise_db)

    def render(self, pulse_index: int) -> PulsePair:
        truth = tuple(
            (tid, t.motion.offset_m(pulse_index, self.prf_hz))
            for tid, t in enumerate(self.scene.targets)
        )
        rx1 = render_rx1(self.chirp, self.scene.channel, pulse_index, self.headroom)
        rx2 = render_rx2(
            self.chirp,
            self.params,
            self.scene.targets,
            self.scene.channel,
            pulse_index,
            self.prf_hz,
            self.window_len,
            self.headroom,
            chirp_spectrum=self._chirp_spectrum,
        )
        return PulsePair(rx1=rx1, rx2=rx2, pulse_index=pulse_index, truth=truth)
