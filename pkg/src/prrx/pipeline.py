"""End-to-end per-pulse pipeline: scene render -> DC correction ->
integer compression -> monitor-bin tracking -> pack spectra.

Commands mutate pipeline state only at PRI boundaries: apply_command()
queues, and the queue drains at the top of the next step().
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig
from .scene import Scene, SceneRenderer, PulsePair, motion_from_json
from .slowtime import DisplacementTracker, Waterfall, vibration_spectrum, VibrationSpectrum
from .xcorr import DC_ZERO, DcEstimate, RangeProfile, cross_correlate, dc_estimate, magnitude, peak_bin

AXIS_MODES = ("frequency", "velocity")


class CommandError(ValueError):
    pass


@dataclass(frozen=True)
class PulseResult:
    pulse_index: int
    pair: PulsePair              # raw quantized capture (for recording)
    profile: RangeProfile
    monitor_bin: int
    bin_sample: complex          # selected lag, pre-truncation integers
    phase_rad: float
    displacement_m: float
    truth: tuple
    spectrum: VibrationSpectrum | None  # set on pack-completing pulses


@dataclass
class _State:
    running: bool = True
    pulse_index: int = 0
    monitor_bin: int | None = None
    pack_size: int = 256
    axis_mode: str = "frequency"
    dc1: DcEstimate = field(default_factory=lambda: DC_ZERO)
    dc2: DcEstimate = field(default_factory=lambda: DC_ZERO)


def _check_pack_size(n) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2 or n & (n - 1):
        raise CommandError("pack_size must be a power of two >= 2")
    return n


class Pipeline:
    """Single-thread driver tying renderer, correlator, and trackers.

    The DC estimate applied to pulse n is the mean measured on pulse n-1
    (zero for the first pulse), matching a streaming correction that can
    not see its own pulse's mean before correlating.
    """

    def __init__(self, config: SystemConfig, scene: Scene):
        self.config = config
        self.renderer = SceneRenderer(
            config.chirp,
            scene,
            config.prf_hz,
            window_len=config.engine.window_len,
            headroom=config.headroom,
        )
        self.tracker = DisplacementTracker(config.chirp.carrier_hz)
        self.waterfall = Waterfall(config.waterfall_depth)
        self._pack: list = []
        self._pending: list = []
        self.state = _State(monitor_bin=config.monitor_bin, pack_size=config.pack_size)

    # -- commands ----------------------------------------------------------

    def apply_command(self, cmd: dict) -> None:
        """Validate and queue a control command; it takes effect at the
        next step(). Raises CommandError (never a silent drop)."""
        if not isinstance(cmd, dict):
            raise CommandError("command must be an object")
        op = cmd.get("op")
        if op in ("start", "stop"):
            pass
        elif op == "select_bin":
            b = cmd.get("bin")
            if not isinstance(b, int) or isinstance(b, bool) or not 0 <= b < self.config.engine.num_lags:
                raise CommandError(
                    f"select_bin: bin must be an integer in [0, {self.config.engine.num_lags})"
                )
        elif op == "set_pack_size":
            _check_pack_size(cmd.get("n"))
        elif op == "set_motion":
            tid = cmd.get("target")
            if not isinstance(tid, int) or isinstance(tid, bool) or not 0 <= tid < len(self.renderer.scene.targets):
                raise CommandError("set_motion: bad target id")
            try:
                motion_from_json(cmd.get("motion") or {})  # validate now, apply later
            except (ValueError, KeyError, TypeError) as e:
                raise CommandError(f"set_motion: {e}") from e
        elif op == "set_snr":
            snr = cmd.get("snr_db")
            if snr is not None and not isinstance(snr, (int, float)):
                raise CommandError("set_snr: snr_db must be a number or null")
        elif op == "set_axis_mode":
            if cmd.get("mode") not in AXIS_MODES:
                raise CommandError(f"set_axis_mode: mode must be one of {AXIS_MODES}")
        else:
            raise CommandError(f"unknown op {op!r}")
        self._pending.append(cmd)

    def _drain_commands(self) -> None:
        for cmd in self._pending:
            op = cmd["op"]
            if op == "start":
                if not self.state.running:
                    self.state.running = True
                    # a fresh acquisition epoch: pack restarts, DC re-primes
                    self._pack.clear()
                    self.state.dc1 = DC_ZERO
                    self.state.dc2 = DC_ZERO
            elif op == "stop":
                self.state.running = False
            elif op == "select_bin":
                self.state.monitor_bin = cmd["bin"]
                self.tracker.reset()
                self._pack.clear()
            elif op == "set_pack_size":
                n = cmd["n"]
                if n != self.state.pack_size:
                    self.state.pack_size = n
                    self._pack.clear()
                    self.waterfall = Waterfall(self.config.waterfall_depth)
            elif op == "set_motion":
                self.renderer.set_motion(cmd["target"], motion_from_json(cmd["motion"]))
            elif op == "set_snr":
                self.renderer.set_snr(cmd.get("snr_db"))
            elif op == "set_axis_mode":
                self.state.axis_mode = cmd["mode"]
        self._pending.clear()

    # -- stepping ----------------------------------------------------------

    @property
    def running(self) -> bool:
        return self.state.running

    @property
    def axis_mode(self) -> str:
        return self.state.axis_mode

    def step(self) -> PulseResult | None:
        """Process one PRI. Returns None while stopped (pulse clock still
        advances so restarts stay aligned to wall-clock pulse numbering)."""
        self._drain_commands()
        idx = self.state.pulse_index
        self.state.pulse_index += 1
        if not self.state.running:
            return None
        return self._process(self.renderer.render(idx))

    def process_pair(self, pair: PulsePair) -> PulseResult | None:
        """Replay path: run compression and tracking on a pre-rendered
        pair, slaving the pulse clock to the pair's index."""
        self._drain_commands()
        self.state.pulse_index = pair.pulse_index + 1
        if not self.state.running:
            return None
        return self._process(pair)

    def _process(self, pair: PulsePair) -> PulseResult:
        profile = self._compress(pair)

        if self.state.monitor_bin is None:
            self.state.monitor_bin = peak_bin(profile.magnitude)
        mbin = self.state.monitor_bin

        bin_sample = complex(profile.lags_re[mbin], profile.lags_im[mbin])
        phase = float(profile.phase[mbin])
        disp = self.tracker.push(phase)

        spectrum = None
        self._pack.append(bin_sample)
        if len(self._pack) >= self.state.pack_size:
            spectrum = vibration_spectrum(np.array(self._pack), self.config.prf_hz)
            self.waterfall.push(spectrum)
            self._pack.clear()

        return PulseResult(
            pulse_index=pair.pulse_index,
            pair=pair,
            profile=profile,
            monitor_bin=mbin,
            bin_sample=bin_sample,
            phase_rad=phase,
            displacement_m=disp,
            truth=pair.truth,
            spectrum=spectrum,
        )

    def _compress(self, pair: PulsePair) -> RangeProfile:
        re, im = cross_correlate(pair.rx1, pair.rx2, self.state.dc1, self.state.dc2, self.config.engine)
        # next pulse's correction comes from this pulse's measured means
        self.state.dc1 = dc_estimate(pair.rx1)
        self.state.dc2 = dc_estimate(pair.rx2)
        mag = magnitude(re, im)
        return RangeProfile(
            lags_re=re,
            lags_im=im,
            magnitude=mag,
            phase=np.arctan2(im.astype(np.float64), re.astype(np.float64)),
            pulse_index=pair.pulse_index,
        )

    def run(self, n_pulses: int) -> list:
        """Step n_pulses times, collecting the non-None results."""
        out = []
        for _ in range(n_pulses):
            r = self.step()
            if r is not None:
                out.append(r)
        return out
