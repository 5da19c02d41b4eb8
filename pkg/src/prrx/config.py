"""System configuration: waveform, correlator geometry, slow-time and
serving parameters, with JSON load and environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

from .waveform import ChirpParams, DEFAULT_HEADROOM
from .xcorr import EngineConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SystemConfig:
    chirp: ChirpParams = field(default_factory=ChirpParams)
    engine: EngineConfig = field(default_factory=EngineConfig)
    prf_hz: float = 100.0
    pack_size: int = 256          # pulses per vibration-spectrum block
    avg_window: int = 128         # pulses averaged for settled displacement
    headroom: float = DEFAULT_HEADROOM
    monitor_bin: int | None = None  # None: lock to first profile's peak
    profile_stride: int = 4       # wire decimation of magnitude profiles
    waterfall_depth: int = 64
    scene_path: str | None = None
    realtime: bool = True         # wall-clock pacing in serve mode
    host: str = "127.0.0.1"
    port: int = 8765

    def __post_init__(self):
        if self.prf_hz <= 0:
            raise ConfigError("prf_hz must be positive")
        window_s = self.engine.window_len / self.chirp.sample_rate_hz
        # Serving budget: capture window plus 5 ms of compute/IO headroom
        # must fit inside one PRI for real-time pacing to hold.
        if 1.0 / self.prf_hz < window_s + 5e-3:
            raise ConfigError(
                f"PRI {1e3 / self.prf_hz:.3f} ms too short for the "
                f"{window_s * 1e6:.2f} us window plus 5 ms processing budget"
            )
        if self.pack_size < 2 or self.pack_size & (self.pack_size - 1):
            raise ConfigError("pack_size must be a power of two >= 2")
        if not 1 <= self.avg_window <= self.pack_size:
            raise ConfigError("avg_window must be in [1, pack_size]")
        if not 0.0 < self.headroom <= 1.0:
            raise ConfigError("headroom must be in (0, 1]")
        if self.monitor_bin is not None and not 0 <= self.monitor_bin < self.engine.num_lags:
            raise ConfigError("monitor_bin out of range")
        if self.profile_stride < 1:
            raise ConfigError("profile_stride must be >= 1")
        if self.waterfall_depth < 1:
            raise ConfigError("waterfall_depth must be >= 1")
        if self.chirp.num_samples != self.engine.taps:
            raise ConfigError(
                f"chirp length {self.chirp.num_samples} != correlator taps "
                f"{self.engine.taps}"
            )

    def to_json(self) -> dict:
        return {
            "chirp": self.chirp.to_json(),
            "engine": self.engine.to_json(),
            "prf_hz": self.prf_hz,
            "pack_size": self.pack_size,
            "avg_window": self.avg_window,
            "headroom": self.headroom,
            "monitor_bin": self.monitor_bin,
            "profile_stride": self.profile_stride,
            "waterfall_depth": self.waterfall_depth,
            "scene_path": self.scene_path,
            "realtime": self.realtime,
            "host": self.host,
            "port": self.port,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SystemConfig":
        kwargs = dict(obj)
        if "chirp" in kwargs:
            kwargs["chirp"] = ChirpParams.from_json(kwargs["chirp"])
        if "engine" in kwargs:
            kwargs["engine"] = EngineConfig.from_json(kwargs["engine"])
        known = set(cls.__dataclass_fields__)
        unknown = set(kwargs) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kwargs)


def load_config(path=None, env=None) -> SystemConfig:
    """Config from JSON file (optional) with environment overrides:
    PRRX_SEED is consumed by callers building scenes; PRRX_ADDR overrides
    host:port."""
    cfg = SystemConfig() if path is None else SystemConfig.from_json(
        json.loads(open(path).read())
    )
    env = os.environ if env is None else env
    addr = env.get("PRRX_ADDR")
    if addr:
        host, _, port = addr.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"PRRX_ADDR must be host:port, got {addr!r}")
        cfg = replace(cfg, host=host, port=int(port))
    return cfg
