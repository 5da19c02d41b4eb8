"""Offline modes: deterministic batch simulation and recording replay.

Both write the same artifact set into the output directory:

    recording.prrx   raw pulse pairs + truth (simulate only)
    trace.csv        pulse_index, displacement_m
    spectra.csv      pack_index, freq_hz, magnitude (one row per bin)
    profiles.bin     per-pulse magnitude profiles, byte-stable

profiles.bin layout (little-endian): magic b"PRFB", u32 version (1),
u32 num_lags, then per pulse u64 pulse_index + num_lags * u64 magnitudes.

Given the same config, scene, and seed, a simulate run is bit-reproducible;
replaying its recording regenerates trace.csv/spectra.csv/profiles.bin
byte-identically (the compressor is pure integer arithmetic).
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

from .config import SystemConfig
from .pipeline import Pipeline, PulseResult
from .recording import RecordingReader, RecordingWriter
from .scene import Scene

PROFILES_MAGIC = b"PRFB"
PROFILES_VERSION = 1


class _ProfileSink:
    def __init__(self, path, num_lags: int):
        self._f = open(path, "wb")
        self._f.write(PROFILES_MAGIC)
        self._f.write(struct.pack("<II", PROFILES_VERSION, num_lags))

    def write(self, result: PulseResult) -> None:
        self._f.write(struct.pack("<Q", result.pulse_index))
        self._f.write(result.profile.magnitude.astype("<u8").tobytes())

    def close(self) -> None:
        self._f.close()


class _Sinks:
    """The common artifact writers shared by simulate and replay."""

    def __init__(self, out_dir: Path, config: SystemConfig):
        out_dir.mkdir(parents=True, exist_ok=True)
        self.profiles = _ProfileSink(out_dir / "profiles.bin", config.engine.num_lags)
        self._trace_f = open(out_dir / "trace.csv", "w", newline="")
        self.trace = csv.writer(self._trace_f)
        self.trace.writerow(["pulse_index", "displacement_m"])
        self._spectra_f = open(out_dir / "spectra.csv", "w", newline="")
        self.spectra = csv.writer(self._spectra_f)
        self.spectra.writerow(["pack_index", "freq_hz", "magnitude"])
        self.pack_count = 0

    def consume(self, result: PulseResult) -> None:
        self.profiles.write(result)
        self.trace.writerow([result.pulse_index, repr(float(result.displacement_m))])
        if result.spectrum is not None:
            for f, m in zip(result.spectrum.freq_hz, result.spectrum.magnitude):
                self.spectra.writerow([self.pack_count, repr(float(f)), repr(float(m))])
            self.pack_count += 1

    def close(self) -> None:
        self.profiles.close()
        self._trace_f.close()
        self._spectra_f.close()


def run_batch(config: SystemConfig, scene: Scene, n_pulses: int, out_dir) -> dict:
    """Simulate n_pulses PRIs, writing the artifact set plus the raw
    recording. Returns a summary of what was produced."""
    if n_pulses < 0:
        raise ValueError("n_pulses must be >= 0")
    out_dir = Path(out_dir)
    pipeline = Pipeline(config, scene)
    sinks = _Sinks(out_dir, config)
    monitor_bin = None
    try:
        with RecordingWriter(out_dir / "recording.prrx", config, scene) as rec:
            for _ in range(n_pulses):
                result = pipeline.step()
                if result is None:
                    continue
                rec.write(result.pair)
                sinks.consume(result)
                monitor_bin = result.monitor_bin
    finally:
        sinks.close()
    return {
        "pulses": n_pulses,
        "monitor_bin": monitor_bin,
        "packs": sinks.pack_count,
        "out_dir": str(out_dir),
        "files": ["recording.prrx", "trace.csv", "spectra.csv", "profiles.bin"],
    }


def replay_recording(recording_path, out_dir) -> dict:
    """Re-run compression and slow-time analysis over a recorded capture,
    writing the same trace/spectra/profiles artifacts as run_batch."""
    out_dir = Path(out_dir)
    pulses = 0
    monitor_bin = None
    with RecordingReader(recording_path) as reader:
        pipeline = Pipeline(reader.config, reader.scene)
        sinks = _Sinks(out_dir, reader.config)
        try:
            for pair in reader:
                result = pipeline.process_pair(pair)
                if result is None:
                    continue
                sinks.consume(result)
                monitor_bin = result.monitor_bin
                pulses += 1
        finally:
            sinks.close()
    return {
        "pulses": pulses,
        "monitor_bin": monitor_bin,
        "packs": sinks.pack_count,
        "out_dir": str(out_dir),
        "files": ["trace.csv", "spectra.csv", "profiles.bin"],
    }
