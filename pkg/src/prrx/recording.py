"""Raw capture recording: a self-describing binary file of quantized
pulse pairs plus ground truth, for offline replay.

Layout (little-endian throughout):

    magic   4 bytes  b"PRRX"
    version u32      currently 1
    hlen    u32      byte length of the JSON header
    header  hlen     UTF-8 JSON: {"config": ..., "scene": ...}
    then per pulse:
    pulse_index u64
    n_targets   u32
    truth       n_targets * f64   per-target range offset in metres
    rx1         taps * 2 * i16    I/Q interleaved
    rx2         window_len * 2 * i16
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .config import SystemConfig
from .scene import Scene, PulsePair
from .waveform import IqBuffer

MAGIC = b"PRRX"
VERSION = 1


class RecordingError(ValueError):
    pass


def _interleave(buf: IqBuffer) -> np.ndarray:
    out = np.empty(2 * len(buf), dtype="<i2")
    out[0::2] = buf.i
    out[1::2] = buf.q
    return out


def _deinterleave(raw: np.ndarray) -> IqBuffer:
    return IqBuffer(i=raw[0::2].astype(np.int16), q=raw[1::2].astype(np.int16))


class RecordingWriter:
    def __init__(self, path, config: SystemConfig, scene: Scene):
        header = json.dumps(
            {"config": config.to_json(), "scene": scene.to_json()}, sort_keys=True
        ).encode()
        self._f = open(path, "wb")
        self._f.write(MAGIC)
        self._f.write(struct.pack("<II", VERSION, len(header)))
        self._f.write(header)
        self._taps = config.engine.taps
        self._window = config.engine.window_len
        self.pulses_written = 0

    def write(self, pair: PulsePair) -> None:
        if len(pair.rx1) != self._taps or len(pair.rx2) != self._window:
            raise RecordingError("pulse pair does not match recorded geometry")
        truth = [dr for _, dr in pair.truth]
        self._f.write(struct.pack("<QI", pair.pulse_index, len(truth)))
        if truth:
            self._f.write(np.asarray(truth, dtype="<f8").tobytes())
        self._f.write(_interleave(pair.rx1).tobytes())
        self._f.write(_interleave(pair.rx2).tobytes())
        self.pulses_written += 1

    def close(self) -> None:
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class RecordingReader:
    def __init__(self, path):
        self._f = open(path, "rb")
        if self._f.read(4) != MAGIC:
            raise RecordingError("bad magic; not a capture file")
        version, hlen = struct.unpack("<II", self._f.read(8))
        if version != VERSION:
            raise RecordingError(f"unsupported version {version}")
        header = json.loads(self._f.read(hlen).decode())
        self.config = SystemConfig.from_json(header["config"])
        self.scene = Scene.from_json(header["scene"])
        self._taps = self.config.engine.taps
        self._window = self.config.engine.window_len

    def __iter__(self):
        return self

    def __next__(self) -> PulsePair:
        head = self._f.read(12)
        if not head:
            raise StopIteration
        if len(head) != 12:
            raise RecordingError("truncated pulse header")
        pulse_index, n_targets = struct.unpack("<QI", head)
        truth_raw = np.frombuffer(self._f.read(8 * n_targets), dtype="<f8")
        if len(truth_raw) != n_targets:
            raise RecordingError("truncated truth block")
        rx1_raw = np.frombuffer(self._f.read(4 * self._taps), dtype="<i2")
        rx2_raw = np.frombuffer(self._f.read(4 * self._window), dtype="<i2")
        if len(rx1_raw) != 2 * self._taps or len(rx2_raw) != 2 * self._window:
            raise RecordingError("truncated sample block")
        return PulsePair(
            rx1=_deinterleave(rx1_raw),
            rx2=_deinterleave(rx2_raw),
            pulse_index=pulse_index,
            truth=tuple((tid, float(dr)) for tid, dr in enumerate(truth_raw)),
        )

    def close(self) -> None:
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
