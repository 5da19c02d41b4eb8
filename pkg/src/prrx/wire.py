"""Console wire protocol.

A WebSocket carries two message kinds:

* JSON text frames for everything stateful: hello, per-pulse frame
  (selected-bin sample + displacement, with the completed pack spectrum
  attached on pack boundaries), command acks, and structured errors.
  Every message carries a schema version tag "v".
* Binary frames for the decimated magnitude profile, which at
  2688 lags x 100 Hz dominates bandwidth. These are droppable under
  backpressure; JSON frames are not.

Binary profile layout (little-endian):

    magic       4 bytes  b"PRF1"
    pulse_index u64
    stride      u32      decimation stride (1 = full profile)
    count       u32      number of bins that follow
    bins        count * u32   max within each stride-wide group

A u32 bin is exact: magnitudes are isqrt of a < 2^64 value, hence < 2^32.
"""

from __future__ import annotations

import json
import struct

import numpy as np

PROTOCOL_VERSION = 1
PROFILE_MAGIC = b"PRF1"
_PROFILE_HEADER = struct.Struct("<4sQII")


class WireError(ValueError):
    pass


# --------------------------------------------------------------------------
# Binary profile frames
# --------------------------------------------------------------------------


def decimate_max(magnitude: np.ndarray, stride: int) -> np.ndarray:
    """Peak-preserving decimation: max over each stride-wide group (the
    last group may be narrower)."""
    if stride < 1:
        raise WireError("stride must be >= 1")
    mag = np.asarray(magnitude, dtype=np.uint64)
    if stride == 1:
        return mag.astype(np.uint32)
    n = len(mag)
    full = (n // stride) * stride
    head = mag[:full].reshape(-1, stride).max(axis=1)
    if full < n:
        head = np.append(head, mag[full:].max())
    return head.astype(np.uint32)


def encode_profile(pulse_index: int, magnitude: np.ndarray, stride: int) -> bytes:
    bins = decimate_max(magnitude, stride)
    return _PROFILE_HEADER.pack(PROFILE_MAGIC, pulse_index, stride, len(bins)) + bins.astype(
        "<u4"
    ).tobytes()


def decode_profile(payload: bytes) -> dict:
    if len(payload) < _PROFILE_HEADER.size:
        raise WireError("short profile frame")
    magic, pulse_index, stride, count = _PROFILE_HEADER.unpack_from(payload)
    if magic != PROFILE_MAGIC:
        raise WireError("bad profile magic")
    body = payload[_PROFILE_HEADER.size:]
    if len(body) != 4 * count:
        raise WireError(f"profile frame length mismatch: {len(body)} != {4 * count}")
    return {
        "pulse_index": pulse_index,
        "stride": stride,
        "bins": np.frombuffer(body, dtype="<u4"),
    }


# --------------------------------------------------------------------------
# JSON messages
# --------------------------------------------------------------------------


def hello_message(config, scene, monitor_bin: int | None) -> dict:
    return {
        "type": "hello",
        "v": PROTOCOL_VERSION,
        "config": config.to_json(),
        "scene": scene.to_json(),
        "num_lags": config.engine.num_lags,
        "range_per_bin_m": config.chirp.range_per_sample_m,
        "wavelength_m": config.chirp.wavelength_m,
        "monitor_bin": monitor_bin,
    }


def spectrum_payload(spectrum, pulse_index: int) -> dict:
    return {
        "pulse_index": pulse_index,
        "n_fft": spectrum.n_fft,
        "resolution_hz": spectrum.resolution_hz,
        "input_mode": spectrum.input_mode,
        "freq_hz": [float(f) for f in spectrum.freq_hz],
        "magnitude": [float(m) for m in spectrum.magnitude],
    }


def frame_message(result, prf_hz: float, axis_mode: str) -> dict:
    """Per-pulse JSON frame from a pipeline PulseResult. The selected-bin
    components stay below 2^43, so the float64 JSON number path carries
    them exactly."""
    return {
        "type": "frame",
        "v": PROTOCOL_VERSION,
        "pulse_index": result.pulse_index,
        "t_s": result.pulse_index / prf_hz,
        "bin": result.monitor_bin,
        "bin_re": float(result.bin_sample.real),
        "bin_im": float(result.bin_sample.imag),
        "phase_rad": result.phase_rad,
        "displacement_m": result.displacement_m,
        "axis_mode": axis_mode,
        "truth": [[tid, dr] for tid, dr in result.truth],
        "spectrum": None
        if result.spectrum is None
        else spectrum_payload(result.spectrum, result.pulse_index),
    }


def ack_message(cmd_id, op: str, applied_at_pulse: int) -> dict:
    return {
        "type": "ack",
        "v": PROTOCOL_VERSION,
        "id": cmd_id,
        "op": op,
        "applied_at_pulse": applied_at_pulse,
    }


def error_message(message: str, cmd_id=None) -> dict:
    return {"type": "error", "v": PROTOCOL_VERSION, "id": cmd_id, "message": message}


def encode_json(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":"))


def parse_control(text: str) -> dict:
    """Client command JSON -> dict with at least an "op" key; the optional
    "id" is echoed back in the ack or error."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise WireError(f"malformed JSON: {e}") from e
    if not isinstance(obj, dict) or "op" not in obj:
        raise WireError('control message must be an object with an "op" key')
    return obj
