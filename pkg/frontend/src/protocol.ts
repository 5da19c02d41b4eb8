// Wire protocol between the station and this console. Field names are
// snake_case to match the JSON on the wire exactly.

export const PROTOCOL_VERSION = 1;
const PROFILE_MAGIC = "PRF1";
const PROFILE_HEADER_BYTES = 20; // 4s magic + u64 pulse + u32 stride + u32 count

export class WireError extends Error {}

export interface SpectrumPayload {
  pulse_index: number;
  n_fft: number;
  resolution_hz: number;
  input_mode: string;
  freq_hz: number[];
  magnitude: number[];
}

export interface HelloMsg {
  type: "hello";
  v: number;
  config: {
    prf_hz: number;
    pack_size: number;
    profile_stride: number;
    waterfall_depth: number;
    [key: string]: unknown;
  };
  scene: unknown;
  num_lags: number;
  range_per_bin_m: number;
  wavelength_m: number;
  monitor_bin: number | null;
}

export interface FrameMsg {
  type: "frame";
  v: number;
  pulse_index: number;
  t_s: number;
  bin: number;
  bin_re: number;
  bin_im: number;
  phase_rad: number;
  displacement_m: number;
  axis_mode: "frequency" | "velocity";
  truth: [number, number][];
  spectrum: SpectrumPayload | null;
  wall_ms?: number;
}

export interface AckMsg {
  type: "ack";
  v: number;
  id: number | string | null;
  op: string;
  applied_at_pulse: number;
}

export interface ErrorMsg {
  type: "error";
  v: number;
  id: number | string | null;
  message: string;
}

export type ServerMessage = HelloMsg | FrameMsg | AckMsg | ErrorMsg;

export type Command =
  | { op: "start" }
  | { op: "stop" }
  | { op: "select_bin"; bin: number }
  | { op: "set_pack_size"; n: number }
  | { op: "set_motion"; target: number; motion: Record<string, unknown> }
  | { op: "set_snr"; snr_db: number | null }
  | { op: "set_axis_mode"; mode: "frequency" | "velocity" };

export function parseServerMessage(text: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (e) {
    throw new WireError(`malformed JSON from server: ${e}`);
  }
  if (typeof obj !== "object" || obj === null || !("type" in obj)) {
    throw new WireError("server message has no type");
  }
  const msg = obj as ServerMessage;
  if (!["hello", "frame", "ack", "error"].includes(msg.type)) {
    throw new WireError(`unknown message type ${String(msg.type)}`);
  }
  return msg;
}

export function encodeCommand(cmd: Command, id: number): string {
  return JSON.stringify({ ...cmd, id });
}

export interface ProfileFrame {
  pulseIndex: number;
  stride: number;
  bins: Uint32Array;
}

// Binary layout (little-endian): "PRF1", u64 pulse_index, u32 stride,
// u32 count, count*u32 max-decimated magnitudes.
export function decodeProfile(buf: ArrayBuffer): ProfileFrame {
  if (buf.byteLength < PROFILE_HEADER_BYTES) {
    throw new WireError(`short profile frame: ${buf.byteLength} bytes`);
  }
  const view = new DataView(buf);
  const magic = String.fromCharCode(
    view.getUint8(0), view.getUint8(1), view.getUint8(2), view.getUint8(3),
  );
  if (magic !== PROFILE_MAGIC) {
    throw new WireError(`bad profile magic ${JSON.stringify(magic)}`);
  }
  const pulseIndex = Number(view.getBigUint64(4, true));
  const stride = view.getUint32(12, true);
  const count = view.getUint32(16, true);
  if (buf.byteLength !== PROFILE_HEADER_BYTES + 4 * count) {
    throw new WireError(
      `profile length mismatch: ${buf.byteLength - PROFILE_HEADER_BYTES} != ${4 * count}`,
    );
  }
  const bins = new Uint32Array(count);
  for (let i = 0; i < count; i++) {
    bins[i] = view.getUint32(PROFILE_HEADER_BYTES + 4 * i, true);
  }
  return { pulseIndex, stride, bins };
}
