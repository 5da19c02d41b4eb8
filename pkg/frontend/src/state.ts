// UI state as a pure function of the event log. reduce() never mutates
// its input, so replaying a captured log reproduces the exact state, and
// anything the user does becomes an outbound command in the return value.

import type { Command, FrameMsg, HelloMsg, ProfileFrame, ServerMessage } from "./protocol";
import { WaterfallBuffer, WaterfallRow } from "./waterfall";

export const TRACE_CAPACITY = 1024;

export interface TracePoint {
  pulseIndex: number;
  displacementM: number;
}

export type UiEvent =
  | { kind: "open" }
  | { kind: "close" }
  | { kind: "message"; msg: ServerMessage }
  | { kind: "profile"; profile: ProfileFrame }
  | { kind: "select_bin"; bin: number }
  | { kind: "command"; cmd: Command }; // start/stop/what-if controls

export interface UiState {
  connection: "connecting" | "live" | "closed";
  streaming: boolean;
  hello: HelloMsg | null;
  selectedBin: number | null; // authoritative: what frames report
  requestedBin: number | null; // optimistic: what the user asked for
  axisMode: "frequency" | "velocity";
  packSize: number;
  lastFrame: FrameMsg | null;
  lastProfile: ProfileFrame | null;
  trace: TracePoint[];
  waterfall: WaterfallRow[];
  waterfallCapacity: number;
  lastError: string | null;
  nextCmdId: number;
}

export function initialState(): UiState {
  return {
    connection: "connecting",
    streaming: false,
    hello: null,
    selectedBin: null,
    requestedBin: null,
    axisMode: "frequency",
    packSize: 256,
    lastFrame: null,
    lastProfile: null,
    trace: [],
    waterfall: [],
    waterfallCapacity: 64,
    lastError: null,
    nextCmdId: 1,
  };
}

export interface Reduced {
  state: UiState;
  outbound: { cmd: Command; id: number }[];
}

function applyFrame(state: UiState, frame: FrameMsg): UiState {
  const prev = state.lastFrame;
  if (prev !== null && frame.pulse_index <= prev.pulse_index) return state; // stale
  let trace = state.trace;
  let selectedBin = state.selectedBin;
  if (frame.bin !== selectedBin) {
    // the station switched bins: old displacements are another target's
    trace = [];
    selectedBin = frame.bin;
  }
  trace = trace.concat([{ pulseIndex: frame.pulse_index, displacementM: frame.displacement_m }]);
  if (trace.length > TRACE_CAPACITY) trace = trace.slice(trace.length - TRACE_CAPACITY);

  let waterfall = state.waterfall;
  if (frame.spectrum !== null) {
    const buf = new WaterfallBuffer(state.waterfallCapacity);
    buf.rows = waterfall.slice();
    buf.push({
      pulseIndex: frame.pulse_index,
      freqHz: frame.spectrum.freq_hz,
      magnitude: frame.spectrum.magnitude,
    });
    waterfall = buf.rows;
  }
  return {
    ...state,
    streaming: true,
    selectedBin,
    axisMode: frame.axis_mode,
    lastFrame: frame,
    trace,
    waterfall,
  };
}

export function reduce(state: UiState, ev: UiEvent): Reduced {
  switch (ev.kind) {
    case "open":
      return { state: { ...state, connection: "live" }, outbound: [] };
    case "close":
      return { state: { ...state, connection: "closed", streaming: false }, outbound: [] };
    case "profile": {
      const prev = state.lastProfile;
      if (prev !== null && ev.profile.pulseIndex <= prev.pulseIndex) {
        return { state, outbound: [] }; // latest wins
      }
      return { state: { ...state, lastProfile: ev.profile }, outbound: [] };
    }
    case "select_bin": {
      const id = state.nextCmdId;
      return {
        state: { ...state, requestedBin: ev.bin, nextCmdId: id + 1 },
        outbound: [{ cmd: { op: "select_bin", bin: ev.bin }, id }],
      };
    }
    case "command": {
      const id = state.nextCmdId;
      // mirror the pack size locally; the server confirms via frame cadence
      const packSize = ev.cmd.op === "set_pack_size" ? ev.cmd.n : state.packSize;
      return {
        state: { ...state, packSize, nextCmdId: id + 1 },
        outbound: [{ cmd: ev.cmd, id }],
      };
    }
    case "message":
      break;
  }

  const msg = ev.msg;
  switch (msg.type) {
    case "hello":
      return {
        state: {
          ...state,
          connection: "live",
          hello: msg,
          selectedBin: msg.monitor_bin,
          packSize: msg.config.pack_size,
          waterfallCapacity: msg.config.waterfall_depth,
        },
        outbound: [],
      };
    case "frame":
      return { state: applyFrame(state, msg), outbound: [] };
    case "ack": {
      let streaming = state.streaming;
      if (msg.op === "stop") streaming = false;
      if (msg.op === "start") streaming = true;
      return { state: { ...state, streaming }, outbound: [] };
    }
    case "error":
      return { state: { ...state, lastError: msg.message }, outbound: [] };
  }
}

// Convenience for tests and log replay: run a whole event log from scratch.
export function replay(events: UiEvent[]): Reduced {
  let state = initialState();
  const outbound: { cmd: Command; id: number }[] = [];
  for (const ev of events) {
    const r = reduce(state, ev);
    state = r.state;
    outbound.push(...r.outbound);
  }
  return { state, outbound };
}
