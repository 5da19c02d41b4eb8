import { describe, expect, it } from "vitest";
import type { FrameMsg, HelloMsg, SpectrumPayload } from "../src/protocol";
import { initialState, reduce, replay, TRACE_CAPACITY, UiEvent } from "../src/state";

function hello(monitorBin: number | null = 24): HelloMsg {
  return {
    type: "hello",
    v: 1,
    config: { prf_hz: 100, pack_size: 256, profile_stride: 4, waterfall_depth: 64 },
    scene: { targets: [{ range_m: 30.0 }] },
    num_lags: 2688,
    range_per_bin_m: 1.2491352416666667,
    wavelength_m: 0.052092520816,
    monitor_bin: monitorBin,
  };
}

function spectrum(pulse: number, peakBin: number, nFft = 256): SpectrumPayload {
  const bins = nFft / 2 + 1;
  const magnitude = new Array(bins).fill(1e-5);
  magnitude[peakBin] = 2.3e-3;
  return {
    pulse_index: pulse,
    n_fft: nFft,
    resolution_hz: 100 / nFft,
    input_mode: "complex",
    freq_hz: Array.from({ length: bins }, (_, i) => (i * 100) / nFft),
    magnitude,
  };
}

function frame(pulse: number, over: Partial<FrameMsg> = {}): FrameMsg {
  return {
    type: "frame",
    v: 1,
    pulse_index: pulse,
    t_s: pulse / 100,
    bin: 24,
    bin_re: 1200000,
    bin_im: -340000,
    phase_rad: -0.276,
    displacement_m: 1.1e-5,
    axis_mode: "frequency",
    truth: [[30.0, 0.0]],
    spectrum: null,
    ...over,
  };
}

function fold(events: UiEvent[]) {
  let state = initialState();
  const outbound = [];
  for (const ev of events) {
    const r = reduce(state, ev);
    state = r.state;
    outbound.push(...r.outbound);
  }
  return { state, outbound };
}

describe("reducer", () => {
  it("adopts the station geometry from hello", () => {
    const { state } = reduce(initialState(), { kind: "message", msg: hello(24) });
    expect(state.connection).toBe("live");
    expect(state.selectedBin).toBe(24);
    expect(state.packSize).toBe(256);
    expect(state.waterfallCapacity).toBe(64);
  });

  it("extends the trace and drops stale frames", () => {
    let { state } = reduce(initialState(), { kind: "message", msg: hello() });
    state = reduce(state, { kind: "message", msg: frame(10) }).state;
    state = reduce(state, { kind: "message", msg: frame(11) }).state;
    state = reduce(state, { kind: "message", msg: frame(11) }).state;
    state = reduce(state, { kind: "message", msg: frame(9) }).state;
    expect(state.trace.map((p) => p.pulseIndex)).toEqual([10, 11]);
    expect(state.lastFrame?.pulse_index).toBe(11);
  });

  it("resets the trace when the monitored bin changes", () => {
    let { state } = reduce(initialState(), { kind: "message", msg: hello() });
    state = reduce(state, { kind: "message", msg: frame(10) }).state;
    state = reduce(state, { kind: "message", msg: frame(11) }).state;
    state = reduce(state, { kind: "message", msg: frame(12, { bin: 100 }) }).state;
    expect(state.selectedBin).toBe(100);
    expect(state.trace).toHaveLength(1);
    expect(state.trace[0].pulseIndex).toBe(12);
  });

  it("caps the trace length", () => {
    let { state } = reduce(initialState(), { kind: "message", msg: hello() });
    for (let p = 0; p < TRACE_CAPACITY + 50; p++) {
      state = reduce(state, { kind: "message", msg: frame(p) }).state;
    }
    expect(state.trace).toHaveLength(TRACE_CAPACITY);
    expect(state.trace[0].pulseIndex).toBe(50);
  });

  it("collects spectrum-bearing frames into the waterfall", () => {
    let { state } = reduce(initialState(), { kind: "message", msg: hello() });
    state = reduce(state, { kind: "message", msg: frame(255, { spectrum: spectrum(255, 31) }) }).state;
    state = reduce(state, { kind: "message", msg: frame(256) }).state;
    state = reduce(state, { kind: "message", msg: frame(511, { spectrum: spectrum(511, 31) }) }).state;
    expect(state.waterfall.map((r) => r.pulseIndex)).toEqual([255, 511]);
  });

  it("keeps only the newest range profile", () => {
    const newer = { pulseIndex: 20, stride: 4, bins: Uint32Array.from([5, 9]) };
    const older = { pulseIndex: 10, stride: 4, bins: Uint32Array.from([1, 2]) };
    let { state } = reduce(initialState(), { kind: "profile", profile: newer });
    state = reduce(state, { kind: "profile", profile: older }).state;
    expect(state.lastProfile).toBe(newer);
  });

  it("emits a select_bin command with a fresh id per click", () => {
    const first = reduce(initialState(), { kind: "select_bin", bin: 24 });
    expect(first.outbound).toEqual([{ cmd: { op: "select_bin", bin: 24 }, id: 1 }]);
    expect(first.state.requestedBin).toBe(24);
    const second = reduce(first.state, { kind: "select_bin", bin: 100 });
    expect(second.outbound[0].id).toBe(2);
  });

  it("mirrors a pack size change before the station confirms it", () => {
    const r = reduce(initialState(), { kind: "command", cmd: { op: "set_pack_size", n: 512 } });
    expect(r.state.packSize).toBe(512);
    expect(r.outbound).toEqual([{ cmd: { op: "set_pack_size", n: 512 }, id: 1 }]);
  });

  it("tracks streaming through stop/start acks and records errors", () => {
    let { state } = reduce(initialState(), { kind: "message", msg: hello() });
    state = reduce(state, { kind: "message", msg: frame(10) }).state;
    expect(state.streaming).toBe(true);
    state = reduce(state, {
      kind: "message",
      msg: { type: "ack", v: 1, id: 1, op: "stop", applied_at_pulse: 11 },
    }).state;
    expect(state.streaming).toBe(false);
    state = reduce(state, {
      kind: "message",
      msg: { type: "ack", v: 1, id: 2, op: "start", applied_at_pulse: 11 },
    }).state;
    expect(state.streaming).toBe(true);
    state = reduce(state, {
      kind: "message",
      msg: { type: "error", v: 1, id: 3, message: "bin out of range" },
    }).state;
    expect(state.lastError).toBe("bin out of range");
  });

  it("is replay-invariant: the log alone determines the state", () => {
    const events: UiEvent[] = [{ kind: "open" }, { kind: "message", msg: hello() }];
    for (let p = 0; p < 40; p++) {
      const withSpectrum = (p + 1) % 16 === 0;
      const bin = p >= 14 ? 100 : 24; // the click below lands at pulse 14
      events.push({
        kind: "message",
        msg: frame(p, { bin, ...(withSpectrum ? { spectrum: spectrum(p, 31) } : {}) }),
      });
      if (p === 12) events.push({ kind: "select_bin", bin: 100 });
      if (p === 13) {
        events.push({
          kind: "message",
          msg: { type: "ack", v: 1, id: 1, op: "select_bin", applied_at_pulse: 14 },
        });
      }
    }
    events.push({ kind: "profile", profile: { pulseIndex: 39, stride: 4, bins: Uint32Array.from([7]) } });

    const once = fold(events);
    const twice = replay(events);
    expect(twice.state).toEqual(once.state);
    expect(twice.outbound).toEqual(once.outbound);
    // folding must not have touched the original log
    expect(replay(events).state).toEqual(once.state);
  });
});
