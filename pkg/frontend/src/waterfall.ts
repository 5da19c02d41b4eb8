// Client-side mirror of the station's spectrum history. Rows are tagged
// by pulse_index so dropped frames can never reorder or duplicate them.

export interface WaterfallRow {
  pulseIndex: number;
  freqHz: number[];
  magnitude: number[];
}

export class WaterfallBuffer {
  readonly capacity: number;
  rows: WaterfallRow[] = [];

  constructor(capacity: number) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
    this.capacity = capacity;
  }

  // Returns true when the row was accepted. Stale or duplicate rows
  // (pulse index not beyond the newest) are dropped.
  push(row: WaterfallRow): boolean {
    const last = this.rows[this.rows.length - 1];
    if (last !== undefined && row.pulseIndex <= last.pulseIndex) return false;
    if (last !== undefined && row.magnitude.length !== last.magnitude.length) {
      // pack size changed upstream: the old history no longer lines up
      this.rows = [];
    }
    this.rows.push(row);
    if (this.rows.length > this.capacity) this.rows.shift();
    return true;
  }

  // Column index of the strongest bin per row, ignoring DC. A steady
  // tone shows up as this being constant down the buffer.
  ridge(): number[] {
    return this.rows.map((row) => {
      let best = 1;
      for (let i = 2; i < row.magnitude.length; i++) {
        if (row.magnitude[i] > row.magnitude[best]) best = i;
      }
      return best;
    });
  }

  // Normalized dB matrix for colormapping, newest row first (rendered at
  // the top). floorDb clips the dynamic range.
  normalizedDb(floorDb = -60): number[][] {
    let peak = 0;
    for (const row of this.rows) for (const m of row.magnitude) peak = Math.max(peak, m);
    if (peak <= 0) return this.rows.map((r) => r.magnitude.map(() => 0));
    const out: number[][] = [];
    for (let i = this.rows.length - 1; i >= 0; i--) {
      out.push(
        this.rows[i].magnitude.map((m) => {
          const db = m > 0 ? 20 * Math.log10(m / peak) : floorDb;
          return Math.min(1, Math.max(0, 1 - db / floorDb));
        }),
      );
    }
    return out;
  }
}
