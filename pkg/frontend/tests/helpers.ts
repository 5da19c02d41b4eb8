// Builders for synthetic wire traffic used across the test files.

export function buildProfile(pulseIndex: bigint, stride: number, bins: number[]): ArrayBuffer {
  const buf = new ArrayBuffer(20 + 4 * bins.length);
  const view = new DataView(buf);
  [0x50, 0x52, 0x46, 0x31].forEach((b, i) => view.setUint8(i, b)); // "PRF1"
  view.setBigUint64(4, pulseIndex, true);
  view.setUint32(12, stride, true);
  view.setUint32(16, bins.length, true);
  bins.forEach((b, i) => view.setUint32(20 + 4 * i, b, true));
  return buf;
}
