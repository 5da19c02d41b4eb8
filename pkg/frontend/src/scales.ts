// Axis conversions. The station's hello carries the authoritative
// range_per_bin_m and wavelength_m; these defaults match its defaults.

export const DEFAULT_RANGE_PER_BIN_M = 299792458 / (2 * 120e6); // 1.2491 m

export function binToMeters(bin: number, rangePerBinM = DEFAULT_RANGE_PER_BIN_M): number {
  return bin * rangePerBinM;
}

// Decimated profiles carry one max per stride-wide group; the group's
// representative lag is its first bin.
export function groupToBin(group: number, stride: number): number {
  return group * stride;
}

// Canvas x coordinate to decimated-group index.
export function clickToGroup(xPx: number, widthPx: number, count: number): number {
  const g = Math.floor((xPx / widthPx) * count);
  return Math.min(Math.max(g, 0), count - 1);
}

export function freqToVelocityMmS(freqHz: number, wavelengthM: number): number {
  return freqHz * (wavelengthM / 2) * 1e3;
}

export function toDb(mag: number, ref: number): number {
  if (mag <= 0 || ref <= 0) return -Infinity;
  return 20 * Math.log10(mag / ref);
}
