/** Preference normalization and the bijections between control positions
 * (slider for m=2, barycentric triangle for m=3) and the preference domain. */

import type { PreferenceMode } from "./types.js";

/** Project a raw nonnegative vector onto the simplex or the unit sphere's
 * nonnegative orthant. Mirrors the server's normalization exactly so the
 * control can display the normalized value without a round trip. */
export function normalizePreference(raw: number[], mode: PreferenceMode): number[] {
  if (raw.length === 0) throw new Error("empty preference");
  if (raw.some((v) => !Number.isFinite(v) || v < 0)) {
    throw new Error("preference entries must be finite and nonnegative");
  }
  const total =
    mode === "simplex"
      ? raw.reduce((a, b) => a + b, 0)
      : Math.hypot(...raw);
  if (total <= 0) throw new Error("preference must have a positive entry");
  return raw.map((v) => v / total);
}

/** Slider position t in [0,1] -> 2-task preference. t=0 is the task-1
 * extreme, t=1 the task-2 extreme; uniform in weight (simplex) or in angle
 * (sphere), matching the server's sweep grid parameterization. */
export function sliderToPreference(t: number, mode: PreferenceMode): number[] {
  if (!(t >= 0 && t <= 1)) throw new Error(`slider position ${t} out of [0,1]`);
  if (mode === "simplex") return [1 - t, t];
  const a = (t * Math.PI) / 2;
  return normalizePreference([Math.max(Math.cos(a), 0), Math.max(Math.sin(a), 0)], "sphere");
}

/** Inverse of sliderToPreference (bijectivity of the control mapping). */
export function preferenceToSlider(p: number[], mode: PreferenceMode): number {
  if (p.length !== 2) throw new Error("slider mapping is for 2 tasks");
  if (mode === "simplex") {
    const n = normalizePreference(p, "simplex");
    return n[1];
  }
  const n = normalizePreference(p, "sphere");
  return (Math.atan2(n[1], n[0]) * 2) / Math.PI;
}

/** Barycentric triangle position -> 3-task preference. The coordinates are
 * the barycentric weights themselves (each in [0,1], summing to 1). */
export function triangleToPreference(bary: [number, number, number], mode: PreferenceMode): number[] {
  const sum = bary[0] + bary[1] + bary[2];
  if (bary.some((v) => v < -1e-12) || Math.abs(sum - 1) > 1e-9) {
    throw new Error("triangle position must be barycentric (nonnegative, sum 1)");
  }
  const clipped = bary.map((v) => Math.max(v, 0));
  return normalizePreference(clipped, mode);
}

/** Inverse of triangleToPreference: any normalized 3-task preference maps
 * back to unique barycentric weights (simplex renormalization). */
export function preferenceToTriangle(p: number[]): [number, number, number] {
  if (p.length !== 3) throw new Error("triangle mapping is for 3 tasks");
  const n = normalizePreference(p, "simplex");
  return [n[0], n[1], n[2]];
}

/** Cartesian picker coordinates (unit equilateral triangle with corners
 * (0,0), (1,0), (0.5, sqrt(3)/2)) -> barycentric weights, clamped to the
 * triangle so drags past an edge stick to it. */
export function xyToBarycentric(x: number, y: number): [number, number, number] {
  const h = Math.sqrt(3) / 2;
  let b2 = y / h;
  let b1 = x - b2 / 2;
  let b0 = 1 - b1 - b2;
  b0 = Math.max(b0, 0);
  b1 = Math.max(b1, 0);
  b2 = Math.max(b2, 0);
  const s = b0 + b1 + b2;
  return [b0 / s, b1 / s, b2 / s];
}
