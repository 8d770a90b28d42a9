/** Pure view-side geometry: canvas fitting, 3D projection, isophotes, colors. */

export interface FitTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
  flipY: boolean;
}

/** Map model-space 2D points into a canvas rectangle, preserving aspect. */
export function fitTransform(
  points: number[][],
  width: number,
  height: number,
  margin = 24,
  flipY = true,
): FitTransform {
  if (points.length === 0) {
    return { scale: 1, offsetX: width / 2, offsetY: height / 2, flipY };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p[0]);
    maxX = Math.max(maxX, p[0]);
    minY = Math.min(minY, p[1]);
    maxY = Math.max(maxY, p[1]);
  }
  const spanX = Math.max(maxX - minX, 1e-12);
  const spanY = Math.max(maxY - minY, 1e-12);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;
  return {
    scale,
    offsetX: width / 2 - scale * cx,
    offsetY: flipY ? height / 2 + scale * cy : height / 2 - scale * cy,
    flipY,
  };
}

export function applyTransform(t: FitTransform, point: number[]): [number, number] {
  const x = t.scale * point[0] + t.offsetX;
  const y = t.flipY ? t.offsetY - t.scale * point[1] : t.scale * point[1] + t.offsetY;
  return [x, y];
}

/** Orthographic projection after yaw (around z) then pitch (around x). */
export function project3(point: number[], yaw: number, pitch: number): [number, number] {
  const [x, y, z] = point;
  const cy = Math.cos(yaw);
  const sy = Math.sin(yaw);
  const x1 = cy * x + sy * y;
  const y1 = -sy * x + cy * y;
  const cp = Math.cos(pitch);
  const sp = Math.sin(pitch);
  const y2 = cp * y1 + sp * z;
  return [x1, y2];
}

export function rotateVector3(v: number[], yaw: number, pitch: number): [number, number, number] {
  const [x, y, z] = v;
  const cy = Math.cos(yaw);
  const sy = Math.sin(yaw);
  const x1 = cy * x + sy * y;
  const y1 = -sy * x + cy * y;
  const cp = Math.cos(pitch);
  const sp = Math.sin(pitch);
  const y2 = cp * y1 + sp * z;
  const z2 = -sp * y1 + cp * z;
  return [x1, y2, z2];
}

/** Isophote stripe parity from a unit normal and a unit view direction.
 *
 * Stripes are bands of constant angle between the normal and the view
 * axis; adjacent bands alternate. Returns -1 for degenerate normals.
 */
export function isophoteBand(normal: number[], view: number[], bands = 12): number {
  const norm = Math.hypot(normal[0], normal[1], normal[2]);
  if (norm < 1e-12) {
    return -1;
  }
  const dot =
    (normal[0] * view[0] + normal[1] * view[1] + normal[2] * view[2]) / norm;
  const angle = Math.acos(Math.min(1, Math.abs(dot)));
  const band = Math.floor((angle / (Math.PI / 2)) * bands);
  return Math.min(band, bands - 1) % 2;
}

/** Simple dark-blue -> yellow heat ramp; NaN/null render as grey. */
export function heatColor(value: number | null, vmax: number): string {
  if (value === null || Number.isNaN(value)) {
    return 'rgb(96,96,96)';
  }
  const t = vmax > 0 ? Math.min(Math.max(value / vmax, 0), 1) : 0;
  const r = Math.round(40 + 215 * t);
  const g = Math.round(40 + 180 * t);
  const b = Math.round(140 - 100 * t);
  return `rgb(${r},${g},${b})`;
}

/** Robust color-scale ceiling: p-th percentile of the finite values. */
export function percentile(values: Array<number | null>, p: number): number {
  const finite = values.filter((v): v is number => v !== null && Number.isFinite(v)).sort((a, b) => a - b);
  if (finite.length === 0) {
    return 0;
  }
  const pos = Math.min(finite.length - 1, Math.max(0, Math.floor((p / 100) * (finite.length - 1))));
  return finite[pos];
}

/** Polyline for a trace chart in a w x h box (log scale optional). */
export function tracePolyline(
  values: Array<number | null>,
  width: number,
  height: number,
  log = false,
): Array<[number, number]> {
  const pts: Array<[number, number]> = [];
  const finite = values.filter((v): v is number => v !== null && Number.isFinite(v) && (!log || v > 0));
  if (finite.length === 0) {
    return pts;
  }
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (log) {
    lo = Math.log10(lo);
    hi = Math.log10(hi);
  }
  const span = Math.max(hi - lo, 1e-12);
  values.forEach((v, i) => {
    if (v === null || !Number.isFinite(v) || (log && v <= 0)) {
      return;
    }
    const x = values.length > 1 ? (i / (values.length - 1)) * width : width / 2;
    const value = log ? Math.log10(v) : v;
    const y = height - ((value - lo) / span) * height;
    pts.push([x, y]);
  });
  return pts;
}
