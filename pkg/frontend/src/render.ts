/** Canvas rendering. Everything drawn comes verbatim from server snapshots:
 * curve polylines are the comb's on-curve samples, quills are the served
 * (point, tip) pairs, heatmaps/wireframes come from the curvature grid.
 */

import {
  applyTransform,
  fitTransform,
  FitTransform,
  heatColor,
  isophoteBand,
  percentile,
  project3,
  rotateVector3,
  tracePolyline,
} from './geometry.js';
import type { StudioState } from './state.js';
import type { TraceRow } from './types.js';

export interface View3D {
  yaw: number;
  pitch: number;
}

export function controlPointCanvasPositions(
  state: StudioState,
  width: number,
  height: number,
  view: View3D,
): Array<[number, number]> {
  if (state.kind === 'surface') {
    const projected = state.points.map((p) => project3(p, view.yaw, view.pitch));
    const t = fitTransform(projected, width, height);
    return projected.map((p) => applyTransform(t, p));
  }
  const t = curveTransform(state, width, height);
  return state.points.map((p) => applyTransform(t, p));
}

function curveTransform(state: StudioState, width: number, height: number): FitTransform {
  // fit around both the control polygon and the sampled curve
  const cloud = state.comb ? [...state.points, ...state.comb.points, ...state.comb.tips] : state.points;
  return fitTransform(cloud, width, height);
}

export function drawCurveScene(
  ctx: CanvasRenderingContext2D,
  state: StudioState,
  width: number,
  height: number,
): Array<[number, number]> {
  ctx.clearRect(0, 0, width, height);
  const t = curveTransform(state, width, height);

  if (state.comb) {
    if (state.overlay === 'comb') {
      ctx.strokeStyle = '#2e9e4f';
      ctx.lineWidth = 1;
      ctx.beginPath();
      state.comb.points.forEach((p, i) => {
        if (state.comb!.degenerate[i]) {
          return;
        }
        const a = applyTransform(t, p);
        const b = applyTransform(t, state.comb!.tips[i]);
        ctx.moveTo(a[0], a[1]);
        ctx.lineTo(b[0], b[1]);
      });
      ctx.stroke();
    }
    ctx.strokeStyle = '#111111';
    ctx.lineWidth = 1.8;
    ctx.beginPath();
    state.comb.points.forEach((p, i) => {
      const c = applyTransform(t, p);
      if (i === 0) {
        ctx.moveTo(c[0], c[1]);
      } else {
        ctx.lineTo(c[0], c[1]);
      }
    });
    ctx.stroke();
  }

  // control polygon
  ctx.strokeStyle = 'rgba(70,110,200,0.55)';
  ctx.lineWidth = 1;
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  state.points.forEach((p, i) => {
    const c = applyTransform(t, p);
    if (i === 0) {
      ctx.moveTo(c[0], c[1]);
    } else {
      ctx.lineTo(c[0], c[1]);
    }
  });
  ctx.stroke();
  ctx.setLineDash([]);

  const positions = state.points.map((p) => applyTransform(t, p));
  drawHandles(ctx, state, positions);
  return positions;
}

export function drawSurfaceScene(
  ctx: CanvasRenderingContext2D,
  state: StudioState,
  width: number,
  height: number,
  view: View3D,
): Array<[number, number]> {
  ctx.clearRect(0, 0, width, height);
  const grid = state.grid;
  const half = Math.floor(width / 2);

  if (grid) {
    // left: parameter-space heatmap or isophote stripes
    const cellW = (half - 16) / grid.nu;
    const cellH = (height - 16) / grid.nv;
    const flat = grid.values.flat();
    const vmax = percentile(flat, 98);
    const viewAxis = rotateVector3([0, 0, 1], -view.yaw, -view.pitch);
    for (let i = 0; i < grid.nu; i++) {
      for (let j = 0; j < grid.nv; j++) {
        if (state.overlay === 'isophote') {
          const band = isophoteBand(grid.normals[i][j], viewAxis);
          ctx.fillStyle = band < 0 ? 'rgb(96,96,96)' : band === 0 ? '#18191c' : '#e8e6df';
        } else {
          ctx.fillStyle = heatColor(grid.values[i][j], vmax);
        }
        ctx.fillRect(8 + i * cellW, 8 + (grid.nv - 1 - j) * cellH, cellW + 0.5, cellH + 0.5);
      }
    }

    // right: projected wireframe of the sampled surface
    const projectedGrid = grid.positions.map((row) => row.map((p) => project3(p, view.yaw, view.pitch)));
    const t = fitTransform(projectedGrid.flat(), half, height);
    ctx.strokeStyle = 'rgba(30,30,30,0.7)';
    ctx.lineWidth = 0.7;
    ctx.beginPath();
    const step = Math.max(1, Math.floor(grid.nu / 24));
    for (let i = 0; i < grid.nu; i += step) {
      projectedGrid[i].forEach((p, j) => {
        const c = applyTransform(t, p);
        if (j === 0) {
          ctx.moveTo(half + c[0], c[1]);
        } else {
          ctx.lineTo(half + c[0], c[1]);
        }
      });
    }
    for (let j = 0; j < grid.nv; j += step) {
      for (let i = 0; i < grid.nu; i++) {
        const c = applyTransform(t, projectedGrid[i][j]);
        if (i === 0) {
          ctx.moveTo(half + c[0], c[1]);
        } else {
          ctx.lineTo(half + c[0], c[1]);
        }
      }
    }
    ctx.stroke();
  }

  // control net handles over the wireframe half
  const projected = state.points.map((p) => project3(p, view.yaw, view.pitch));
  const t = fitTransform(projected, half, height);
  const positions = projected.map((p) => {
    const c = applyTransform(t, p);
    return [half + c[0], c[1]] as [number, number];
  });
  drawHandles(ctx, state, positions);
  return positions;
}

function drawHandles(
  ctx: CanvasRenderingContext2D,
  state: StudioState,
  positions: Array<[number, number]>,
): void {
  const selected = new Set(state.selection);
  const rankByIndex = new Map<number, number>();
  if (state.ranking) {
    for (const r of state.ranking) {
      rankByIndex.set(r.index, r.rank);
    }
  }
  ctx.font = '10px system-ui, sans-serif';
  positions.forEach(([x, y], i) => {
    ctx.beginPath();
    ctx.arc(x, y, selected.has(i) ? 5 : 3.5, 0, 2 * Math.PI);
    ctx.fillStyle = selected.has(i) ? '#e0552b' : '#4a6fc4';
    ctx.fill();
    if (rankByIndex.has(i)) {
      ctx.strokeStyle = '#cc2222';
      ctx.lineWidth = 1.5;
      ctx.strokeRect(x - 8, y - 8, 16, 16);
      ctx.fillStyle = '#cc2222';
      ctx.fillText(`#${rankByIndex.get(i)}`, x + 9, y - 9);
    }
    // weight badge
    if (state.weights) {
      ctx.fillStyle = '#333333';
      ctx.fillText(formatWeight(state.weights[i]), x + 6, y + 11);
    }
  });
}

export function formatWeight(w: number | undefined): string {
  if (w === undefined) {
    return '';
  }
  return w.toExponential(1).replace('e-', 'e-').replace('.0e', 'e');
}

export function drawTraceChart(
  ctx: CanvasRenderingContext2D,
  trace: TraceRow[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = '#999999';
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  if (trace.length === 0) {
    ctx.fillStyle = '#777777';
    ctx.font = '12px system-ui, sans-serif';
    ctx.fillText('no iterations yet', 12, height / 2);
    return;
  }
  const series: Array<{ values: Array<number | null>; color: string; label: string; log: boolean }> = [
    { values: trace.map((r) => r.eRel), color: '#2e9e4f', label: 'relative energy', log: false },
    { values: trace.map((r) => r.eDev), color: '#4a6fc4', label: 'deviation RMSE', log: false },
  ];
  const inset = 6;
  series.forEach(({ values, color }) => {
    const pts = tracePolyline(values, width - 2 * inset, height - 2 * inset, false);
    if (pts.length === 0) {
      return;
    }
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    pts.forEach(([x, y], i) => {
      if (i === 0) {
        ctx.moveTo(inset + x, inset + y);
      } else {
        ctx.lineTo(inset + x, inset + y);
      }
    });
    ctx.stroke();
  });
  ctx.font = '11px system-ui, sans-serif';
  ctx.fillStyle = '#2e9e4f';
  ctx.fillText('relative energy', 10, 14);
  ctx.fillStyle = '#4a6fc4';
  ctx.fillText('deviation RMSE', 10, 28);
}
