/** Studio state and its pure transition functions.
 *
 * Geometry is never edited locally: `points`, `weights` and every overlay
 * hold exactly what the server last returned, and the reducers only manage
 * selection, brush settings and view flags around those snapshots.
 */

import type {
  CombResponse,
  CurvatureGridResponse,
  ModelResponse,
  OverlayMode,
  RankEntry,
  TraceRow,
} from './types.js';

export interface StudioState {
  sessionId: string | null;
  kind: 'curve' | 'surface' | null;
  points: number[][];
  pointsShape: number[] | null;
  weights: number[] | null;
  weightBounds: number[] | null;
  status: string;
  selection: number[];          // sorted ascending
  weightBrush: number;
  defaultWeight: number;
  overlay: OverlayMode;
  trace: TraceRow[];
  comb: CombResponse | null;
  grid: CurvatureGridResponse | null;
  ranking: RankEntry[] | null;
  busy: boolean;                // a mutation is in flight; controls disabled
  notice: string | null;
}

export function initialState(): StudioState {
  return {
    sessionId: null,
    kind: null,
    points: [],
    pointsShape: null,
    weights: null,
    weightBounds: null,
    status: 'idle',
    selection: [],
    weightBrush: 1e-6,
    defaultWeight: 1e-6,
    overlay: 'comb',
    trace: [],
    comb: null,
    grid: null,
    ranking: null,
    busy: false,
    notice: null,
  };
}

export function applySession(state: StudioState, sessionId: string, kind: 'curve' | 'surface'): StudioState {
  return {
    ...initialState(),
    sessionId,
    kind,
    overlay: kind === 'surface' ? 'heatmap' : 'comb',
    weightBrush: state.weightBrush,
    defaultWeight: state.defaultWeight,
  };
}

export function applyModel(state: StudioState, body: ModelResponse): StudioState {
  return {
    ...state,
    points: body.model.points,
    pointsShape: body.model.pointsShape ?? null,
    weights: body.model.weights ?? null,
    weightBounds: body.weightBounds,
    status: body.status,
    selection: state.selection.filter((i) => i < body.model.points.length),
  };
}

export function applyTrace(state: StudioState, trace: TraceRow[], status: string): StudioState {
  return { ...state, trace, status };
}

export function applyComb(state: StudioState, comb: CombResponse): StudioState {
  return { ...state, comb };
}

export function applyGrid(state: StudioState, grid: CurvatureGridResponse): StudioState {
  return { ...state, grid };
}

export function setBusy(state: StudioState, busy: boolean): StudioState {
  return { ...state, busy };
}

export function setNotice(state: StudioState, notice: string | null): StudioState {
  return { ...state, notice };
}

export function setOverlay(state: StudioState, overlay: OverlayMode): StudioState {
  return { ...state, overlay };
}

export function setBrush(state: StudioState, value: number): StudioState {
  return { ...state, weightBrush: value };
}

// ---------------------------------------------------------------- selection

export function toggleSelect(state: StudioState, index: number): StudioState {
  if (index < 0 || index >= state.points.length) {
    return state;
  }
  const selection = state.selection.includes(index)
    ? state.selection.filter((i) => i !== index)
    : [...state.selection, index].sort((a, b) => a - b);
  return { ...state, selection };
}

export function selectExactly(state: StudioState, indices: Iterable<number>): StudioState {
  const n = state.points.length;
  const selection = [...new Set(indices)].filter((i) => i >= 0 && i < n).sort((a, b) => a - b);
  return { ...state, selection };
}

export function extendSelection(state: StudioState, indices: Iterable<number>): StudioState {
  return selectExactly(state, [...state.selection, ...indices]);
}

export function clearSelection(state: StudioState): StudioState {
  return { ...state, selection: [] };
}

/** Indices of points whose canvas positions fall inside a drag box. */
export function indicesInBox(
  positions: Array<[number, number]>,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
): number[] {
  const [lox, hix] = x0 <= x1 ? [x0, x1] : [x1, x0];
  const [loy, hiy] = y0 <= y1 ? [y0, y1] : [y1, y0];
  const out: number[] = [];
  positions.forEach(([x, y], i) => {
    if (x >= lox && x <= hix && y >= loy && y <= hiy) {
      out.push(i);
    }
  });
  return out;
}

// ------------------------------------------------------------------ weights

/** Weight array a paint action would submit; null when painting is a no-op.
 *
 * Unpainted points keep their server-acknowledged weight; on the first
 * paint (no weights set yet) they fall back to the default weight.
 */
export function paintedWeights(state: StudioState): number[] | null {
  if (state.selection.length === 0 || state.points.length === 0) {
    return null;
  }
  const base = state.weights ?? new Array(state.points.length).fill(state.defaultWeight);
  const next = [...base];
  for (const i of state.selection) {
    next[i] = state.weightBrush;
  }
  return next;
}

/** Brush clamped into the served bound for every selected point. */
export function clampBrushToBounds(state: StudioState): { value: number; clamped: boolean } {
  let value = state.weightBrush;
  let clamped = false;
  if (state.weightBounds) {
    for (const i of state.selection) {
      const bound = state.weightBounds[i];
      if (bound !== undefined && value >= bound) {
        value = 0.99 * bound;
        clamped = true;
      }
    }
  }
  return { value, clamped };
}

// ------------------------------------------------------------------ ranking

export function applyRanking(state: StudioState, ranking: RankEntry[]): StudioState {
  return { ...state, ranking };
}

export function clearRanking(state: StudioState): StudioState {
  return { ...state, ranking: null };
}

/** Clamp a requested selection count into [0, n]; notes when m was cut. */
export function clampSelectionCount(m: number, n: number): { m: number; notice: string | null } {
  if (!Number.isFinite(m) || m < 0) {
    return { m: 0, notice: null };
  }
  if (m > n) {
    return { m: n, notice: `selection count clamped to the ${n} available points` };
  }
  return { m: Math.floor(m), notice: null };
}

export function adoptRankingAsSelection(state: StudioState): StudioState {
  if (!state.ranking || state.ranking.length === 0) {
    return state;
  }
  return selectExactly(state, state.ranking.map((r) => r.index));
}

/** All ranked impacts zero: selection will not change anything. */
export function rankingAllZero(ranking: RankEntry[]): boolean {
  return ranking.length > 0 && ranking.every((r) => r.z === 0);
}
