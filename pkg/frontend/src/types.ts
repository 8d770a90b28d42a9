/** Wire types mirroring the fairing service's JSON payloads. */

export interface ModelDoc {
  formatVersion: number;
  kind: 'curve' | 'surface';
  degreeU: number;
  degreeV?: number;
  knotsU: number[];
  knotsV?: number[];
  points: number[][];
  pointsShape?: number[];
  weights?: number[];
  metadata?: Record<string, unknown>;
}

export interface ModelResponse {
  model: ModelDoc;
  status: string;
  weightBounds: number[];
  activeSet: number[] | null;
}

export interface TraceRow {
  k: number;
  eDev: number | null;
  eIter: number | null;
  eAbs: number | null;
  eRel: number | null;
}

export interface TraceResponse {
  status: string;
  trace: TraceRow[];
}

export interface FairResponse {
  sessionId: string;
  status: string;
  iterations: number;
  stopReason: string | null;
  warnings: string[];
}

export interface RankEntry {
  index: number;
  z: number;
  rank: number;
  excluded: boolean;
}

export interface AutoselectResponse {
  ranking: RankEntry[];
  m: number;
}

export interface CombResponse {
  parameters: number[];
  points: number[][];
  tips: number[][];
  kappa: number[];
  degenerate: boolean[];
  scale: number;
}

export interface CurvatureGridResponse {
  nu: number;
  nv: number;
  us: number[];
  vs: number[];
  values: (number | null)[][];
  undefined: boolean[][];
  positions: number[][][];
  normals: number[][][];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

export type OverlayMode = 'comb' | 'heatmap' | 'isophote' | 'none';
