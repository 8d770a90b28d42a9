/** Thin typed client over the session HTTP API. */

import type {
  ApiErrorBody,
  AutoselectResponse,
  CombResponse,
  CurvatureGridResponse,
  FairResponse,
  ModelDoc,
  ModelResponse,
  TraceResponse,
} from './types.js';

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = status;
    this.detail = body.detail;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface FairRequest {
  mode: 'run' | 'step';
  kind?: string;
  maxIter?: number;
  tol?: number;
  activeSet?: number[];
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = '', fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, '');
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'content-type': 'application/json' } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const err: ApiErrorBody =
        payload && typeof payload.code === 'string'
          ? payload
          : { code: 'http-error', message: `HTTP ${response.status}` };
      throw new ApiError(response.status, err);
    }
    return payload as T;
  }

  createSession(model: ModelDoc): Promise<{ sessionId: string; kind: string; nPoints: number }> {
    return this.request('POST', '/sessions', { model });
  }

  getModel(sessionId: string): Promise<ModelResponse> {
    return this.request('GET', `/sessions/${sessionId}/model`);
  }

  putWeights(sessionId: string, payload: { weights: number[] } | { rangeSpec: string }): Promise<{ weights: number[] }> {
    return this.request('PUT', `/sessions/${sessionId}/weights`, payload);
  }

  fair(sessionId: string, body: FairRequest): Promise<FairResponse> {
    return this.request('POST', `/sessions/${sessionId}/fair`, body);
  }

  autoselect(sessionId: string, m: number, kind?: string): Promise<AutoselectResponse> {
    return this.request('POST', `/sessions/${sessionId}/autoselect`, kind ? { m, kind } : { m });
  }

  trace(sessionId: string): Promise<TraceResponse> {
    return this.request('GET', `/sessions/${sessionId}/trace`);
  }

  comb(sessionId: string, samples = 256, scale?: number): Promise<CombResponse> {
    const query = scale === undefined ? `samples=${samples}` : `samples=${samples}&scale=${scale}`;
    return this.request('GET', `/sessions/${sessionId}/comb?${query}`);
  }

  curvatureGrid(sessionId: string, nu = 48, nv = 48): Promise<CurvatureGridResponse> {
    return this.request('GET', `/sessions/${sessionId}/curvature-grid?nu=${nu}&nv=${nv}`);
  }

  reset(sessionId: string): Promise<{ sessionId: string; status: string }> {
    return this.request('POST', `/sessions/${sessionId}/reset`);
  }
}
