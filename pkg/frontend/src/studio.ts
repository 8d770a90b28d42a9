/** Orchestration: server calls + state transitions behind the UI events.
 *
 * Every mutation path is guarded by the busy flag (one in-flight mutation
 * per session, mirroring the server's per-session lock) and ends by pulling
 * fresh snapshots, so the display always equals the last server response.
 */

import { ApiClient, ApiError } from './api.js';
import {
  StudioState,
  adoptRankingAsSelection,
  applyComb,
  applyGrid,
  applyModel,
  applyRanking,
  applySession,
  applyTrace,
  clampSelectionCount,
  clearRanking,
  initialState,
  paintedWeights,
  rankingAllZero,
  setBusy,
  setNotice,
} from './state.js';
import type { ModelDoc } from './types.js';

export type Listener = (state: StudioState) => void;

export class Studio {
  private state: StudioState = initialState();
  private readonly listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  getState(): StudioState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  update(next: StudioState): void {
    this.state = next;
    for (const listener of this.listeners) {
      listener(next);
    }
  }

  /** Create a session for a model document and pull the first snapshots. */
  async loadModel(doc: ModelDoc): Promise<void> {
    const created = await this.api.createSession(doc);
    this.update(applySession(this.state, created.sessionId, doc.kind));
    await this.refreshAll();
  }

  async refreshAll(): Promise<void> {
    const sid = this.state.sessionId;
    if (!sid) {
      return;
    }
    const model = await this.api.getModel(sid);
    let next = applyModel(this.state, model);
    const traceBody = await this.api.trace(sid);
    next = applyTrace(next, traceBody.trace, traceBody.status);
    if (this.state.kind === 'curve') {
      next = applyComb(next, await this.api.comb(sid));
    } else {
      next = applyGrid(next, await this.api.curvatureGrid(sid));
    }
    this.update(next);
  }

  /** PUT the painted weights; with an empty selection nothing is sent. */
  async paintWeights(): Promise<boolean> {
    if (this.state.busy) {
      return false;
    }
    const weights = paintedWeights(this.state);
    if (weights === null) {
      return false;
    }
    const sid = this.state.sessionId;
    if (!sid) {
      return false;
    }
    this.update(setBusy(this.state, true));
    try {
      await this.api.putWeights(sid, { weights });
      const model = await this.api.getModel(sid);
      this.update(setNotice(applyModel(this.state, model), null));
      return true;
    } catch (err) {
      this.surface(err);
      return false;
    } finally {
      this.update(setBusy(this.state, false));
    }
  }

  /** Paint via a raw range-spec string (the text-entry path). */
  async paintRangeSpec(spec: string): Promise<boolean> {
    if (this.state.busy || !this.state.sessionId) {
      return false;
    }
    this.update(setBusy(this.state, true));
    try {
      await this.api.putWeights(this.state.sessionId, { rangeSpec: spec });
      const model = await this.api.getModel(this.state.sessionId);
      this.update(setNotice(applyModel(this.state, model), null));
      return true;
    } catch (err) {
      this.surface(err);
      return false;
    } finally {
      this.update(setBusy(this.state, false));
    }
  }

  /** One iteration ("step") or run-to-stop ("run"), then refresh. */
  async runOrStep(mode: 'run' | 'step', maxIter?: number, tol?: number): Promise<boolean> {
    if (this.state.busy || !this.state.sessionId) {
      return false;
    }
    this.update(setBusy(this.state, true));
    try {
      const body = await this.api.fair(this.state.sessionId, { mode, maxIter, tol });
      const notice =
        body.warnings.length > 0 ? `${body.warnings.length} weight(s) clamped to the bound` : null;
      await this.refreshAll();
      this.update(setNotice(this.state, notice));
      return true;
    } catch (err) {
      this.surface(err);
      return false;
    } finally {
      this.update(setBusy(this.state, false));
    }
  }

  /** Fetch the top-m impact ranking and highlight it; m = 0 clears. */
  async autoSelectOverlay(m: number): Promise<boolean> {
    if (this.state.busy || !this.state.sessionId) {
      return false;
    }
    const { m: clamped, notice } = clampSelectionCount(m, this.state.points.length);
    if (clamped === 0) {
      this.update(setNotice(clearRanking(this.state), notice));
      return false;   // nothing highlighted, no request sent
    }
    this.update(setBusy(this.state, true));
    try {
      const body = await this.api.autoselect(this.state.sessionId, clamped);
      let next = applyRanking(this.state, body.ranking);
      let message = notice;
      if (rankingAllZero(body.ranking)) {
        message = 'all impacts are zero: the geometry is already at its energy minimum';
      }
      this.update(setNotice(next, message));
      return true;
    } catch (err) {
      this.surface(err);
      return false;
    } finally {
      this.update(setBusy(this.state, false));
    }
  }

  adoptRanking(): void {
    this.update(adoptRankingAsSelection(this.state));
  }

  async reset(): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    await this.api.reset(this.state.sessionId);
    this.update(clearRanking(this.state));
    await this.refreshAll();
  }

  private surface(err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : err instanceof Error ? err.message : String(err);
    this.update(setNotice(this.state, message));
  }
}
