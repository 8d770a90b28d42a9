/** Round trip against recorded real-backend scripts.
 *
 * The fixtures were captured from the live service plus an independent CLI
 * run with the same range spec; these tests replay them through the studio
 * and assert the displayed state equals the served numbers exactly, the
 * step x5 path matches run(maxIter=5), and the guard rails hold.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { Studio } from '../src/studio.js';
import { ScriptedFetch, type ScriptEntry } from './mockServer.js';
import type { ModelDoc, TraceRow } from '../src/types.js';

interface Fixtures {
  rangeSpec: string;
  maxIter: number;
  model: ModelDoc;
  runScript: ScriptEntry[];
  stepScript: ScriptEntry[];
  cliPoints: number[][];
}

const here = dirname(fileURLToPath(import.meta.url));
const fixtures: Fixtures = JSON.parse(readFileSync(join(here, 'fixtures', 'roundtrip.json'), 'utf-8'));

function studioWith(script: ScriptEntry[]): { studio: Studio; fetch: ScriptedFetch } {
  const scripted = new ScriptedFetch(script);
  return { studio: new Studio(new ApiClient('', scripted.fetch)), fetch: scripted };
}

describe('studio round trip (recorded backend)', () => {
  it('run(maxIter=5) displays exactly the CLI result for the same range spec', async () => {
    const { studio, fetch } = studioWith(fixtures.runScript);
    await studio.loadModel(fixtures.model);
    expect(studio.getState().points).toEqual(fixtures.model.points);

    await studio.paintRangeSpec(fixtures.rangeSpec);
    await studio.runOrStep('run', fixtures.maxIter, 0);
    expect(fetch.remaining).toBe(0);

    // full served precision, and byte-for-byte what the CLI wrote
    expect(studio.getState().points).toEqual(fixtures.cliPoints);
    expect(studio.getState().trace.length).toBe(fixtures.maxIter + 1);
  });

  it('step x5 produces the same geometry and trace as run(maxIter=5)', async () => {
    const run = studioWith(fixtures.runScript);
    await run.studio.loadModel(fixtures.model);
    await run.studio.paintRangeSpec(fixtures.rangeSpec);
    await run.studio.runOrStep('run', fixtures.maxIter, 0);

    const step = studioWith(fixtures.stepScript);
    await step.studio.loadModel(fixtures.model);
    await step.studio.paintRangeSpec(fixtures.rangeSpec);
    for (let i = 0; i < fixtures.maxIter; i++) {
      await step.studio.runOrStep('step');
    }
    expect(step.fetch.remaining).toBe(0);

    expect(step.studio.getState().points).toEqual(run.studio.getState().points);
    expect(step.studio.getState().trace).toEqual(run.studio.getState().trace);
  });

  it('weight badges round-trip the served values unchanged', async () => {
    const { studio } = studioWith(fixtures.runScript);
    await studio.loadModel(fixtures.model);
    await studio.paintRangeSpec(fixtures.rangeSpec);
    const putAck = fixtures.runScript[4].response as { weights: number[] };
    expect(studio.getState().weights).toEqual(putAck.weights);
  });

  it('the comb overlay data is exactly the served (point, tip) pairs', async () => {
    const { studio } = studioWith(fixtures.runScript);
    await studio.loadModel(fixtures.model);
    const served = fixtures.runScript[3].response as { points: number[][]; tips: number[][] };
    expect(studio.getState().comb?.points).toEqual(served.points);
    expect(studio.getState().comb?.tips).toEqual(served.tips);
  });
});

describe('studio guard rails', () => {
  let studio: Studio;
  let fetch: ScriptedFetch;

  beforeEach(async () => {
    const load = fixtures.runScript.slice(0, 4);
    ({ studio, fetch } = studioWith(load));
    await studio.loadModel(fixtures.model);
  });

  it('painting with an empty selection sends no request', async () => {
    const before = fetch.requestsMade;
    const sent = await studio.paintWeights();
    expect(sent).toBe(false);
    expect(fetch.requestsMade).toBe(before);
  });

  it('mutations are rejected while one is in flight', async () => {
    studio.update({ ...studio.getState(), busy: true });
    expect(await studio.runOrStep('step')).toBe(false);
    expect(await studio.paintRangeSpec('default:1e-6')).toBe(false);
    expect(await studio.autoSelectOverlay(3)).toBe(false);
  });

  it('m = 0 highlights nothing and sends no request', async () => {
    const before = fetch.requestsMade;
    const sent = await studio.autoSelectOverlay(0);
    expect(sent).toBe(false);
    expect(fetch.requestsMade).toBe(before);
    expect(studio.getState().ranking).toBeNull();
  });

  it('all-zero rankings surface the discouragement notice', async () => {
    const zeroRanking = {
      ranking: [
        { index: 0, z: 0, rank: 1, excluded: false },
        { index: 1, z: 0, rank: 2, excluded: false },
      ],
      m: 2,
    };
    const extra = new ScriptedFetch([
      ...fixtures.runScript.slice(0, 4),
      { method: 'POST', path: `/sessions/${sid(fixtures.runScript)}/autoselect`, body: { m: 2 }, response: zeroRanking },
    ]);
    const s = new Studio(new ApiClient('', extra.fetch));
    await s.loadModel(fixtures.model);
    await s.autoSelectOverlay(2);
    expect(s.getState().notice).toMatch(/already at its energy minimum/);
    expect(s.getState().ranking).toEqual(zeroRanking.ranking);
  });

  it('server rejections surface inline instead of throwing', async () => {
    const failing = new ScriptedFetch(fixtures.runScript.slice(0, 4));
    const s = new Studio(new ApiClient('', async (input, init) => {
      if ((init?.method ?? 'GET') === 'PUT') {
        return new Response(
          JSON.stringify({ code: 'invalid-weight', message: 'weights must lie strictly in (0, 1)', detail: null }),
          { status: 400, headers: { 'content-type': 'application/json' } },
        );
      }
      return failing.fetch(input, init);
    }));
    await s.loadModel(fixtures.model);
    const ok = await s.paintRangeSpec('default:2.0');
    expect(ok).toBe(false);
    expect(s.getState().notice).toMatch(/invalid-weight/);
    expect(s.getState().busy).toBe(false);
  });
});

function sid(script: ScriptEntry[]): string {
  return (script[0].response as { sessionId: string }).sessionId;
}

describe('trace shape from the recorded run', () => {
  it('records k = 0..maxIter with eRel defined after the baseline row', () => {
    const traceEntry = fixtures.runScript[fixtures.runScript.length - 2];
    const rows = (traceEntry.response as { trace: TraceRow[] }).trace;
    expect(rows.map((r) => r.k)).toEqual(Array.from({ length: fixtures.maxIter + 1 }, (_, i) => i));
    expect(rows[0].eRel).toBe(1);
    expect(rows[1].eIter).toBe(1);
    for (const row of rows.slice(1)) {
      expect(row.eRel).not.toBeNull();
      expect(row.eRel!).toBeLessThanOrEqual(1);
    }
  });
});
