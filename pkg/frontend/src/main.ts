/** DOM bootstrap: wires the studio to the page controls and canvases. */

import { ApiClient } from './api.js';
import { parseIndexRanges } from './rangeSpec.js';
import {
  clampBrushToBounds,
  extendSelection,
  indicesInBox,
  selectExactly,
  setBrush,
  setNotice,
  setOverlay,
  toggleSelect,
} from './state.js';
import { Studio } from './studio.js';
import { controlPointCanvasPositions, drawCurveScene, drawSurfaceScene, drawTraceChart } from './render.js';
import type { ModelDoc, OverlayMode } from './types.js';

const api = new ApiClient('');
const studio = new Studio(api);

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
};

const sceneCanvas = el<HTMLCanvasElement>('scene');
const traceCanvas = el<HTMLCanvasElement>('trace-chart');
const statusLine = el<HTMLSpanElement>('status-line');
const noticeLine = el<HTMLDivElement>('notice');
const view = { yaw: 0.7, pitch: 0.9 };

let lastPositions: Array<[number, number]> = [];
let dragStart: [number, number] | null = null;

function render(): void {
  const state = studio.getState();
  const ctx = sceneCanvas.getContext('2d');
  if (ctx) {
    lastPositions =
      state.kind === 'surface'
        ? drawSurfaceScene(ctx, state, sceneCanvas.width, sceneCanvas.height, view)
        : drawCurveScene(ctx, state, sceneCanvas.width, sceneCanvas.height);
    if (dragStart === null) {
      // keep the cached hit-test positions in sync with what is on screen
      lastPositions = controlPointCanvasPositions(state, sceneCanvas.width, sceneCanvas.height, view);
    }
  }
  const traceCtx = traceCanvas.getContext('2d');
  if (traceCtx) {
    drawTraceChart(traceCtx, state.trace, traceCanvas.width, traceCanvas.height);
  }
  statusLine.textContent =
    `${state.status}` +
    (state.trace.length > 0 ? ` | k=${state.trace[state.trace.length - 1].k}` : '') +
    (state.selection.length > 0 ? ` | ${state.selection.length} selected` : '');
  noticeLine.textContent = state.notice ?? '';
  for (const id of ['paint', 'step', 'run', 'autoselect', 'adopt', 'reset-btn', 'apply-ranges']) {
    (el<HTMLButtonElement>(id)).disabled = state.busy || state.sessionId === null;
  }
}

studio.subscribe(render);

// ------------------------------------------------------------- model loading

async function loadDoc(doc: ModelDoc): Promise<void> {
  try {
    await studio.loadModel(doc);
  } catch (err) {
    noticeLine.textContent = err instanceof Error ? err.message : String(err);
  }
}

el<HTMLButtonElement>('load-demo-curve').addEventListener('click', async () => {
  const response = await fetch('demo-models/noisy-spiral.json');
  await loadDoc((await response.json()) as ModelDoc);
});

el<HTMLButtonElement>('load-demo-surface').addEventListener('click', async () => {
  const response = await fetch('demo-models/noisy-surface.json');
  await loadDoc((await response.json()) as ModelDoc);
});

el<HTMLInputElement>('model-file').addEventListener('change', async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (file) {
    await loadDoc(JSON.parse(await file.text()) as ModelDoc);
  }
});

// ---------------------------------------------------------------- selection

sceneCanvas.addEventListener('mousedown', (event) => {
  dragStart = [event.offsetX, event.offsetY];
});

sceneCanvas.addEventListener('mouseup', (event) => {
  if (!dragStart) {
    return;
  }
  const [x0, y0] = dragStart;
  dragStart = null;
  const x1 = event.offsetX;
  const y1 = event.offsetY;
  const state = studio.getState();
  if (Math.hypot(x1 - x0, y1 - y0) < 4) {
    // click: toggle the nearest handle within reach
    let best = -1;
    let bestDist = 12;
    lastPositions.forEach(([px, py], i) => {
      const d = Math.hypot(px - x1, py - y1);
      if (d < bestDist) {
        best = i;
        bestDist = d;
      }
    });
    if (best >= 0) {
      studio.update(toggleSelect(state, best));
    }
    return;
  }
  const boxed = indicesInBox(lastPositions, x0, y0, x1, y1);
  studio.update(event.shiftKey ? extendSelection(state, boxed) : selectExactly(state, boxed));
});

el<HTMLButtonElement>('apply-ranges').addEventListener('click', () => {
  const state = studio.getState();
  const text = el<HTMLInputElement>('range-entry').value;
  try {
    studio.update(selectExactly(state, parseIndexRanges(text, state.points.length)));
  } catch (err) {
    studio.update(setNotice(state, err instanceof Error ? err.message : String(err)));
  }
});

el<HTMLButtonElement>('clear-selection').addEventListener('click', () => {
  studio.update(selectExactly(studio.getState(), []));
});

// ------------------------------------------------------------------ actions

el<HTMLInputElement>('brush').addEventListener('change', (event) => {
  const value = Number((event.target as HTMLInputElement).value);
  if (Number.isFinite(value) && value > 0 && value < 1) {
    studio.update(setBrush(studio.getState(), value));
  }
});

el<HTMLButtonElement>('paint').addEventListener('click', async () => {
  const state = studio.getState();
  const { value, clamped } = clampBrushToBounds(state);
  if (clamped) {
    studio.update(setNotice(setBrush(state, value), `brush clamped to ${value.toExponential(2)} (stability bound)`));
  }
  await studio.paintWeights();
});

el<HTMLButtonElement>('step').addEventListener('click', () => void studio.runOrStep('step'));
el<HTMLButtonElement>('run').addEventListener('click', () => {
  const maxIter = Number(el<HTMLInputElement>('max-iter').value) || undefined;
  void studio.runOrStep('run', maxIter);
});

el<HTMLButtonElement>('autoselect').addEventListener('click', () => {
  const m = Number(el<HTMLInputElement>('select-count').value);
  void studio.autoSelectOverlay(m);
});

el<HTMLButtonElement>('adopt').addEventListener('click', () => studio.adoptRanking());
el<HTMLButtonElement>('reset-btn').addEventListener('click', () => void studio.reset());

for (const mode of ['comb', 'heatmap', 'isophote', 'none'] as OverlayMode[]) {
  el<HTMLButtonElement>(`overlay-${mode}`).addEventListener('click', () => {
    studio.update(setOverlay(studio.getState(), mode));
  });
}

el<HTMLInputElement>('yaw').addEventListener('input', (event) => {
  view.yaw = Number((event.target as HTMLInputElement).value);
  render();
});
el<HTMLInputElement>('pitch').addEventListener('input', (event) => {
  view.pitch = Number((event.target as HTMLInputElement).value);
  render();
});

render();
