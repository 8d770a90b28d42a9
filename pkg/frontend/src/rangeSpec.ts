/** Index-range text entry, mirroring the CLI's range-spec grammar.
 *
 * Selections are comma-separated 1-based inclusive ranges ("3,7-9,12");
 * weight specs additionally carry values ("7-9:1e-5,default:1e-6") with
 * later entries winning on overlap.
 */

export function parseIndexRanges(text: string, n: number): number[] {
  const out = new Set<number>();
  const trimmed = text.trim();
  if (!trimmed) {
    return [];
  }
  for (const chunk of trimmed.split(',')) {
    const part = chunk.trim();
    if (!part) {
      continue;
    }
    let lo: number;
    let hi: number;
    if (part.includes('-')) {
      const [loText, hiText] = part.split('-', 2);
      lo = parseIndex(loText, part);
      hi = parseIndex(hiText, part);
    } else {
      lo = hi = parseIndex(part, part);
    }
    if (!(lo >= 1 && lo <= hi && hi <= n)) {
      throw new Error(`range '${part}' out of bounds for ${n} points (1-based, inclusive)`);
    }
    for (let i = lo; i <= hi; i++) {
      out.add(i - 1);
    }
  }
  return [...out].sort((a, b) => a - b);
}

function parseIndex(text: string, context: string): number {
  const value = Number(text.trim());
  if (!Number.isInteger(value)) {
    throw new Error(`bad index '${text.trim()}' in '${context}'`);
  }
  return value;
}

export function parseWeightSpec(text: string, n: number, base?: number[]): number[] {
  const trimmed = text.trim();
  if (!trimmed) {
    throw new Error('empty weight spec');
  }
  const weights: (number | undefined)[] = base ? [...base] : new Array(n).fill(undefined);
  const covered = new Array<boolean>(n).fill(false);
  for (const chunk of trimmed.split(',')) {
    const part = chunk.trim();
    if (!part) {
      continue;
    }
    const sep = part.indexOf(':');
    if (sep < 0) {
      throw new Error(`bad entry '${part}': expected 'START-END:VALUE' or 'default:VALUE'`);
    }
    const sel = part.slice(0, sep).trim();
    const value = Number(part.slice(sep + 1));
    if (!Number.isFinite(value)) {
      throw new Error(`bad weight value in '${part}'`);
    }
    if (sel.toLowerCase() === 'default') {
      for (let i = 0; i < n; i++) {
        if (!covered[i]) {
          weights[i] = value;
        }
      }
      continue;
    }
    for (const i of parseIndexRanges(sel, n)) {
      weights[i] = value;
      covered[i] = true;
    }
  }
  const missing = weights.filter((w) => w === undefined).length;
  if (missing > 0) {
    throw new Error(`${missing} points have no weight: add 'default:VALUE' or cover all indices`);
  }
  return weights as number[];
}

/** Compact a selection back into the 1-based range text form. */
export function formatIndexRanges(indices: Iterable<number>): string {
  const sorted = [...new Set(indices)].sort((a, b) => a - b);
  const parts: string[] = [];
  let start = -1;
  let prev = -2;
  for (const i of sorted) {
    if (i !== prev + 1) {
      if (start >= 0) {
        parts.push(start === prev ? `${start + 1}` : `${start + 1}-${prev + 1}`);
      }
      start = i;
    }
    prev = i;
  }
  if (start >= 0) {
    parts.push(start === prev ? `${start + 1}` : `${start + 1}-${prev + 1}`);
  }
  return parts.join(',');
}
