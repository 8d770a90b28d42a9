import { describe, expect, it } from 'vitest';

import { formatIndexRanges, parseIndexRanges, parseWeightSpec } from '../src/rangeSpec.js';

describe('parseIndexRanges', () => {
  it('parses singles and inclusive ranges, 1-based', () => {
    expect(parseIndexRanges('3,7-9,12', 20)).toEqual([2, 6, 7, 8, 11]);
  });

  it('deduplicates overlaps and sorts', () => {
    expect(parseIndexRanges('5-7,6,1', 10)).toEqual([0, 4, 5, 6]);
  });

  it('returns empty for blank text', () => {
    expect(parseIndexRanges('   ', 5)).toEqual([]);
  });

  it('rejects out-of-bounds ranges', () => {
    expect(() => parseIndexRanges('4-9', 5)).toThrow(/out of bounds/);
    expect(() => parseIndexRanges('0', 5)).toThrow(/out of bounds/);
  });

  it('rejects non-integer entries', () => {
    expect(() => parseIndexRanges('1.5', 5)).toThrow(/bad index/);
    expect(() => parseIndexRanges('a-b', 5)).toThrow(/bad index/);
  });
});

describe('parseWeightSpec', () => {
  it('mirrors the CLI grammar with default fill', () => {
    const w = parseWeightSpec('2-3:1e-5,default:1e-6', 4);
    expect(w).toEqual([1e-6, 1e-5, 1e-5, 1e-6]);
  });

  it('last entry wins on overlap', () => {
    const w = parseWeightSpec('1-4:0.1,2-3:0.2,default:0.3', 4);
    expect(w).toEqual([0.1, 0.2, 0.2, 0.1]);
  });

  it('keeps base weights where uncovered', () => {
    const w = parseWeightSpec('2:0.5', 3, [0.1, 0.1, 0.1]);
    expect(w).toEqual([0.1, 0.5, 0.1]);
  });

  it('requires full coverage without a base', () => {
    expect(() => parseWeightSpec('1-2:0.1', 4)).toThrow(/no weight/);
  });

  it('rejects malformed entries', () => {
    expect(() => parseWeightSpec('1-2', 4)).toThrow(/expected/);
    expect(() => parseWeightSpec('1-2:zzz', 4)).toThrow(/bad weight value/);
    expect(() => parseWeightSpec('', 4)).toThrow(/empty/);
  });
});

describe('formatIndexRanges', () => {
  it('compacts consecutive runs', () => {
    expect(formatIndexRanges([2, 6, 7, 8, 11])).toBe('3,7-9,12');
  });

  it('round-trips through the parser', () => {
    const sel = [0, 1, 2, 5, 9, 10];
    expect(parseIndexRanges(formatIndexRanges(sel), 12)).toEqual(sel);
  });

  it('is empty for an empty selection', () => {
    expect(formatIndexRanges([])).toBe('');
  });
});
