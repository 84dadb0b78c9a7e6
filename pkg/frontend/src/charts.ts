/**
 * Chart geometry: pure helpers turning numeric arrays into SVG fragments.
 *
 * Nothing in here touches the DOM; builders return path strings or small
 * plain objects that the views interpolate into SVG markup, so geometry is
 * testable as data.
 */

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Round ticks covering [min, max], at most `count` of them. */
export function niceTicks(min: number, max: number, count = 5): number[] {
  if (!(max > min)) return [min];
  const rawStep = (max - min) / count;
  const magnitude = 10 ** Math.floor(Math.log10(rawStep));
  const residual = rawStep / magnitude;
  const step = (residual >= 5 ? 5 : residual >= 2 ? 2 : 1) * magnitude;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

export function linePath(xs: number[], ys: number[], sx: LinearScale, sy: LinearScale): string {
  return xs
    .map((x, i) => `${i === 0 ? 'M' : 'L'}${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`)
    .join('');
}

/** Closed path for a confidence band between lower and upper curves. */
export function bandPath(
  xs: number[],
  lower: number[],
  upper: number[],
  sx: LinearScale,
  sy: LinearScale,
): string {
  const forward = xs.map(
    (x, i) => `${i === 0 ? 'M' : 'L'}${sx(x).toFixed(2)},${sy(upper[i]).toFixed(2)}`,
  );
  const backward = [...xs.keys()]
    .reverse()
    .map((i) => `L${sx(xs[i]).toFixed(2)},${sy(lower[i]).toFixed(2)}`);
  return forward.join('') + backward.join('') + 'Z';
}

export interface Segment {
  start: number;
  end: number;
}

/** Contiguous runs of `true` over a grid, as [start, end] in grid units. */
export function membershipSegments(grid: number[], member: boolean[]): Segment[] {
  const segments: Segment[] = [];
  let start: number | null = null;
  for (let g = 0; g < member.length; g += 1) {
    if (member[g] && start === null) start = grid[g];
    if (!member[g] && start !== null) {
      segments.push({ start, end: grid[g - 1] });
      start = null;
    }
  }
  if (start !== null) segments.push({ start, end: grid[grid.length - 1] });
  return segments;
}

export interface BoxplotStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

/** Five-number summary with linearly interpolated quartiles. */
export function boxplotStats(values: number[]): BoxplotStats {
  const sorted = [...values].sort((a, b) => a - b);
  const quantile = (q: number): number => {
    const pos = (sorted.length - 1) * q;
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
  };
  return {
    min: sorted[0],
    q1: quantile(0.25),
    median: quantile(0.5),
    q3: quantile(0.75),
    max: sorted[sorted.length - 1],
  };
}

const PALETTE = [
  '#4269d0',
  '#efb118',
  '#ff725c',
  '#6cc5b0',
  '#3ca951',
  '#ff8ab7',
  '#a463f2',
  '#97bbf5',
  '#9c6b4e',
  '#9498a0',
];

export function algorithmColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}
