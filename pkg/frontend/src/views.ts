/**
 * View models and SVG/HTML rendering.
 *
 * Each *View function reduces (payload, state) to the exact data a chart
 * draws; the render* functions turn those models into markup strings. Tests
 * assert on the view models, so "what the user sees" is checked as data.
 */

import {
  BoxplotStats,
  LinearScale,
  Segment,
  algorithmColor,
  bandPath,
  boxplotStats,
  extent,
  linePath,
  linearScale,
  membershipSegments,
  niceTicks,
} from './charts.js';
import type { AnalysisPayload, OccupancyRow } from './types.js';

export const CHART_WIDTH = 720;
export const CHART_HEIGHT = 360;
const MARGIN = { top: 16, right: 16, bottom: 36, left: 48 };

function plotArea(): { sx: [number, number]; sy: [number, number] } {
  return {
    sx: [MARGIN.left, CHART_WIDTH - MARGIN.right],
    sy: [CHART_HEIGHT - MARGIN.bottom, MARGIN.top],
  };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export interface AttributeRow {
  algorithm: string;
  anomalous: boolean;
  consistency: number;
  difficultyLimit: number;
}

export function attributeRows(payload: AnalysisPayload): AttributeRow[] {
  return payload.dataset.algorithms.map((name) => ({
    algorithm: name,
    anomalous: payload.attributes[name].anomalous,
    consistency: payload.attributes[name].consistency,
    difficultyLimit: payload.attributes[name].difficulty_limit,
  }));
}

export interface BoxplotView {
  metric: 'consistency' | 'difficulty_limit';
  stats: BoxplotStats;
  points: { algorithm: string; value: number; highlighted: boolean }[];
}

export function boxplotView(
  payload: AnalysisPayload,
  metric: 'consistency' | 'difficulty_limit',
  selected: string | null,
): BoxplotView {
  const points = payload.dataset.algorithms.map((name) => ({
    algorithm: name,
    value: payload.attributes[name][metric],
    highlighted: name === selected,
  }));
  return { metric, stats: boxplotStats(points.map((p) => p.value)), points };
}

export interface SplineSeries {
  algorithm: string;
  color: string;
  fitted: number[];
  se: number[];
  highlighted: boolean;
  dimmed: boolean;
}

export interface SplinesView {
  grid: number[];
  series: SplineSeries[];
  showSeBands: boolean;
}

export function splinesView(
  payload: AnalysisPayload,
  selected: string | null,
  showSeBands: boolean,
): SplinesView {
  const series = payload.dataset.algorithms.map((name, j) => ({
    algorithm: name,
    color: algorithmColor(j),
    fitted: payload.splines.fitted[name],
    se: payload.splines.se[name],
    highlighted: selected === name,
    dimmed: selected !== null && selected !== name,
  }));
  return { grid: payload.spectrum.grid, series, showSeBands };
}

export interface BarsRow {
  algorithm: string;
  color: string;
  segments: Segment[];
}

export interface StrengthsWeaknessesView {
  epsilon: number;
  grid: number[];
  strengths: BarsRow[];
  weaknesses: BarsRow[];
}

export function strengthsWeaknessesView(payload: AnalysisPayload): StrengthsWeaknessesView {
  const grid = payload.spectrum.grid;
  const row = (name: string, j: number, member: boolean[]): BarsRow => ({
    algorithm: name,
    color: algorithmColor(j),
    segments: membershipSegments(grid, member),
  });
  return {
    epsilon: payload.partition.epsilon,
    grid,
    strengths: payload.dataset.algorithms.map((n, j) => row(n, j, payload.partition.good[n])),
    weaknesses: payload.dataset.algorithms.map((n, j) => row(n, j, payload.partition.bad[n])),
  };
}

/** The occupancy table mirrors the partition payload row for row. */
export function occupancyRows(payload: AnalysisPayload): OccupancyRow[] {
  return payload.occupancy;
}

export interface CurvesView {
  xs: number[];
  series: { algorithm: string; color: string; ys: number[]; label: string }[];
  xLabel: string;
  yLabel: string;
}

export function goodnessView(payload: AnalysisPayload): CurvesView {
  return {
    xs: payload.goodness.tolerances,
    series: payload.dataset.algorithms.map((name, j) => ({
      algorithm: name,
      color: algorithmColor(j),
      ys: payload.goodness.curves[name],
      label: `${name} (AUC ${payload.goodness.auc[name].toFixed(3)})`,
    })),
    xLabel: 'absolute residual tolerance',
    yLabel: 'fraction of instances',
  };
}

export function effectivenessView(
  payload: AnalysisPayload,
  kind: 'actual' | 'predicted',
): CurvesView {
  return {
    xs: payload.effectiveness.tolerances,
    series: payload.dataset.algorithms.map((name, j) => ({
      algorithm: name,
      color: algorithmColor(j),
      ys: payload.effectiveness[kind][name],
      label: name,
    })),
    xLabel: 'effectiveness tolerance',
    yLabel: `${kind} fraction within tolerance of best`,
  };
}

export interface EffectivenessScatterView {
  points: { algorithm: string; color: string; actual: number; predicted: number }[];
}

export function effectivenessScatterView(payload: AnalysisPayload): EffectivenessScatterView {
  return {
    points: payload.dataset.algorithms.map((name, j) => ({
      algorithm: name,
      color: algorithmColor(j),
      actual: payload.effectiveness.auc_actual[name],
      predicted: payload.effectiveness.auc_predicted[name],
    })),
  };
}

export interface ScatterView {
  difficulty: number[];
  series: { algorithm: string; color: string; values: number[] }[];
}

export function performanceScatterView(payload: AnalysisPayload): ScatterView {
  return {
    difficulty: payload.traits.difficulty,
    series: payload.dataset.algorithms.map((name, j) => ({
      algorithm: name,
      color: algorithmColor(j),
      values: payload.performance.values.map((row) => row[j]),
    })),
  };
}

// ---------------------------------------------------------------------------
// SVG / HTML renderers

function svgOpen(): string {
  return `<svg viewBox="0 0 ${CHART_WIDTH} ${CHART_HEIGHT}" xmlns="http://www.w3.org/2000/svg">`;
}

function axes(sx: LinearScale, sy: LinearScale, xLabel: string, yLabel: string): string {
  const [x0, x1] = sx.range;
  const [y0, y1] = sy.range;
  const parts: string[] = [];
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" class="axis"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" class="axis"/>`);
  for (const t of niceTicks(sx.domain[0], sx.domain[1])) {
    parts.push(
      `<text x="${sx(t).toFixed(1)}" y="${y0 + 16}" class="tick" text-anchor="middle">${t}</text>`,
    );
  }
  for (const t of niceTicks(sy.domain[0], sy.domain[1])) {
    parts.push(
      `<text x="${x0 - 6}" y="${sy(t).toFixed(1)}" class="tick" text-anchor="end">${t}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${CHART_HEIGHT - 4}" class="label" text-anchor="middle">${escapeHtml(xLabel)}</text>`,
  );
  parts.push(
    `<text x="12" y="${(y0 + y1) / 2}" class="label" text-anchor="middle" transform="rotate(-90 12 ${(y0 + y1) / 2})">${escapeHtml(yLabel)}</text>`,
  );
  return parts.join('');
}

export function renderSplinesSvg(view: SplinesView): string {
  const { sx, sy } = plotArea();
  const scaleX = linearScale(extent(view.grid), sx);
  const allValues = view.series.flatMap((s) =>
    view.showSeBands
      ? s.fitted.flatMap((f, i) => [f - 1.96 * s.se[i], f + 1.96 * s.se[i]])
      : s.fitted,
  );
  const scaleY = linearScale(extent(allValues), sy);
  const parts = [svgOpen(), axes(scaleX, scaleY, 'problem difficulty', 'performance')];
  for (const s of view.series) {
    const opacity = s.dimmed ? 0.18 : 1;
    if (view.showSeBands && !s.dimmed) {
      const lower = s.fitted.map((f, i) => f - 1.96 * s.se[i]);
      const upper = s.fitted.map((f, i) => f + 1.96 * s.se[i]);
      parts.push(
        `<path d="${bandPath(view.grid, lower, upper, scaleX, scaleY)}" fill="${s.color}" opacity="0.15" data-band="${escapeHtml(s.algorithm)}"/>`,
      );
    }
    parts.push(
      `<path d="${linePath(view.grid, s.fitted, scaleX, scaleY)}" fill="none" stroke="${s.color}" stroke-width="${s.highlighted ? 3.5 : 1.8}" opacity="${opacity}" data-series="${escapeHtml(s.algorithm)}"/>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderBarsSvg(view: StrengthsWeaknessesView): string {
  const { sx } = plotArea();
  const scaleX = linearScale(extent(view.grid), sx);
  const rowHeight = 22;
  const groups: [string, BarsRow[]][] = [
    ['Strengths', view.strengths],
    ['Weaknesses', view.weaknesses],
  ];
  const height =
    MARGIN.top + groups.reduce((acc, [, rows]) => acc + rows.length * rowHeight + 40, 0) + 20;
  const parts = [
    `<svg viewBox="0 0 ${CHART_WIDTH} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  ];
  let y = MARGIN.top;
  for (const [title, rows] of groups) {
    parts.push(`<text x="${MARGIN.left}" y="${y + 8}" class="label">${title} (epsilon=${view.epsilon})</text>`);
    y += 16;
    for (const row of rows) {
      for (const seg of row.segments) {
        const x = scaleX(seg.start);
        const w = Math.max(1, scaleX(seg.end) - x);
        parts.push(
          `<rect x="${x.toFixed(1)}" y="${y + 3}" width="${w.toFixed(1)}" height="${rowHeight - 6}" fill="${row.color}" data-bar="${escapeHtml(row.algorithm)}"/>`,
        );
      }
      parts.push(
        `<text x="${MARGIN.left - 6}" y="${y + rowHeight / 2 + 4}" class="tick" text-anchor="end">${escapeHtml(row.algorithm)}</text>`,
      );
      y += rowHeight;
    }
    y += 24;
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderBoxplotSvg(view: BoxplotView): string {
  const { sx } = plotArea();
  const values = view.points.map((p) => p.value);
  const scaleX = linearScale(extent(values), sx);
  const mid = 90;
  const parts = [
    `<svg viewBox="0 0 ${CHART_WIDTH} 180" xmlns="http://www.w3.org/2000/svg">`,
  ];
  const { min, q1, median, q3, max } = view.stats;
  parts.push(`<line x1="${scaleX(min)}" y1="${mid}" x2="${scaleX(q1)}" y2="${mid}" class="axis"/>`);
  parts.push(`<line x1="${scaleX(q3)}" y1="${mid}" x2="${scaleX(max)}" y2="${mid}" class="axis"/>`);
  parts.push(
    `<rect x="${scaleX(q1)}" y="${mid - 26}" width="${Math.max(1, scaleX(q3) - scaleX(q1))}" height="52" class="box"/>`,
  );
  parts.push(
    `<line x1="${scaleX(median)}" y1="${mid - 26}" x2="${scaleX(median)}" y2="${mid + 26}" class="median"/>`,
  );
  for (const p of view.points) {
    parts.push(
      `<circle cx="${scaleX(p.value).toFixed(1)}" cy="${mid}" r="${p.highlighted ? 8 : 4.5}" class="${p.highlighted ? 'point highlighted' : 'point'}" data-point="${escapeHtml(p.algorithm)}"><title>${escapeHtml(p.algorithm)}: ${p.value.toFixed(4)}</title></circle>`,
    );
  }
  for (const t of niceTicks(scaleX.domain[0], scaleX.domain[1])) {
    parts.push(
      `<text x="${scaleX(t).toFixed(1)}" y="160" class="tick" text-anchor="middle">${t}</text>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderCurvesSvg(view: CurvesView, reference?: 'diagonal'): string {
  const { sx, sy } = plotArea();
  const scaleX = linearScale(extent(view.xs), sx);
  const scaleY = linearScale([0, 1], sy);
  const parts = [svgOpen(), axes(scaleX, scaleY, view.xLabel, view.yLabel)];
  if (reference === 'diagonal') {
    parts.push(
      `<line x1="${scaleX(0)}" y1="${scaleY(0)}" x2="${scaleX(1)}" y2="${scaleY(1)}" stroke-dasharray="4 4" class="reference"/>`,
    );
  }
  for (const s of view.series) {
    parts.push(
      `<path d="${linePath(view.xs, s.ys, scaleX, scaleY)}" fill="none" stroke="${s.color}" stroke-width="1.8" data-series="${escapeHtml(s.algorithm)}"/>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderEffectivenessScatterSvg(view: EffectivenessScatterView): string {
  const { sx, sy } = plotArea();
  const scaleX = linearScale([0, 1], sx);
  const scaleY = linearScale([0, 1], sy);
  const parts = [
    svgOpen(),
    axes(scaleX, scaleY, 'actual effectiveness (AUC)', 'predicted effectiveness (AUC)'),
    `<line x1="${scaleX(0)}" y1="${scaleY(0)}" x2="${scaleX(1)}" y2="${scaleY(1)}" stroke-dasharray="4 4" class="reference"/>`,
  ];
  for (const p of view.points) {
    parts.push(
      `<circle cx="${scaleX(p.actual).toFixed(1)}" cy="${scaleY(p.predicted).toFixed(1)}" r="5" fill="${p.color}" data-point="${escapeHtml(p.algorithm)}"/>`,
    );
    parts.push(
      `<text x="${(scaleX(p.actual) + 7).toFixed(1)}" y="${(scaleY(p.predicted) - 7).toFixed(1)}" class="tick">${escapeHtml(p.algorithm)}</text>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderScatterSvg(view: ScatterView): string {
  const { sx, sy } = plotArea();
  const scaleX = linearScale(extent(view.difficulty), sx);
  const all = view.series.flatMap((s) => s.values);
  const scaleY = linearScale(extent(all), sy);
  const parts = [svgOpen(), axes(scaleX, scaleY, 'problem difficulty', 'performance')];
  for (const s of view.series) {
    for (let i = 0; i < view.difficulty.length; i += 1) {
      parts.push(
        `<circle cx="${scaleX(view.difficulty[i]).toFixed(1)}" cy="${scaleY(s.values[i]).toFixed(1)}" r="2.4" fill="${s.color}" opacity="0.55" data-series="${escapeHtml(s.algorithm)}"/>`,
      );
    }
  }
  parts.push('</svg>');
  return parts.join('');
}

export function renderAttributesTableHtml(
  rows: AttributeRow[],
  selected: string | null,
): string {
  const body = rows
    .map(
      (r) => `<tr data-algorithm="${escapeHtml(r.algorithm)}"${
        r.algorithm === selected ? ' class="selected"' : ''
      }><td>${escapeHtml(r.algorithm)}</td><td>${r.anomalous ? 'yes' : 'no'}</td><td>${r.consistency.toFixed(4)}</td><td>${r.difficultyLimit.toFixed(4)}</td></tr>`,
    )
    .join('');
  return `<table class="attributes"><thead><tr><th>algorithm</th><th>anomalous</th><th>consistency</th><th>difficulty limit</th></tr></thead><tbody>${body}</tbody></table>`;
}

export function renderOccupancyTableHtml(rows: OccupancyRow[]): string {
  const body = rows
    .map(
      (r) =>
        `<tr><td>${escapeHtml(r.algorithm)}</td><td>${r.strength_proportion.toFixed(4)}</td><td>${r.weakness_proportion.toFixed(4)}</td></tr>`,
    )
    .join('');
  return `<table class="occupancy"><thead><tr><th>algorithm</th><th>strength</th><th>weakness</th></tr></thead><tbody>${body}</tbody></table>`;
}

/** Filename for a downloaded bundle: dataset name plus a timestamp. */
export function bundleFilename(datasetName: string, when: Date): string {
  const stamp = when.toISOString().replace(/[:.]/g, '-').slice(0, 19);
  const safe = datasetName.replace(/[^A-Za-z0-9._-]+/g, '_');
  return `${safe}-${stamp}.tar`;
}
