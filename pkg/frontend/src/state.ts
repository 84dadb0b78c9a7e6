/**
 * Session state and its pure transitions.
 *
 * Every user interaction maps to a function (state, ...) -> state, so the
 * rendered UI is a pure function of the state plus the last payload and the
 * whole interaction loop is unit-testable without a DOM.
 */

import type { TransformOptions } from './types.js';

export const EPSILON_MIN = 0;
export const EPSILON_MAX = 0.2;
export const EPSILON_STEP = 0.01;

/** Walkthrough sections in presentation order. */
export const WALKTHROUGH_SECTIONS = [
  'data',
  'attributes',
  'splines',
  'strengths-weaknesses',
  'diagnostics',
] as const;

export type WalkthroughSection = (typeof WALKTHROUGH_SECTIONS)[number];

export type ViewName = 'walkthrough' | 'dashboard';

export interface SessionState {
  datasetId: string | null;
  transform: TransformOptions;
  epsilon: number;
  selectedAlgorithm: string | null;
  showSeBands: boolean;
  view: ViewName;
  /** number of walkthrough sections currently revealed */
  progress: number;
  dashboardPlot: string;
  computing: boolean;
  error: string | null;
  notice: string | null;
}

export function initialState(): SessionState {
  return {
    datasetId: null,
    transform: { scale: true, invert: false, scale_by: 'column' },
    epsilon: 0,
    selectedAlgorithm: null,
    showSeBands: true,
    view: 'walkthrough',
    progress: 1,
    dashboardPlot: '3',
    computing: false,
    error: null,
    notice: null,
  };
}

export function selectDataset(state: SessionState, id: string | null): SessionState {
  return { ...state, datasetId: id, selectedAlgorithm: null, error: null };
}

export function setTransform(
  state: SessionState,
  patch: Partial<TransformOptions>,
): SessionState {
  return { ...state, transform: { ...state.transform, ...patch } };
}

/** Clamp to the slider range and snap to its step. */
export function setEpsilon(state: SessionState, value: number): SessionState {
  const clamped = Math.min(EPSILON_MAX, Math.max(EPSILON_MIN, value));
  const snapped = Math.round(clamped / EPSILON_STEP) * EPSILON_STEP;
  return { ...state, epsilon: Number(snapped.toFixed(10)) };
}

/** Highlight an algorithm; names outside the portfolio clear the highlight. */
export function selectAlgorithm(
  state: SessionState,
  name: string | null,
  algorithms: string[],
): SessionState {
  const valid = name !== null && algorithms.includes(name) ? name : null;
  return { ...state, selectedAlgorithm: valid };
}

export function toggleSeBands(state: SessionState): SessionState {
  return { ...state, showSeBands: !state.showSeBands };
}

export function setView(state: SessionState, view: ViewName): SessionState {
  return { ...state, view };
}

export function advanceWalkthrough(state: SessionState): SessionState {
  return { ...state, progress: Math.min(WALKTHROUGH_SECTIONS.length, state.progress + 1) };
}

export function rewindWalkthrough(state: SessionState): SessionState {
  return { ...state, progress: Math.max(1, state.progress - 1) };
}

export function visibleSections(state: SessionState): WalkthroughSection[] {
  return WALKTHROUGH_SECTIONS.slice(0, state.progress) as WalkthroughSection[];
}

export function setDashboardPlot(state: SessionState, plot: string): SessionState {
  return { ...state, dashboardPlot: plot };
}

export function beginCompute(state: SessionState): SessionState {
  return { ...state, computing: true, error: null, notice: null };
}

export function computeSucceeded(state: SessionState): SessionState {
  return { ...state, computing: false, progress: Math.max(state.progress, 2) };
}

export function computeFailed(state: SessionState, message: string): SessionState {
  return { ...state, computing: false, error: message };
}

/** Transient fetch failure: keep the stale view, surface a retry notice. */
export function requestFailed(state: SessionState, message: string): SessionState {
  return { ...state, notice: `${message} — showing previous results; retry when ready` };
}

export function clearNotice(state: SessionState): SessionState {
  return { ...state, notice: null };
}
